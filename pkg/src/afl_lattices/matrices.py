"""Dense matrices over a LocalRing (lists of rows of RingElem)."""
from __future__ import annotations

from typing import Sequence

from .local_rings import LocalRing, PrecisionError, RingElem, elem_from_json

Matrix = list  # list[list[RingElem]]
Vector = list  # list[RingElem]


def zeros(R: LocalRing, n: int, m: int | None = None) -> Matrix:
    m = n if m is None else m
    return [[R.zero() for _ in range(m)] for _ in range(n)]


def identity(R: LocalRing, n: int) -> Matrix:
    out = zeros(R, n)
    for i in range(n):
        out[i][i] = R.one()
    return out


def diag(R: LocalRing, entries: Sequence) -> Matrix:
    n = len(entries)
    out = zeros(R, n)
    for i, a in enumerate(entries):
        out[i][i] = a if isinstance(a, RingElem) else R.from_int(a)
    return out


def shape(A: Matrix) -> tuple:
    return len(A), (len(A[0]) if A else 0)


def mul(A: Matrix, B: Matrix) -> Matrix:
    n, k = shape(A)
    m = len(B[0])
    out = []
    for i in range(n):
        row = A[i]
        out_row = []
        for j in range(m):
            acc = row[0] * B[0][j]
            for t in range(1, k):
                acc = acc + row[t] * B[t][j]
            out_row.append(acc)
        out.append(out_row)
    return out


def mat_vec(A: Matrix, v: Vector) -> Vector:
    return [sum((A[i][t] * v[t] for t in range(1, len(v))), A[i][0] * v[0]) for i in range(len(A))]


def add(A: Matrix, B: Matrix) -> Matrix:
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def sub(A: Matrix, B: Matrix) -> Matrix:
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def scale(A: Matrix, c) -> Matrix:
    return [[c * a for a in row] for row in A]


def transpose(A: Matrix) -> Matrix:
    return [list(col) for col in zip(*A)]


def sigma(A: Matrix) -> Matrix:
    return [[a.sigma() for a in row] for row in A]


def conj_transpose(A: Matrix) -> Matrix:
    return transpose(sigma(A))


def columns(A: Matrix) -> list:
    return [list(c) for c in zip(*A)]


def from_columns(cols: Sequence[Vector]) -> Matrix:
    return [list(r) for r in zip(*cols)]


def power(A: Matrix, k: int) -> Matrix:
    R = A[0][0].ring
    res, base = identity(R, len(A)), A
    while k:
        if k & 1:
            res = mul(res, base)
        base = mul(base, base)
        k >>= 1
    return res


def equal(A: Matrix, B: Matrix) -> bool:
    return all(a == b for ra, rb in zip(A, B) for a, b in zip(ra, rb))


def close(A: Matrix, B: Matrix, slack: int = 0) -> bool:
    """Equality modulo pi^(N - slack), for values recomputed through divisions."""
    if slack <= 0:
        return equal(A, B)
    R = A[0][0].ring
    bound = R.N - slack
    return all((a - b).valuation() >= bound for ra, rb in zip(A, B) for a, b in zip(ra, rb))


def min_valuation(A: Matrix):
    return min((a.valuation() for row in A for a in row), default=float("inf"))


def is_integral(A: Matrix) -> bool:
    return all(a.k == 0 for row in A for a in row)


def _eliminate(A: Matrix, rhs: Matrix | None):
    """Gaussian elimination with minimal-valuation pivots.

    Returns (determinant, solution of A X = rhs) and raises PrecisionError
    when A is singular at working precision."""
    R = A[0][0].ring
    n = len(A)
    M = [list(r) for r in A]
    X = [list(r) for r in rhs] if rhs is not None else None
    det = R.one()
    for c in range(n):
        piv, best = None, float("inf")
        for r in range(c, n):
            v = M[r][c].valuation()
            if v < best:
                piv, best = r, v
        if piv is None:
            raise PrecisionError("matrix is singular at working precision")
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            if X is not None:
                X[c], X[piv] = X[piv], X[c]
            det = -det
        inv = M[c][c].inverse()
        det = det * M[c][c]
        for r in range(n):
            if r != c and not M[r][c].is_zero():
                f = M[r][c] * inv
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
                if X is not None:
                    X[r] = [a - f * b for a, b in zip(X[r], X[c])]
    if X is not None:
        for r in range(n):
            inv = M[r][r].inverse()
            X[r] = [inv * a for a in X[r]]
    return det, X


def inverse(A: Matrix) -> Matrix:
    R = A[0][0].ring
    return _eliminate(A, identity(R, len(A)))[1]


def solve(A: Matrix, B: Matrix) -> Matrix:
    return _eliminate(A, B)[1]


def det(A: Matrix) -> RingElem:
    try:
        return _eliminate(A, None)[0]
    except PrecisionError:
        return A[0][0].ring.zero()


def coerce(R: LocalRing, A: Matrix) -> Matrix:
    return [[R.coerce(a) for a in row] for row in A]


def to_json(A: Matrix) -> list:
    return [[a.to_json() for a in row] for row in A]


def from_json(R: LocalRing, data) -> Matrix:
    return [[elem_from_json(R, a) for a in row] for row in data]


def vec_from_json(R: LocalRing, data) -> Vector:
    return [elem_from_json(R, a) for a in data]


def charpoly(A: Matrix) -> list:
    """Coefficients c_0..c_n (little-endian, monic) of det(t - A).

    Division-free (Berkowitz), so it is exact over the truncated ring."""
    return _berkowitz(A)


def _berkowitz(A: Matrix) -> list:
    R = A[0][0].ring
    n = len(A)
    # polynomial of the leading 1x1 block, then grow
    poly = [R.one()]  # coefficients high-to-low for det(t - A_k)
    for k in range(n):
        # A_k+1 = [[A_k, c], [r, a]]
        a = A[k][k]
        col = [A[i][k] for i in range(k)]
        row = [A[k][j] for j in range(k)]
        # Toeplitz column: 1, -a, -r c, -r A c, ..., -r A^{k-1} c
        t = [R.one(), -a]
        vec = col
        sub_ = [r_[:k] for r_ in A[:k]]
        for _ in range(k):
            s = R.zero()
            for x, y in zip(row, vec):
                s = s + x * y
            t.append(-s)
            vec = [sum((sub_[i][j] * vec[j] for j in range(k)), R.zero()) for i in range(k)]
        new = []
        for i in range(k + 2):
            acc = R.zero()
            for j in range(len(poly)):
                if 0 <= i - j < len(t):
                    acc = acc + t[i - j] * poly[j]
            new.append(acc)
        poly = new
    return list(reversed(poly))
