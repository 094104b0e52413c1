"""Lattices over O_E and finite O_E-modules between them.

The finite-module kernel works over the chain ring O_E/pi^K.  A submodule S
of Q = (+)_i O/pi^(e_i) is identified with the lattice Y in O^r satisfying
diag(pi^e_i) O^r <= Y <= O^r, and keyed by the column Hermite form of Y.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import product
from typing import Iterable, NamedTuple, Sequence

from . import matrices as mx
from .local_rings import LocalRing, PrecisionError, RingElem, residue_ring

DEFAULT_CAP = 10 ** 5


class CapExceeded(RuntimeError):
    def __init__(self, required: int, cap: int):
        super().__init__(f"quotient has {required} elements, above the cap of {cap}")
        self.required = required
        self.cap = cap


class InclusionError(ValueError):
    """The first lattice is not contained in the second."""


# -- raw kernel ------------------------------------------------------------

def hermite_raw(R: LocalRing, gens: Iterable[Sequence], r: int) -> tuple:
    """Column Hermite form of span(gens) + pi^K O^r, K = R.N.

    Returns (exps, cols): cols[i] has pi^exps[i] in row i, zeros below, and
    entries above reduced modulo the pivot of their row."""
    K = R.N
    zero = R.zero_raw
    work = [list(g) for g in gens]
    exps = [K] * r
    cols = [None] * r
    for i in range(r - 1, -1, -1):
        best, bv = None, K
        for idx, g in enumerate(work):
            v = R.rval(g[i])
            if v is not None and v < bv:
                best, bv = idx, v
        if best is None:
            cols[i] = [zero] * r
            continue
        piv = work.pop(best)
        uinv = R.rinv_unit(R.rshift_down(piv[i], bv))
        piv = [R.rmul(x, uinv) for x in piv]
        for g in work:
            if g[i] != zero:
                c = R.rshift_down(g[i], bv)
                for t in range(i + 1):
                    g[t] = R.rsub(g[t], R.rmul(c, piv[t]))
        if bv > 0 and i > 0:
            work.append([R.rneg(R.rshift_up(piv[t], K - bv)) for t in range(i)] + [zero] * (r - i))
        cols[i] = piv
        exps[i] = bv
    for j in range(r):
        col = cols[j]
        for i in range(j - 1, -1, -1):
            y = col[i]
            rep = R.reduce_mod(y, exps[i])
            if y != rep:
                c = R.rshift_down(R.rsub(y, rep), exps[i])
                ci = cols[i]
                for t in range(i + 1):
                    col[t] = R.rsub(col[t], R.rmul(c, ci[t]))
    return tuple(exps), tuple(tuple(c) for c in cols)


def in_span_raw(R: LocalRing, exps: Sequence[int], cols: Sequence, v: Sequence) -> bool:
    """Membership of v in the lattice given by a Hermite form."""
    v = list(v)
    for i in range(len(exps) - 1, -1, -1):
        x = v[i]
        val = R.rval(x)
        if val is None:
            continue
        k = exps[i]
        if val < k:
            return False
        c = R.rshift_down(x, k)
        col = cols[i]
        for t in range(i + 1):
            v[t] = R.rsub(v[t], R.rmul(c, col[t]))
    return True


def smith_raw(R: LocalRing, rows: Sequence[Sequence], r: int, m: int) -> tuple:
    """Smith form P A W = diag(pi^s) of an r x m raw matrix.

    Returns (s, U) with U = P^-1 given as a list of rows; s_i = R.N marks a
    zero diagonal entry."""
    K = R.N
    A = [list(row) for row in rows]
    one, zero = R.one_raw, R.zero_raw
    U = [[one if i == j else zero for j in range(r)] for i in range(r)]
    s = [K] * r
    for t in range(min(r, m)):
        best, bv = None, K
        for a in range(t, r):
            for b in range(t, m):
                v = R.rval(A[a][b])
                if v is not None and v < bv:
                    best, bv = (a, b), v
        if best is None:
            break
        a, b = best
        if a != t:
            A[a], A[t] = A[t], A[a]
            for row in U:
                row[a], row[t] = row[t], row[a]
        if b != t:
            for row in A:
                row[b], row[t] = row[t], row[b]
        u = R.rshift_down(A[t][t], bv)
        uinv = R.rinv_unit(u)
        A[t] = [R.rmul(x, uinv) for x in A[t]]
        for row in U:
            row[t] = R.rmul(row[t], u)
        for a in range(t + 1, r):
            if A[a][t] != zero:
                c = R.rshift_down(A[a][t], bv)
                A[a] = [R.rsub(x, R.rmul(c, y)) for x, y in zip(A[a], A[t])]
                for row in U:
                    row[t] = R.radd(row[t], R.rmul(c, row[a]))
        for b in range(t + 1, m):
            A[t][b] = zero
        s[t] = bv
    return s, U


# -- lattices in E^n -------------------------------------------------------

class Lattice:
    """A full-rank O_E-lattice pi^(-shift) * span(cols), cols in Hermite form."""

    __slots__ = ("ring", "n", "shift", "exps", "cols")

    def __init__(self, ring: LocalRing, n: int, shift: int, exps: tuple, cols: tuple):
        self.ring, self.n, self.shift, self.exps, self.cols = ring, n, shift, exps, cols

    @property
    def basis(self) -> mx.Matrix:
        R = self.ring
        cols = [[RingElem(R, self.shift, x) for x in col] for col in self.cols]
        return mx.from_columns(cols)

    @property
    def vdet(self) -> int:
        """Valuation of the determinant of the canonical basis."""
        return sum(self.exps) - self.n * self.shift

    def key(self) -> tuple:
        return (self.shift, self.exps, self.cols)

    def __eq__(self, other) -> bool:
        return isinstance(other, Lattice) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def contains(self, v: Sequence[RingElem]) -> bool:
        R = self.ring
        scaled = [a * R.pi_power(self.shift) for a in v]
        if any(a.k for a in scaled):
            return False
        return in_span_raw(R, self.exps, self.cols, [a.c for a in scaled])

    def contains_lattice(self, other: "Lattice") -> bool:
        return all(self.contains(col) for col in mx.columns(other.basis))

    def scaled(self, k: int) -> "Lattice":
        """pi^k * self."""
        return Lattice(self.ring, self.n, self.shift - k, self.exps, self.cols)

    def __repr__(self) -> str:
        return f"Lattice(n={self.n}, shift={self.shift}, exps={self.exps})"


def hnf(basis: mx.Matrix) -> Lattice:
    """Canonical lattice spanned by the columns of ``basis``."""
    R = basis[0][0].ring
    n = len(basis)
    mv = mx.min_valuation(basis)
    if mv == float("inf"):
        raise PrecisionError("zero basis")
    shift = -mv
    scale = R.pi_power(shift)
    cols = [[(a * scale).c for a in col] for col in mx.columns(basis)]
    exps, hcols = hermite_raw(R, cols, n)
    s, _ = smith_raw(R, [[hcols[j][i] for j in range(n)] for i in range(n)], n, n)
    if max(s) >= R.N:
        raise PrecisionError("basis is singular at working precision")
    return Lattice(R, n, shift, exps, hcols)


def standard_lattice(R: LocalRing, n: int) -> Lattice:
    return hnf(mx.identity(R, n))


def lattice_sum(a: Lattice, b: Lattice) -> Lattice:
    return hnf([ra + rb for ra, rb in zip(a.basis, b.basis)])


def apply_linear(X: mx.Matrix, lat: Lattice) -> mx.Matrix:
    return mx.mul(X, lat.basis)


def apply_semilinear(T: mx.Matrix, lat: Lattice) -> mx.Matrix:
    return mx.mul(T, mx.sigma(lat.basis))


def index(l1: Lattice, l2: Lattice) -> int:
    """len(l1/(l1 & l2)) - len(l2/(l1 & l2)) as O_E-lengths.

    With this convention index(pi^-1 L, L) = n and index(L, hL) = v(det h)."""
    return l2.vdet - l1.vdet


def is_stable(lat: Lattice, op: mx.Matrix, semilinear: bool = False, equality: bool = False) -> bool:
    """op(lat) <= lat; with equality=True, op(lat) == lat."""
    image = apply_semilinear(op, lat) if semilinear else apply_linear(op, lat)
    if not all(lat.contains(col) for col in mx.columns(image)):
        return False
    if equality:
        try:
            return hnf(image) == lat
        except PrecisionError:
            return False
    return True


# -- finite quotients ------------------------------------------------------

class Submodule(NamedTuple):
    length: int
    exps: tuple
    cols: tuple

    @property
    def key(self) -> tuple:
        return (self.exps, self.cols)


@dataclass
class QuotientOperator:
    """An operator on Q: z -> M z (linear) or z -> M sigma(z) (semilinear)."""

    matrix: tuple  # rows of raw values over the kernel ring
    semilinear: bool = False


class FiniteQuotient:
    """Q = Lv / L with Smith coordinates.

    ``basis`` is a basis of Lv whose first r columns map onto the cyclic
    factors O/pi^(e_i) of Q; the remaining columns lie in L."""

    def __init__(self, ring: LocalRing, divisors: tuple, basis: mx.Matrix, L: Lattice | None = None,
                 Lv: Lattice | None = None):
        self.ring = ring
        self.divisors = divisors
        self.r = len(divisors)
        self.n = len(basis)
        self.basis = basis
        self.basis_inv = mx.inverse(basis) if basis else []
        self.L, self.Lv = L, Lv
        self.K = max(divisors) if divisors else 1
        self.kring = residue_ring(ring.spec, self.K)
        kr = self.kring
        self.D = [tuple(kr.rshift_up(kr.one_raw, e) if i == j else kr.zero_raw for i in range(self.r))
                  for j, e in enumerate(divisors)]

    @property
    def length(self) -> int:
        return sum(self.divisors)

    @property
    def size(self) -> int:
        return self.ring.residue_size ** self.length

    @classmethod
    def abstract(cls, ring: LocalRing, divisors: Sequence[int]) -> "FiniteQuotient":
        """(+)_i O/pi^(e_i) with the standard basis, no ambient lattices."""
        divisors = tuple(sorted((e for e in divisors if e > 0), reverse=True))
        n = len(divisors)
        basis = mx.identity(ring, n) if n else []
        return cls(ring, divisors, basis)

    # coordinates
    def to_kernel(self, a: RingElem) -> tuple:
        if a.k:
            raise ValueError("non-integral quotient coordinate")
        return self.kring.canon(a.c)

    def coords(self, v: Sequence[RingElem]) -> tuple:
        """Quotient coordinates of a vector of Lv."""
        z = mx.mat_vec(self.basis_inv, list(v))
        return tuple(self.to_kernel(z[i]) for i in range(self.r))

    def _lift_matrix(self, exps: Sequence[int], key_cols: Sequence) -> mx.Matrix:
        # pi^K vanishes in the kernel ring, so diagonals are rebuilt from exps
        R = self.ring
        cols = []
        for i, col in enumerate(key_cols):
            lifted = [RingElem(R, 0, R.canon(x)) for x in col] + [R.zero()] * (self.n - self.r)
            lifted[i] = R.pi_power(exps[i])
            cols.append(lifted)
        for i, e in enumerate(self.divisors):
            v = [R.zero()] * self.n
            v[i] = R.pi_power(e)
            cols.append(v)
        for i in range(self.r, self.n):
            v = [R.zero()] * self.n
            v[i] = R.one()
            cols.append(v)
        return mx.from_columns(cols)

    def lattice_of(self, sub: Submodule) -> Lattice:
        if not self.r:
            return hnf(self.basis)
        return hnf(mx.mul(self.basis, self._lift_matrix(sub.exps, sub.cols)))

    def submodule_of(self, lat: Lattice) -> Submodule:
        gens = [self.coords(col) for col in mx.columns(lat.basis)]
        return self.make_submodule(gens)

    def make_submodule(self, gens: Iterable[Sequence]) -> Submodule:
        exps, cols = hermite_raw(self.kring, list(gens) + self.D, self.r)
        return Submodule(self.length - sum(exps), exps, cols)

    def zero_submodule(self) -> Submodule:
        return self.make_submodule([])

    def full_submodule(self) -> Submodule:
        kr = self.kring
        return self.make_submodule(
            [tuple(kr.one_raw if i == j else kr.zero_raw for i in range(self.r)) for j in range(self.r)])

    # operators
    def linear_operator(self, X: mx.Matrix) -> QuotientOperator:
        M = mx.mul(mx.mul(self.basis_inv, X), self.basis)
        return QuotientOperator(tuple(tuple(self.to_kernel(M[i][j]) for j in range(self.r))
                                      for i in range(self.r)), False)

    def semilinear_operator(self, T: mx.Matrix) -> QuotientOperator:
        M = mx.mul(mx.mul(self.basis_inv, T), mx.sigma(self.basis))
        return QuotientOperator(tuple(tuple(self.to_kernel(M[i][j]) for j in range(self.r))
                                      for i in range(self.r)), True)

    def apply(self, op: QuotientOperator, v: Sequence) -> tuple:
        kr = self.kring
        if op.semilinear:
            v = [kr.rsigma(x) for x in v]
        out = []
        for row in op.matrix:
            acc = kr.zero_raw
            for m, x in zip(row, v):
                if m != kr.zero_raw and x != kr.zero_raw:
                    acc = kr.radd(acc, kr.rmul(m, x))
            out.append(acc)
        return tuple(out)

    def contains(self, sub: Submodule, v: Sequence) -> bool:
        return in_span_raw(self.kring, sub.exps, sub.cols, v)

    def is_stable(self, sub: Submodule, op: QuotientOperator) -> bool:
        return all(self.contains(sub, self.apply(op, col)) for col in sub.cols)

    def closure(self, gens: Iterable[Sequence], ops: Sequence[QuotientOperator]) -> Submodule:
        sub = self.make_submodule(gens)
        while True:
            new = [self.apply(op, col) for op in ops for col in sub.cols]
            missing = [w for w in new if not self.contains(sub, w)]
            if not missing:
                return sub
            sub = self.make_submodule(list(sub.cols) + missing)

    def elements(self) -> Iterable[tuple]:
        kr = self.kring
        reps = [kr.digit_reps(e) for e in self.divisors]
        return product(*reps)

    def socle_points(self, sub: Submodule) -> list:
        """One generator per line of the pi-torsion of Q/sub."""
        kr = self.kring
        r = self.r
        rows = [[sub.cols[j][i] for j in range(r)] for i in range(r)]
        s, U = smith_raw(kr, rows, r, r)
        basis = []
        for i in range(r):
            if s[i] >= 1:
                col = tuple(kr.rshift_up(U[t][i], s[i] - 1) for t in range(r))
                basis.append(col)
        if not basis:
            return []
        field = kr.residue_elements()
        zero, one = kr.zero_raw, kr.one_raw
        points = []
        m = len(basis)
        for lead in range(m):
            for tail in product(field, repeat=m - lead - 1):
                coeffs = [zero] * lead + [one] + list(tail)
                v = [zero] * r
                for c, b in zip(coeffs, basis):
                    if c != zero:
                        v = [kr.radd(x, kr.rmul(c, y)) for x, y in zip(v, b)]
                points.append(tuple(v))
        return points


def quotient(L: Lattice, Lv: Lattice) -> FiniteQuotient:
    """Smith decomposition of Lv / L."""
    if not Lv.contains_lattice(L):
        raise InclusionError("L is not contained in Lv")
    R = L.ring
    n = L.n
    H = mx.solve(Lv.basis, L.basis)
    rows = [[a.c for a in row] for row in H]
    s, U = smith_raw(R, rows, n, n)
    if max(s, default=0) >= R.N:
        raise PrecisionError("quotient is infinite at working precision")
    order = sorted(range(n), key=lambda i: -s[i])
    Umat = [[RingElem(R, 0, U[i][j]) for j in order] for i in range(n)]
    basis = mx.mul(Lv.basis, Umat)
    divisors = tuple(s[i] for i in order if s[i] > 0)
    return FiniteQuotient(R, divisors, basis, L, Lv)


# -- enumeration -----------------------------------------------------------

def _check_cap(Q: FiniteQuotient, cap: int) -> None:
    if Q.size > cap:
        raise CapExceeded(Q.size, cap)


def _sorted(subs: Iterable[Submodule]) -> list:
    return sorted(subs, key=lambda s: (s.length, s.exps, s.cols))


def enumerate_bfs(Q: FiniteQuotient, ops: Sequence[QuotientOperator] = (), cap: int = DEFAULT_CAP) -> list:
    """Closure-by-generation: adjoin every element of Q to every submodule found."""
    _check_cap(Q, cap)
    start = Q.closure([], ops)
    seen = {start.key: start}
    queue = deque([start])
    elements = list(Q.elements())
    while queue:
        sub = queue.popleft()
        for v in elements:
            if Q.contains(sub, v):
                continue
            t = Q.closure(list(sub.cols) + [v], ops)
            if t.key not in seen:
                seen[t.key] = t
                queue.append(t)
    return _sorted(seen.values())


def enumerate_echelon(Q: FiniteQuotient, cap: int = DEFAULT_CAP) -> list:
    """All submodules, listed directly as reduced Hermite forms."""
    _check_cap(Q, cap)
    kr, r, e = Q.kring, Q.r, Q.divisors
    reps = {k: kr.digit_reps(k) for k in range(Q.K + 1)}
    zero = kr.zero_raw
    out = []

    def contains_D(j, cols, exps):
        k = exps[j]
        diff = e[j] - k
        v = [kr.rneg(kr.rshift_up(cols[j][i], diff)) for i in range(j)]
        return in_span_raw(kr, exps[:j], [c[:j] for c in cols[:j]], v)

    def rec(j, cols, exps):
        if j == r:
            out.append(Submodule(Q.length - sum(exps), tuple(exps), tuple(tuple(c) for c in cols)))
            return
        for k in range(e[j] + 1):
            diag = kr.rshift_up(kr.one_raw, k)
            for above in product(*(reps[exps[i]] for i in range(j))):
                col = list(above) + [diag] + [zero] * (r - j - 1)
                ncols, nexps = cols + [col], exps + [k]
                if contains_D(j, ncols, nexps):
                    rec(j + 1, ncols, nexps)

    rec(0, [], [])
    return _sorted(out)


def enumerate_socle(Q: FiniteQuotient, ops: Sequence[QuotientOperator] = (), cap: int = DEFAULT_CAP) -> list:
    """Stable submodules grown one simple layer at a time.

    Every stable T > S contains a stable cover of S killed by pi over S, so
    adjoining the pi-torsion points of Q/S to S and closing reaches all of
    them."""
    _check_cap(Q, cap)
    start = Q.closure([], ops)
    seen = {start.key: start}
    queue = deque([start])
    while queue:
        sub = queue.popleft()
        for v in Q.socle_points(sub):
            t = Q.closure(list(sub.cols) + [v], ops)
            if t.key not in seen:
                seen[t.key] = t
                queue.append(t)
    return _sorted(seen.values())


def enumerate_submodules(Q: FiniteQuotient, stabilizers: Sequence[QuotientOperator] = (),
                         mode: str = "all", strategy: str | None = None, cap: int = DEFAULT_CAP) -> list:
    """Every submodule of Q (mode="all"), or those stable under all
    ``stabilizers`` (mode="stable").  strategy: "echelon", "bfs" or "socle"."""
    if mode not in ("all", "stable"):
        raise ValueError(f"unknown mode {mode!r}")
    ops = list(stabilizers) if mode == "stable" else []
    if strategy is None:
        strategy = "socle" if ops else "echelon"
    if strategy == "echelon":
        subs = enumerate_echelon(Q, cap)
        return [s for s in subs if all(Q.is_stable(s, op) for op in ops)]
    if strategy == "bfs":
        return enumerate_bfs(Q, ops, cap)
    if strategy == "socle":
        return enumerate_socle(Q, ops, cap)
    raise ValueError(f"unknown strategy {strategy!r}")


def chain_ring_submodule_count(a: int, b: int, residue_size: int) -> int:
    """Number of submodules of O/pi^a (+) O/pi^b over a chain ring with the
    given residue field size (closed form)."""
    a, b = min(a, b), max(a, b)
    Qs = residue_size
    return sum((b - a + 2 * i + 1) * Qs ** (a - i) for i in range(a + 1))
