"""Hermitian spaces over E/E0.

Convention: J(v, w) = sigma(v)^T G w, conjugate-linear in the first argument,
so the adjoint is x* = G^-1 sigma(x)^T G.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from . import matrices as mx
from .lattices import Lattice, hnf, smith_raw
from .local_rings import (LocalFieldSpec, LocalRing, PrecisionError, RingElem,
                          RingSpecError, make_ring)


class Parity(Enum):
    EVEN = "even"
    ODD = "odd"


class FormError(ValueError):
    """Gram matrix is not hermitian or is degenerate."""


@dataclass
class HermitianSpace:
    ring: LocalRing
    gram: mx.Matrix
    label: str = ""

    def __post_init__(self):
        G = self.gram
        n = len(G)
        if any(len(row) != n for row in G):
            raise FormError("gram matrix must be square")
        if not mx.equal(mx.conj_transpose(G), G):
            raise FormError("gram matrix is not hermitian")
        if mx.det(G).is_zero():
            raise FormError("gram matrix is degenerate")

    @property
    def n(self) -> int:
        return len(self.gram)

    def form(self, v: Sequence[RingElem], w: Sequence[RingElem]) -> RingElem:
        Gw = mx.mat_vec(self.gram, list(w))
        acc = self.ring.zero()
        for a, b in zip(v, Gw):
            acc = acc + a.sigma() * b
        return acc

    def pairing_matrix(self, A: mx.Matrix, B: mx.Matrix | None = None) -> mx.Matrix:
        """Matrix of J(a_i, b_j) for the columns of A and B."""
        B = A if B is None else B
        return mx.mul(mx.mul(mx.conj_transpose(A), self.gram), B)

    def to_json(self) -> dict:
        return {"ring_spec": self.ring.spec.to_json(self.ring.N), "gram": mx.to_json(self.gram),
                "label": self.label}

    @classmethod
    def from_json(cls, data: dict, precision: int | None = None) -> "HermitianSpace":
        try:
            spec = LocalFieldSpec.from_json(data["ring_spec"])
            N = precision or int(data["ring_spec"].get("precision", 20))
            R = make_ring(spec, N)
            gram = mx.from_json(R, data["gram"])
            stored = int(data["ring_spec"].get("precision", N))
        except (KeyError, TypeError, AttributeError) as exc:
            raise RingSpecError(f"malformed space: {exc}") from exc
        if N > stored and len(gram) and all(len(r) == len(gram) for r in gram):
            gram = hermitian_lift(gram)
        return cls(R, gram, data.get("label", ""))

    def at_precision(self, N: int) -> "HermitianSpace":
        return HermitianSpace.from_json(self.to_json(), N)


def hermitian_lift(G: mx.Matrix) -> mx.Matrix:
    """Rebuild the lower triangle and the diagonal from the upper triangle.

    Digits past the stored precision are arbitrary, and sigma does not act
    by small integers once f0 > 1, so an entrywise lift is rarely hermitian."""
    n = len(G)
    R = G[0][0].ring
    half = R.from_int(2).inverse()
    out = [row[:] for row in G]
    for i in range(n):
        out[i][i] = (G[i][i] + G[i][i].sigma()) * half
        for j in range(i + 1, n):
            out[j][i] = G[i][j].sigma()
    return out


def diagonal_space(R: LocalRing, exponents: Sequence[int], label: str = "") -> HermitianSpace:
    return HermitianSpace(R, mx.diag(R, [R.pi_power(k) for k in exponents]), label)


def dual_basis(basis: mx.Matrix, space: HermitianSpace) -> mx.Matrix:
    """D with J(D_i, B_j) = delta_ij, i.e. D = (B^dagger G)^-1 ... transposed
    appropriately: sigma(D)^T G B = I."""
    # sigma(D)^T = (G B)^-1  =>  D = sigma((G B)^-1)^T
    return mx.conj_transpose(mx.inverse(mx.mul(space.gram, basis)))


def dual_lattice(lat: Lattice, space: HermitianSpace) -> Lattice:
    """{v : J(v, lat) <= O_E}."""
    return hnf(dual_basis(lat.basis, space))


def elementary_exponents(A: mx.Matrix) -> list:
    """Elementary divisor exponents of a nonsingular matrix over E."""
    R = A[0][0].ring
    n = len(A)
    shift = -mx.min_valuation(A)
    scale = R.pi_power(shift)
    rows = [[(a * scale).c for a in row] for row in A]
    s, _ = smith_raw(R, rows, n, len(A[0]))
    if max(s) >= R.N:
        raise PrecisionError("pairing matrix is singular at working precision")
    return [x - shift for x in s]


def dual_index(lat: Lattice, space: HermitianSpace) -> int:
    """[lat^dual : lat] as a signed O_E-length."""
    return sum(elementary_exponents(space.pairing_matrix(lat.basis)))


def parity(space: HermitianSpace, lat: Lattice | None = None) -> Parity:
    """Even iff [L^dual : L] is even (independent of the lattice L)."""
    B = mx.identity(space.ring, space.n) if lat is None else lat.basis
    idx = sum(elementary_exponents(space.pairing_matrix(B)))
    return Parity.EVEN if idx % 2 == 0 else Parity.ODD


def adjoint(x: mx.Matrix, space: HermitianSpace) -> mx.Matrix:
    """x* with J(xv, w) = J(v, x* w)."""
    G = space.gram
    return mx.mul(mx.solve(G, mx.transpose(mx.sigma(x))), G)


def is_self_adjoint(x: mx.Matrix, space: HermitianSpace) -> bool:
    return mx.equal(adjoint(x, space), x)


# -- factor spaces ---------------------------------------------------------

def image_basis(e: mx.Matrix) -> mx.Matrix:
    """Basis (as columns) of e(O^n) for an integral idempotent e."""
    R = e[0][0].ring
    n = len(e)
    rows = [[a.c for a in row] for row in e]
    s, U = smith_raw(R, rows, n, n)
    keep = [i for i in range(n) if s[i] == 0]
    if any(0 < s[i] < R.N for i in range(n)):
        raise FormError("idempotent is not integral at working precision")
    return [[RingElem(R, 0, U[r][i]) for i in keep] for r in range(n)]


def restrict(space: HermitianSpace, basis: mx.Matrix, label: str = "") -> HermitianSpace:
    return HermitianSpace(space.ring, space.pairing_matrix(basis), label)


def check_idempotents(space: HermitianSpace, idempotents: Sequence[mx.Matrix]) -> None:
    R, n = space.ring, space.n
    total = mx.zeros(R, n)
    for i, e in enumerate(idempotents):
        if not mx.equal(mx.mul(e, e), e):
            raise FormError(f"factor {i} is not idempotent")
        if not mx.equal(adjoint(e, space), e):
            raise FormError(f"factor {i} is not self-adjoint")
        for j, f in enumerate(idempotents):
            if i != j and not all(a.is_zero() for row in mx.mul(e, f) for a in row):
                raise FormError(f"factors {i} and {j} are not orthogonal")
        total = mx.add(total, e)
    if not mx.equal(total, mx.identity(R, n)):
        raise FormError("idempotents do not sum to the identity")


def classify_factors(space: HermitianSpace, idempotents: Sequence[mx.Matrix]) -> list:
    """[(factor space, parity)] for an orthogonal self-adjoint splitting."""
    check_idempotents(space, idempotents)
    out = []
    for i, e in enumerate(idempotents):
        sub = restrict(space, image_basis(e), f"{space.label}[{i}]")
        out.append((sub, parity(sub)))
    return out


# -- trace lifting along O_A / O_E ------------------------------------------

class FieldExtension:
    """O_A as a free O_E-module, A = A0 (x) E with A0/E0 of degree f_u * e_A.

    The base E must have unramified E0.  The O_E-basis is beta^a t^i with
    beta generating the unramified part of A0 and t the Eisenstein root."""

    def __init__(self, base: LocalRing, a_spec: LocalFieldSpec):
        bspec = base.spec
        if bspec.e != 1 or not bspec.quadratic:
            raise RingSpecError("base must be O_E with unramified E0")
        if not a_spec.quadratic or a_spec.p != bspec.p or a_spec.f0 % bspec.f0:
            raise RingSpecError("A must be a quadratic ring over an extension of E0")
        self.f_u = a_spec.f0 // bspec.f0
        if self.f_u % 2 == 0:
            raise RingSpecError("A0 (x) E is not a field: the inertia degree of A0/E0 is even")
        self.base = base
        self.e_A = a_spec.e
        self.A = make_ring(a_spec, self.e_A * base.N)
        self.degree = self.f_u * self.e_A
        A, p = self.A, base.p
        w = A.base_embedding(base.d)
        beta = A.base_embedding(a_spec.f0)
        t = A.pi() if self.e_A > 1 else A.one()
        self._w = w
        self.basis = []
        for i in range(self.e_A):
            for a in range(self.f_u):
                self.basis.append(beta ** a * t ** i)
        # Z_p-coordinates: products w^c * basis_k span O_A over Z_p
        vecs = []
        for b in self.basis:
            wc = A.one()
            for _ in range(base.d):
                vecs.append(list((wc * b).c))
                wc = wc * w
        self._solver = _IntSolver(vecs, p, A.P)
        self.trace_matrix = [[self.trace(bi * bj) for bj in self.basis] for bi in self.basis]

    def embed(self, x: RingElem) -> RingElem:
        A = self.A
        acc = A.zero()
        wc = A.one()
        for c in x.c:
            acc = acc + wc * c
            wc = wc * self._w
        # E is unramified, so pi_E = p
        return acc * A.from_int(self.base.p) ** (-x.k) if x.k else acc

    def to_coords(self, a: RingElem) -> list:
        B, A = self.base, self.A
        m = -(-a.k // self.e_A) if a.k else 0
        c = a * A.from_int(B.p) ** m
        if c.k:
            raise PrecisionError("coordinate scaling failed")
        z = self._solver.solve(list(c.c))
        out = []
        for k in range(self.degree):
            blk = z[k * B.d:(k + 1) * B.d]
            out.append(B.elem(blk) * B.pi_power(-m))
        return out

    def from_coords(self, coords: Sequence[RingElem]) -> RingElem:
        acc = self.A.zero()
        for c, b in zip(coords, self.basis):
            acc = acc + self.embed(c) * b
        return acc

    def mult_matrix(self, a: RingElem) -> mx.Matrix:
        cols = [self.to_coords(a * b) for b in self.basis]
        return mx.from_columns(cols)

    def trace(self, a: RingElem) -> RingElem:
        M = self.mult_matrix(a)
        acc = self.base.zero()
        for i in range(self.degree):
            acc = acc + M[i][i]
        return acc

    def inverse_different(self) -> RingElem:
        """1/g'(t) for the Eisenstein polynomial g of A0 (1 when unramified)."""
        A = self.A
        if self.e_A == 1:
            return A.one()
        g = A.spec.eis_coeffs
        t = A.pi()
        deriv = A.zero()
        for i in range(1, len(g)):
            deriv = deriv + t ** (i - 1) * (i * g[i])
        return deriv.inverse()

    def vector_to_A(self, v: Sequence[RingElem]) -> list:
        d = self.degree
        return [self.from_coords(v[i * d:(i + 1) * d]) for i in range(len(v) // d)]

    def vector_from_A(self, v: Sequence[RingElem]) -> list:
        out = []
        for a in v:
            out.extend(self.to_coords(a))
        return out


class _IntSolver:
    """Solve sum z_k vecs_k = target over Z/P (vecs invertible mod p)."""

    def __init__(self, vecs: list, p: int, P: int):
        n = len(vecs)
        self.P = P
        M = [[vecs[k][i] % P for k in range(n)] for i in range(n)]
        inv = [[int(i == j) for j in range(n)] for i in range(n)]
        for c in range(n):
            piv = next((r for r in range(c, n) if M[r][c] % p), None)
            if piv is None:
                raise RingSpecError("extension basis is not a basis")
            M[c], M[piv] = M[piv], M[c]
            inv[c], inv[piv] = inv[piv], inv[c]
            s = pow(M[c][c], -1, P)
            M[c] = [x * s % P for x in M[c]]
            inv[c] = [x * s % P for x in inv[c]]
            for r in range(n):
                if r != c and M[r][c]:
                    f = M[r][c]
                    M[r] = [(x - f * y) % P for x, y in zip(M[r], M[c])]
                    inv[r] = [(x - f * y) % P for x, y in zip(inv[r], inv[c])]
        self.inv = inv

    def solve(self, target: list) -> list:
        P = self.P
        return [sum(a * b for a, b in zip(row, target)) % P for row in self.inv]


def lift_form(space: HermitianSpace, ext: FieldExtension, theta: RingElem | None = None) -> mx.Matrix:
    """The A/A0-hermitian Gram matrix G^A with tr_{A/E}(theta * J^A) = J.

    ``space`` has dimension degree * n' with coordinates grouped by A-factor."""
    theta = ext.inverse_different() if theta is None else theta
    d = ext.degree
    n = space.n
    if n % d:
        raise FormError("dimension is not divisible by the extension degree")
    n_A = n // d
    B = ext.base
    T = ext.trace_matrix
    Tinv = mx.inverse(T)
    GA = []
    for a in range(n_A):
        row = []
        for b in range(n_A):
            ea = [B.zero()] * n
            ea[a * d] = B.one()
            c = []
            for k in range(d):
                v = [B.zero()] * n
                for i, x in enumerate(ext.to_coords(ext.basis[k])):
                    v[b * d + i] = x
                c.append(space.form(ea, v))
            y = mx.mat_vec(Tinv, c)
            row.append(ext.from_coords(y) / theta)
        GA.append(row)
    check = descend_form(GA, ext, theta)
    # T^-1 costs up to v(det T) digits
    if not mx.close(check, space.gram, mx.det(T).valuation()):
        raise FormError("the A-action is not compatible with the form")
    return GA


def descend_form(gram_A: mx.Matrix, ext: FieldExtension, theta: RingElem | None = None) -> mx.Matrix:
    """The E-valued Gram matrix of tr_{A/E}(theta * J^A) in the O_E-basis."""
    theta = ext.inverse_different() if theta is None else theta
    d = ext.degree
    n_A = len(gram_A)
    B = ext.base
    n = d * n_A
    G = mx.zeros(B, n)
    for a in range(n_A):
        for b in range(n_A):
            g = gram_A[a][b]
            for k, bk in enumerate(ext.basis):
                for l, bl in enumerate(ext.basis):
                    G[a * d + k][b * d + l] = ext.trace(theta * bk.sigma() * bl * g)
    return G
