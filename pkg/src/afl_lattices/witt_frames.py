"""Truncated relative Witt vectors, Lubin-Tate frames and windows.

All computations are exact algebra in W_m(R) with R = O'/pi'^k, where O is
unramified over Z_p (uniformizer p, residue field F_q) and O' = O[t]/(g) for
an Eisenstein polynomial g.  Ring operations evaluate the ghost recursion on
canonical lifts to a higher-precision copy of O' (the torsion-free cover);
every division by a power of the uniformizer is checked to be exact.  This is
the same as evaluating the integral structure polynomials at the lifts, which
``structure_polys`` computes symbolically for small (q, m) as a cross-check.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import sympy

from .local_rings import LocalFieldSpec, Raw, make_ring
from .reductions import CheckReport, digest

MAX_LENGTH = 6             # longest Witt vector the cover precision supports
SYMBOLIC_DEGREE_CAP = 27   # structure_polys refuses q^(m-1) beyond this
MAX_RING_SIZE = 10 ** 6


class WittError(ArithmeticError):
    """Base class for Witt-vector failures."""


class IntegralityError(WittError):
    """A ghost-recursion division was not exact (implementation bug)."""


class NotInImageOfV(WittError):
    """V^{-1} applied to a vector whose first coordinate is nonzero."""


class FrameError(WittError):
    """A frame or display identity failed verification."""


# -- structure polynomials -------------------------------------------------

def _ghost_poly(xs, n, pi, q):
    out = xs[0] ** (q ** n)
    for i in range(1, n + 1):
        out = out + xs[i] ** (q ** (n - i)) * (pi ** i)
    return out


@lru_cache(maxsize=None)
def structure_polys(pi: int, q: int, m: int) -> dict:
    """Sum and product polynomials of W_O for O with uniformizer ``pi``
    (an integer, so O is unramified) and residue size q, for m coordinates.

    Returned as {"sum": (S_0..S_{m-1}), "prod": (P_0..P_{m-1})} of sympy Polys
    in x0..x{m-1}, y0..y{m-1} with integer coefficients.
    """
    if m < 1:
        raise ValueError("m must be positive")
    if q ** (m - 1) > SYMBOLIC_DEGREE_CAP:
        raise ValueError(f"q^(m-1) = {q ** (m - 1)} exceeds the symbolic cap {SYMBOLIC_DEGREE_CAP}")
    xs = sympy.symbols(f"x0:{m}")
    ys = sympy.symbols(f"y0:{m}")
    gens = xs + ys
    X = [sympy.Poly(v, *gens, domain=sympy.ZZ) for v in xs]
    Y = [sympy.Poly(v, *gens, domain=sympy.ZZ) for v in ys]
    out = {}
    for name, comb in (("sum", lambda a, b: a + b), ("prod", lambda a, b: a * b)):
        polys: list = []
        for n in range(m):
            w = comb(_ghost_poly(X, n, pi, q), _ghost_poly(Y, n, pi, q))
            for i, s in enumerate(polys):
                w = w - s ** (q ** (n - i)) * (pi ** i)
            d = pi ** n
            if any(int(c) % d for c in w.coeffs()):
                raise IntegralityError(f"{name} polynomial {n} is not integral")
            polys.append(w.exquo_ground(d))
        out[name] = tuple(polys)
    return out


def eval_poly(poly, values: Sequence[Raw], ring) -> Raw:
    """Evaluate an integer polynomial at raw ring values."""
    acc = ring.zero_raw
    for monom, coeff in poly.terms():
        term = ring.rscale(ring.one_raw, int(coeff))
        for v, k in zip(values, monom):
            if k:
                term = ring.rmul(term, ring.rpow(v, k))
        acc = ring.radd(acc, term)
    return acc


# -- coefficient rings -----------------------------------------------------

class CoefficientRing:
    """R = O'/pi'^k, carried together with a cover O'/pi'^N, N >> k."""

    def __init__(self, spec: LocalFieldSpec, k: int, max_length: int = MAX_LENGTH):
        if spec.quadratic:
            raise ValueError("coefficient rings use the non-quadratic spec of O'")
        spec.validate()
        if k < 1:
            raise ValueError("k must be positive")
        if spec.q ** k > MAX_RING_SIZE:
            raise ValueError(f"|R| = {spec.q ** k} exceeds {MAX_RING_SIZE}")
        self.spec, self.k, self.e, self.q, self.p = spec, k, spec.e, spec.q, spec.p
        self.max_length = max_length
        self.N = k + spec.e * (max_length + 2) + 2
        self.cover = make_ring(spec, self.N)
        self.one = self.red(self.cover.one_raw)
        self.zero = self.cover.zero_raw
        self.pi_prime = self.red(self.cover.pi_raw)

    def __repr__(self) -> str:
        return f"CoefficientRing({self.spec.to_json()}, k={self.k})"

    def red(self, a: Raw) -> Raw:
        return self.cover.reduce_mod(a, self.k)

    def from_int(self, n: int) -> Raw:
        return self.red(self.cover.rscale(self.cover.one_raw, n))

    def mul(self, a: Raw, b: Raw) -> Raw:
        return self.red(self.cover.rmul(a, b))

    def add(self, a: Raw, b: Raw) -> Raw:
        return self.red(self.cover.radd(a, b))

    def is_unit(self, a: Raw) -> bool:
        return self.cover.rval(a) == 0

    def inv(self, a: Raw) -> Raw:
        return self.red(self.cover.rinv_unit(a))

    def random(self, rng: random.Random) -> Raw:
        c = self.cover
        return self.red(c.canon(rng.randrange(c.P) for _ in range(c.size)))


# -- Witt vectors ----------------------------------------------------------

class WittRing:
    """W_B(R) truncated at length m, for B = O ("O") or B = O' ("O'").

    Vectors are stored by the ghost components of a lift to the cover,
    known modulo pi'^prec; coordinates are solved for on demand."""

    def __init__(self, R: CoefficientRing, over: str = "O", m: int = 4):
        if not 1 <= m <= R.max_length:
            raise ValueError(f"length {m} outside 1..{R.max_length}")
        c = R.cover
        self.R, self.m, self.over, self.q = R, m, over, R.q
        if over == "O":
            self.pi, self.vpi = c.rscale(c.one_raw, R.p), R.e
        elif over == "O'":
            self.pi, self.vpi = c.pi_raw, 1
        else:
            raise ValueError("over must be 'O' or \"O'\"")
        self._pi_unit_inv = c.rinv_unit(c.rshift_down(self.pi, self.vpi))

    def __repr__(self) -> str:
        return f"WittRing(over={self.over}, m={self.m}, {self.R!r})"

    def ghost_cover(self, coords: Sequence[Raw]) -> list:
        """Ghost components w_n = sum_i pi^i x_i^(q^(n-i)) of a lift."""
        c, q = self.R.cover, self.q
        n_ = len(coords)
        pows = [list(coords)]  # pows[j][i] = x_i^(q^j)
        for j in range(1, n_):
            pows.append([c.rpow(x, q) for x in pows[-1][:n_ - j]])
        out = []
        for n in range(n_):
            acc = c.zero_raw
            pi_i = c.one_raw
            for i in range(n + 1):
                acc = c.radd(acc, c.rmul(pi_i, pows[n - i][i]))
                pi_i = c.rmul(pi_i, self.pi)
            out.append(acc)
        return out

    def div_pi(self, a: Raw, n: int = 1) -> Raw:
        """Exact division by pi^n on the cover."""
        c = self.R.cover
        need = n * self.vpi
        v = c.rval(a)
        if v is None:
            return c.zero_raw
        if v < need:
            raise IntegralityError(f"division by pi^{n}: valuation {v} < {need}")
        return c.rmul(c.rshift_down(a, need), c.rpow(self._pi_unit_inv, n))

    def solve(self, ghosts: Sequence[Raw], prec: int | None = None) -> tuple:
        """Coordinates in R of the vector with the given ghost components."""
        c, q = self.R.cover, self.q
        prec = self.R.N if prec is None else prec
        if prec - (len(ghosts) - 1) * self.vpi < self.R.k:
            raise WittError("ghost precision exhausted")
        s: list = []
        for n, g in enumerate(ghosts):
            num = g
            pi_i = c.one_raw
            for i, si in enumerate(s):
                num = c.rsub(num, c.rmul(pi_i, c.rpow(si, q ** (n - i))))
                pi_i = c.rmul(pi_i, self.pi)
            # only digits below prec are meaningful
            s.append(self.div_pi(c.reduce_mod(num, prec), n) if n else num)
        return tuple(self.R.red(x) for x in s)

    # constructors
    def vec(self, coords: Sequence[Raw]) -> "WittVector":
        coords = tuple(self.R.red(x) for x in coords)
        return WittVector(self, tuple(self.ghost_cover(coords)), self.R.N, coords)

    def from_ghosts(self, ghosts: Sequence[Raw], prec: int | None = None) -> "WittVector":
        return WittVector(self, tuple(ghosts), self.R.N if prec is None else prec)

    def zero(self, length: int | None = None) -> "WittVector":
        return self.vec((self.R.zero,) * (length or self.m))

    def one(self, length: int | None = None) -> "WittVector":
        return self.teichmuller(self.R.one, length)

    def teichmuller(self, a: Raw, length: int | None = None) -> "WittVector":
        return self.vec((self.R.red(a),) + (self.R.zero,) * ((length or self.m) - 1))

    def scalar(self, a: Raw, length: int | None = None) -> "WittVector":
        """Image of a in W_B(R) under the structure map (a must lie in B)."""
        return self.from_ghosts([a] * (length or self.m))

    def from_int(self, n: int, length: int | None = None) -> "WittVector":
        return self.scalar(self.R.cover.rscale(self.R.cover.one_raw, n), length)

    def random(self, rng: random.Random, length: int | None = None) -> "WittVector":
        return self.vec([self.R.random(rng) for _ in range(length or self.m)])

    def random_ideal(self, rng: random.Random) -> "WittVector":
        return self.random(rng, self.m - 1).V()


class WittVector:
    __slots__ = ("W", "ghosts", "prec", "_coords")
    __hash__ = None  # type: ignore[assignment]

    def __init__(self, W: WittRing, ghosts: tuple, prec: int, coords: tuple | None = None):
        self.W, self.ghosts, self.prec, self._coords = W, ghosts, prec, coords

    @property
    def coords(self) -> tuple:
        if self._coords is None:
            self._coords = self.W.solve(self.ghosts, self.prec)
        return self._coords

    @property
    def length(self) -> int:
        return len(self.ghosts)

    def __repr__(self) -> str:
        return f"WittVector({self.coords})"

    def truncate(self, m: int) -> "WittVector":
        return WittVector(self.W, self.ghosts[:m], self.prec,
                          None if self._coords is None else self._coords[:m])

    def _coerce(self, other) -> "WittVector":
        if isinstance(other, int):
            return self.W.from_int(other, self.length)
        if not isinstance(other, WittVector) or other.W is not self.W:
            raise TypeError("Witt vectors over different rings")
        return other

    def _combine(self, other, op: Callable) -> "WittVector":
        other = self._coerce(other)
        return WittVector(self.W, tuple(op(a, b) for a, b in zip(self.ghosts, other.ghosts)),
                          min(self.prec, other.prec))

    def __add__(self, other):
        return self._combine(other, self.W.R.cover.radd)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, self.W.R.cover.rsub)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        return self._combine(other, self.W.R.cover.rmul)

    __rmul__ = __mul__

    def __neg__(self):
        c = self.W.R.cover
        return WittVector(self.W, tuple(c.rneg(g) for g in self.ghosts), self.prec)

    def __eq__(self, other) -> bool:
        if not isinstance(other, WittVector):
            return NotImplemented
        L = min(self.length, other.length)
        return self.W is other.W and self.coords[:L] == other.coords[:L]

    def ghost(self) -> list:
        return [self.W.R.red(g) for g in self.ghosts]

    def F(self) -> "WittVector":
        return WittVector(self.W, self.ghosts[1:], self.prec)

    sigma = F

    def V(self) -> "WittVector":
        W = self.W
        c = W.R.cover
        g = (c.zero_raw,) + tuple(c.rmul(W.pi, x) for x in self.ghosts)
        coords = None if self._coords is None else (W.R.zero,) + self._coords
        L = W.R.max_length
        return WittVector(W, g[:L], self.prec, None if coords is None else coords[:L])

    def Vinv(self) -> "WittVector":
        if any(self.coords[0]):
            raise NotInImageOfV("first coordinate is nonzero")
        W = self.W
        c = W.R.cover
        g0 = self.ghosts[0]
        # lift with x_0 = 0 exactly: w_n - x_0^(q^n) = pi * w_{n-1}(x_1, x_2, ...)
        out = []
        cur = g0
        for g in self.ghosts[1:]:
            cur = c.rpow(cur, W.q)
            out.append(W.div_pi(c.reduce_mod(c.rsub(g, cur), self.prec)))
        res = WittVector(W, tuple(out), self.prec - W.vpi, self._coords[1:])
        if res.prec < W.R.k + W.R.max_length * W.vpi:
            res = W.vec(res.coords)
        return res

    def in_ideal(self) -> bool:
        return not any(self.coords[0])

    def is_unit(self) -> bool:
        return self.W.R.is_unit(self.coords[0])

    def inverse(self) -> "WittVector":
        if not self.is_unit():
            raise ZeroDivisionError("not a unit")
        # ghost components of a unit lift are units; invert them directly
        c = self.W.R.cover
        lifted = self.W.vec(self.coords)
        return WittVector(self.W, tuple(c.rinv_unit(g) for g in lifted.ghosts), self.W.R.N)

    def to_json(self) -> list:
        return [list(c) for c in self.coords]


def teichmuller(W: WittRing, a: Raw) -> WittVector:
    return W.teichmuller(a)


def frobenius(w: WittVector) -> WittVector:
    return w.F()


def verschiebung(w: WittVector) -> WittVector:
    return w.V()


# -- O' (x)_O W_O(R) -------------------------------------------------------

class TensorRing:
    """O' (x)_O W_O(R), free over W_O(R) on 1, pi', ..., pi'^(e-1)."""

    def __init__(self, R: CoefficientRing, m: int = 4):
        self.R, self.m, self.e = R, m, R.e
        self.W = WittRing(R, "O", m)
        self.eis = R.spec.eis_coeffs
        self._iota = {}

    def __repr__(self) -> str:
        return f"TensorRing(e={self.e}, m={self.m}, {self.R!r})"

    def iota(self, n: int, length: int) -> WittVector:
        key = (n, length)
        if key not in self._iota:
            self._iota[key] = self.W.from_int(n, length)
        return self._iota[key]

    def reduce(self, comps: list) -> "TensorElem":
        """Fold components of pi'^k, k >= e, back using the Eisenstein relation."""
        e = self.e
        comps = list(comps)
        L = min(c.length for c in comps)
        for k in range(len(comps) - 1, e - 1, -1):
            top = comps[k]
            if not any(any(g) for g in top.ghosts):
                continue
            # pi'^e = -sum_{i<e} a_i pi'^i
            for i in range(e):
                a = self.eis[i]
                if a:
                    comps[k - e + i] = comps[k - e + i] - top * self.iota(a, L)
        return TensorElem(self, tuple(comps[:e]))

    def elem(self, comps: Sequence[WittVector]) -> "TensorElem":
        comps = list(comps)
        if len(comps) < self.e:
            comps += [self.W.zero(comps[0].length)] * (self.e - len(comps))
        return self.reduce(comps)

    def from_witt(self, w: WittVector) -> "TensorElem":
        return self.elem([w])

    def one(self) -> "TensorElem":
        return self.from_witt(self.W.one())

    def zero(self) -> "TensorElem":
        return self.from_witt(self.W.zero())

    def pi_prime(self) -> "TensorElem":
        """pi' (x) 1."""
        return self.elem([self.W.zero(), self.W.one()])

    def pi_prime_power(self, i: int) -> "TensorElem":
        comps = [self.W.zero()] * i + [self.W.one()]
        return self.elem(comps)

    def teich(self, a: Raw) -> "TensorElem":
        """1 (x) [a]."""
        return self.from_witt(self.W.teichmuller(a))

    def delta(self) -> "TensorElem":
        """pi' (x) 1 - 1 (x) [pi']."""
        return self.pi_prime() - self.teich(self.R.pi_prime)

    def V1(self) -> "TensorElem":
        return self.from_witt(self.W.one().V())

    def random(self, rng: random.Random) -> "TensorElem":
        return TensorElem(self, tuple(self.W.random(rng) for _ in range(self.e)))

    def random_witt_ideal(self, rng: random.Random) -> "TensorElem":
        """A random element of O' (x) I_O(R)."""
        return TensorElem(self, tuple(self.W.random_ideal(rng) for _ in range(self.e)))

    def random_ideal(self, rng: random.Random) -> "TensorElem":
        """A random element of J = ker(O' (x) W_O(R) -> R)."""
        return self.delta() * self.random(rng) + self.random_witt_ideal(rng)


@dataclass(frozen=True, eq=False)
class TensorElem:
    T: TensorRing
    comps: tuple

    @property
    def length(self) -> int:
        return min(c.length for c in self.comps)

    def _coerce(self, other) -> "TensorElem":
        if isinstance(other, int):
            return self.T.from_witt(self.T.W.from_int(other, self.length))
        if isinstance(other, WittVector):
            return self.T.from_witt(other)
        if not isinstance(other, TensorElem) or other.T is not self.T:
            raise TypeError("tensor elements over different rings")
        return other

    def __add__(self, other):
        other = self._coerce(other)
        return TensorElem(self.T, tuple(a + b for a, b in zip(self.comps, other.comps)))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return TensorElem(self.T, tuple(a - b for a, b in zip(self.comps, other.comps)))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return TensorElem(self.T, tuple(-a for a in self.comps))

    def __mul__(self, other):
        other = self._coerce(other)
        e = self.T.e
        acc: list = [None] * (2 * e - 1)
        for i, a in enumerate(self.comps):
            for j, b in enumerate(other.comps):
                ab = a * b
                acc[i + j] = ab if acc[i + j] is None else acc[i + j] + ab
        return self.T.reduce(acc)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, TensorElem):
            return NotImplemented
        return all(a == b for a, b in zip(self.comps, other.comps))

    __hash__ = None  # type: ignore[assignment]

    def sigma(self) -> "TensorElem":
        return TensorElem(self.T, tuple(a.F() for a in self.comps))

    def V(self) -> "TensorElem":
        return TensorElem(self.T, tuple(a.V() for a in self.comps))

    def Vinv(self) -> "TensorElem":
        return TensorElem(self.T, tuple(a.Vinv() for a in self.comps))

    def in_witt_ideal(self) -> bool:
        return all(a.in_ideal() for a in self.comps)

    def w0(self) -> list:
        """Image in O' (x)_O R, as coefficients of 1, pi', ..."""
        return [a.coords[0] for a in self.comps]

    def residue(self) -> Raw:
        """Image in (O'/pi') (x) (R/pi')."""
        return self.T.R.cover.residue(self.comps[0].coords[0])

    def is_unit(self) -> bool:
        return any(self.residue())

    def inverse(self) -> "TensorElem":
        if not self.is_unit():
            raise ZeroDivisionError("not a unit")
        T = self.T
        y = T.from_witt(T.W.teichmuller(T.R.inv(self.comps[0].coords[0]), self.length))
        for _ in range(64):
            uy = self * y
            if uy == T.one():
                return y
            y = y * (2 - uy)
        raise WittError("tensor inverse did not converge")

    def image_mod_pi_prime(self) -> Raw:
        """Image in O' (x) W_O(O'/pi') = O'/pi^m, a raw value of the cover.

        W_O(F_q) = O sends (x_0, x_1, ...) to sum_j pi^j [x_j]."""
        c = self.T.R.cover
        W = self.T.W
        out = c.zero_raw
        pp = c.one_raw
        for a in self.comps:
            val = c.zero_raw
            pj = c.one_raw
            for x in a.coords:
                val = c.radd(val, c.rmul(pj, c.rteichmuller(x)))
                pj = c.rmul(pj, W.pi)
            out = c.radd(out, c.rmul(pp, val))
            pp = c.rmul(pp, c.pi_raw)
        return c.reduce_mod(out, self.T.e * self.length)

    def to_json(self) -> list:
        return [a.to_json() for a in self.comps]


# -- Lubin-Tate theta and kappa --------------------------------------------

def theta_bar(R: CoefficientRing) -> list:
    """Coefficients r_i in R of theta_bar = sum_i pi'^i (x) r_i, the
    geometric-series quotient attached to the Eisenstein polynomial."""
    e = R.e
    a = R.spec.eis_coeffs
    sign = 1 if (e + 1) % 2 == 0 else -1
    c = R.cover
    out = []
    for i in range(e):
        acc = c.rpow(c.pi_raw, e - 1 - i)
        for k in range(i + 1, e):
            if a[k]:
                acc = c.radd(acc, c.rscale(c.rpow(c.pi_raw, k - 1 - i), a[k]))
        out.append(R.red(c.rscale(acc, sign)))
    return out


def lubin_tate_theta(T: TensorRing) -> TensorElem:
    """Teichmueller lift of theta_bar; both defining properties are verified."""
    theta = T.elem([T.W.teichmuller(r) for r in theta_bar(T.R)])
    prod = theta * T.delta()
    if not prod.in_witt_ideal():
        raise FrameError("theta * delta is not in O' (x) I_O")
    v = theta_image_valuation(theta)
    if v != T.e - 1:
        raise FrameError(f"theta image has valuation {v}, expected {T.e - 1}")
    return theta


def theta_image_valuation(theta: TensorElem) -> int | None:
    img = theta.image_mod_pi_prime()
    return theta.T.R.cover.rval(img)


@dataclass
class KappaCertificate:
    residue_unit: bool
    inverse_verified: bool
    image_valuation: int | None

    @property
    def ok(self) -> bool:
        return self.residue_unit and self.inverse_verified and self.image_valuation == 0


def lubin_tate_kappa(T: TensorRing, theta: TensorElem | None = None) -> tuple:
    """kappa = V^{-1}(theta * delta) with a unit certificate."""
    theta = lubin_tate_theta(T) if theta is None else theta
    kappa = (theta * T.delta()).Vinv()
    res = kappa.is_unit()
    inv_ok = False
    if res:
        inv_ok = kappa * kappa.inverse() == T.one()
    cert = KappaCertificate(res, inv_ok, T.R.cover.rval(kappa.image_mod_pi_prime()))
    return kappa, cert


# -- frames ----------------------------------------------------------------

class WittFrame:
    """(W_O(R), I_O(R), R, F, V^{-1})."""

    kind = "witt"

    def __init__(self, W: WittRing):
        self.W = W
        self.s = W.scalar(W.pi)

    def one(self):
        return self.W.one()

    def zero(self):
        return self.W.zero()

    def sigma(self, x):
        return x.F()

    def sigma_dot(self, x):
        return x.Vinv()

    def random(self, rng):
        return self.W.random(rng)

    def random_unit(self, rng):
        while True:
            x = self.W.random(rng)
            if x.is_unit():
                return x

    def random_ideal(self, rng):
        return self.W.random_ideal(rng)

    def witt_ideal_elements(self, rng, count: int = 3) -> list:
        return [self.W.one().V()] + [self.W.random_ideal(rng) for _ in range(count)]

    def extra_generators(self) -> list:
        return []

    def V1(self):
        return self.W.one().V()

    def in_ideal(self, x) -> bool:
        return x.in_ideal()


class LTFrame:
    """Lubin-Tate frame on O' (x) W_O(R) determined by the unit kappa."""

    kind = "lubin-tate"

    def __init__(self, T: TensorRing, kappa: TensorElem | None = None):
        self.T = T
        self.theta = lubin_tate_theta(T)
        self.kappa0, self.certificate = lubin_tate_kappa(T, self.theta)
        if not self.certificate.ok:
            raise FrameError(f"kappa is not a certified unit: {self.certificate}")
        self.kappa = self.kappa0 if kappa is None else kappa
        if not self.kappa.is_unit():
            raise FrameError("kappa must be a unit")
        self.scale = self.kappa * self.kappa0.inverse()
        self.delta = T.delta()
        self.s = self.kappa.inverse() * self.delta.sigma()

    def one(self):
        return self.T.one()

    def zero(self):
        return self.T.zero()

    def sigma(self, x):
        return x.sigma()

    def sigma_dot(self, x):
        return self.scale * (self.theta * x).Vinv()

    def random(self, rng):
        return self.T.random(rng)

    def random_unit(self, rng):
        while True:
            x = self.T.random(rng)
            if x.is_unit():
                return x

    def random_ideal(self, rng):
        return self.T.random_ideal(rng)

    def witt_ideal_elements(self, rng, count: int = 3) -> list:
        T = self.T
        out = [T.V1()]
        for i in range(T.e):
            out.append(T.pi_prime_power(i) * T.from_witt(T.W.random_ideal(rng)))
        out += [T.random_witt_ideal(rng) for _ in range(count)]
        return out

    def extra_generators(self) -> list:
        return [self.delta]

    def V1(self):
        return self.T.V1()

    def in_ideal(self, x) -> bool:
        return (self.theta * x).in_witt_ideal()

    def to_json(self) -> dict:
        return {"extension": self.T.R.spec.to_json(), "m": self.T.m, "k": self.T.R.k,
                "theta_coords": self.theta.to_json(), "kappa_coords": self.kappa.to_json()}


class TwistedFrame:
    """The same ring with divided Frobenius u * sigma_dot."""

    def __init__(self, base, u):
        self.base, self.u = base, u
        self.kind = base.kind + "-twisted"
        self.s = u.inverse() * base.s

    def __getattr__(self, name):
        return getattr(self.base, name)

    def sigma_dot(self, x):
        return self.u * self.base.sigma_dot(x)


def _timed_report(identity: str, inputs, t0: float, lhs, rhs, ok: bool, precs: list,
                  diag: str = "") -> CheckReport:
    return CheckReport(identity, lhs, rhs, bool(ok), precs, int((time.perf_counter() - t0) * 1000),
                       digest(inputs), diag)


def _frame_inputs(frame) -> dict:
    if frame.kind.startswith("lubin-tate"):
        R = frame.T.R
        return {"frame": frame.kind, "spec": R.spec.to_json(), "k": R.k, "m": frame.T.m}
    R = frame.W.R
    return {"frame": frame.kind, "spec": R.spec.to_json(), "k": R.k, "m": frame.W.m}


def frame_axiom_check(frame, rng: random.Random, trials: int = 3) -> CheckReport:
    """Divided-Frobenius relation, sigma-linearity and the element s."""
    t0 = time.perf_counter()
    failures = []
    sv1 = frame.sigma_dot(frame.V1())
    witt_part = frame.witt_ideal_elements(rng, trials)
    for n, xi in enumerate(witt_part):
        if frame.sigma_dot(xi) != xi.Vinv() * sv1:
            failures.append(f"relation[{n}]")
    gens = witt_part + frame.extra_generators()
    for n, xi in enumerate(gens):
        y = frame.random(rng)
        if frame.sigma_dot(xi * y) != frame.sigma(y) * frame.sigma_dot(xi):
            failures.append(f"linearity[{n}]")
        if frame.sigma(xi) != frame.s * frame.sigma_dot(xi):
            failures.append(f"s-element[{n}]")
    if frame.kind.startswith("lubin-tate") and frame.sigma_dot(frame.delta) != frame.kappa:
        failures.append("kappa")
    total = len(witt_part) + 2 * len(gens) + (1 if frame.extra_generators() else 0)
    return _timed_report("frame_relation", _frame_inputs(frame), t0, total - len(failures), total,
                         not failures, [], ", ".join(failures))


def witt_frame_as_lubin_tate(R: CoefficientRing, m: int = 4, rng: random.Random | None = None) -> CheckReport:
    """For O' = O the Lubin-Tate frame is the Witt frame with kappa = epsilon,
    epsilon = V^{-1}(pi - [pi]); its ghost components are 1 - pi^(q^n - 1)."""
    t0 = time.perf_counter()
    if R.e != 1:
        raise ValueError("needs the trivial extension")
    rng = rng or random.Random(0)
    T = TensorRing(R, m)
    W = T.W
    eps = (W.scalar(W.pi) - W.teichmuller(R.pi_prime)).Vinv()
    lt = LTFrame(T)
    wf = WittFrame(W)
    failures = []
    if lt.theta != T.one():
        failures.append("theta")
    if lt.kappa.comps[0] != eps:
        failures.append("kappa")
    c = R.cover
    for n, g in enumerate(eps.ghost()):
        want = R.red(c.rsub(c.one_raw, c.rpow(W.pi, R.q ** (n + 1) - 1)))
        if g != want:
            failures.append(f"ghost[{n}]")
    if c.reduce_mod(c.rsub(eps.coords[0], c.one_raw), R.e) != c.zero_raw:
        failures.append("eps mod pi")
    for _ in range(3):
        xi = W.random_ideal(rng)
        if lt.sigma_dot(T.from_witt(xi)).comps[0] != wf.sigma_dot(xi):
            failures.append("sigma_dot")
    return _timed_report("witt_frame_is_lubin_tate", {"spec": R.spec.to_json(), "k": R.k, "m": m}, t0,
                         not failures, True, not failures, [], ", ".join(failures))


# -- Lubin-Tate displays ---------------------------------------------------

@dataclass
class LTDisplay:
    """Rank-one O-display on O' (x) W_O(R) with F_dot(delta) = kappa."""

    frame: LTFrame
    kappa: TensorElem
    F1: TensorElem

    def F(self, x: TensorElem) -> TensorElem:
        return self.F1 * x.sigma()

    def Fdot_delta(self, y: TensorElem) -> TensorElem:
        """F_dot(delta * y)."""
        return y.sigma() * self.kappa

    def Fdot_witt(self, xi: TensorElem) -> TensorElem:
        """F_dot on O' (x) I_O(R)."""
        return xi.Vinv() * self.F1


def lt_display_from_kappa(frame: LTFrame, kappa: TensorElem, rng: random.Random | None = None,
                          trials: int = 3) -> LTDisplay:
    if not kappa.is_unit():
        raise FrameError("kappa must be a unit")
    rng = rng or random.Random(0)
    th = frame.theta
    F1 = frame.kappa0.inverse() * th.sigma() * kappa
    disp = LTDisplay(frame, kappa, F1)
    T = frame.T
    # elements reachable both as delta * y and inside O' (x) I_O must agree
    a = th * frame.delta
    if disp.Fdot_witt(a) != disp.Fdot_delta(th):
        raise FrameError("divided Frobenius disagrees on theta * delta")
    for _ in range(trials):
        r = T.random_witt_ideal(rng)
        if disp.Fdot_witt(frame.delta * r) != disp.Fdot_delta(r):
            raise FrameError("divided Frobenius disagrees on delta * I")
        xi, y = T.random_witt_ideal(rng), T.random(rng)
        if disp.Fdot_witt(xi * y) != y.sigma() * disp.Fdot_witt(xi):
            raise FrameError("divided Frobenius is not sigma-linear")
        if disp.Fdot_witt(xi) != xi.Vinv() * disp.F(T.one()):
            raise FrameError("F_dot(xi) != V^{-1}(xi) F(1)")
    return disp


def convert_frobenius(disp: LTDisplay, frame: LTFrame) -> tuple:
    """F'(x) = kappa^{-1} F_dot(delta x) for the frame's kappa, and back via
    F''(x) = F'(theta x).  Returns (F'(1), F''(1))."""
    kinv = frame.kappa.inverse()
    one = frame.T.one()

    def Fprime(x):
        return kinv * disp.Fdot_delta(x)

    return Fprime(one), Fprime(frame.theta)


def frobenius_round_trip_check(frame: LTFrame, kappa: TensorElem, rng: random.Random,
                               trials: int = 3) -> CheckReport:
    t0 = time.perf_counter()
    T = frame.T
    disp = lt_display_from_kappa(frame, kappa, rng)
    Fp1, Fpp1 = convert_frobenius(disp, frame)
    failures = []
    # the inverse conversion lands back on F once scaled by kappa / kappa0
    if frame.scale * Fpp1 != disp.F1:
        failures.append("round trip")
    for _ in range(trials):
        xi, x = T.random_witt_ideal(rng), T.random(rng)
        if disp.Fdot_witt(xi * x) != frame.sigma_dot(xi) * (Fp1 * x.sigma()):
            failures.append("window relation")
    v = frame.random_unit(rng)
    disp_v = lt_display_from_kappa(frame, kappa * v, rng)
    if disp_v.F1 != disp.F1 * v:
        failures.append("kappa scaling")
    Fp1_v, _ = convert_frobenius(disp_v, frame)
    if Fp1_v != Fp1 * v:
        failures.append("F' scaling")
    return _timed_report("frobenius_round_trip", _frame_inputs(frame), t0, not failures, True,
                         not failures, [], ", ".join(failures))


# -- windows ---------------------------------------------------------------

def _mat_mul(A, B):
    return [[_dot(row, col) for col in zip(*B)] for row in A]


def _dot(a, b):
    out = None
    for x, y in zip(a, b):
        out = x * y if out is None else out + x * y
    return out


def _transpose(A):
    return [list(r) for r in zip(*A)]


def mat_inverse(A, one, zero):
    """Gauss-Jordan over a local ring: pivots must be units."""
    n = len(A)
    M = [list(A[i]) + [one if i == j else zero for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col].is_unit()), None)
        if piv is None:
            raise FrameError("matrix is not invertible")
        M[col], M[piv] = M[piv], M[col]
        inv = M[col][col].inverse()
        M[col] = [inv * x for x in M[col]]
        for r in range(n):
            if r != col:
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return [row[n:] for row in M]


@dataclass
class Window:
    """P = S^r with normal decomposition given by ``lmask`` (True for basis
    vectors of L) and linearization Phi, columns F_dot(l_i) and F(t_j)."""

    frame: object
    Phi: list
    lmask: tuple
    _check: bool = field(default=True, repr=False)

    def __post_init__(self):
        if self._check:
            mat_inverse(self.Phi, self.frame.one(), self.frame.zero())

    @property
    def rank(self) -> int:
        return len(self.lmask)

    def F(self, x: list) -> list:
        fr = self.frame
        y = [fr.s * fr.sigma(c) if l else fr.sigma(c) for c, l in zip(x, self.lmask)]
        return [_dot(row, y) for row in self.Phi]

    def Fdot(self, q: list) -> list:
        fr = self.frame
        y = [fr.sigma(c) if l else fr.sigma_dot(c) for c, l in zip(q, self.lmask)]
        return [_dot(row, y) for row in self.Phi]

    def random_Q(self, rng) -> list:
        fr = self.frame
        return [fr.random(rng) if l else fr.random_ideal(rng) for l in self.lmask]

    def dual(self) -> "Window":
        fr = self.frame
        Psi = mat_inverse(_transpose(self.Phi), fr.one(), fr.zero())
        return Window(fr, Psi, tuple(not l for l in self.lmask), False)

    def base_change_twist(self, target: TwistedFrame) -> "Window":
        """Base change along the identity viewed as a u-morphism: F_dot is
        kept and F is divided by u."""
        uinv = target.u.inverse()
        Phi = [[c if l else c * uinv for c, l in zip(row, self.lmask)] for row in self.Phi]
        return Window(target, Phi, self.lmask, False)

    def axiom_failures(self, rng, trials: int = 2) -> list:
        fr = self.frame
        out = []
        for _ in range(trials):
            xi = fr.random_ideal(rng)
            x = [fr.random(rng) for _ in range(self.rank)]
            lhs = self.Fdot([xi * c for c in x])
            rhs = [fr.sigma_dot(xi) * c for c in self.F(x)]
            if any(a != b for a, b in zip(lhs, rhs)):
                out.append("F_dot(xi x) != sigma_dot(xi) F(x)")
            q = self.random_Q(rng)
            if any(a != fr.s * b for a, b in zip(self.F(q), self.Fdot(q))):
                out.append("F(q) != s F_dot(q)")
        return out


def random_window(frame, rank: int, d: int, rng: random.Random) -> Window:
    """Random window of the given rank with L spanned by the first d vectors."""
    while True:
        Phi = [[frame.random(rng) for _ in range(rank)] for _ in range(rank)]
        try:
            return Window(frame, Phi, tuple(i < d for i in range(rank)))
        except FrameError:
            continue


def _pair(a, b):
    return _dot(a, b)


def dual_window(win: Window) -> Window:
    return win.dual()


def pairing_check(win: Window, rng: random.Random, trials: int = 2) -> CheckReport:
    """<F_dot q, F_dot' q'> = sigma_dot <q, q'> on generators and random
    elements of Q x Q', plus the double-dual identity."""
    t0 = time.perf_counter()
    fr = win.frame
    dual = win.dual()
    r = win.rank
    zero, one = fr.zero(), fr.one()

    def unit(i, c=None):
        return [(one if c is None else c) if j == i else zero for j in range(r)]

    Qgens = [unit(i) if l else unit(i, fr.random_ideal(rng)) for i, l in enumerate(win.lmask)]
    Qdgens = [unit(i) if l else unit(i, fr.random_ideal(rng)) for i, l in enumerate(dual.lmask)]
    pairs = [(q, qd) for q in Qgens for qd in Qdgens]
    pairs += [(win.random_Q(rng), dual.random_Q(rng)) for _ in range(trials)]
    failures = []
    for n, (q, qd) in enumerate(pairs):
        if _pair(win.Fdot(q), dual.Fdot(qd)) != fr.sigma_dot(_pair(q, qd)):
            failures.append(f"pair[{n}]")
    dd = dual.dual()
    if dd.lmask != win.lmask or any(a != b for ra, rb in zip(dd.Phi, win.Phi) for a, b in zip(ra, rb)):
        failures.append("double dual")
    failures += win.axiom_failures(rng) + dual.axiom_failures(rng)
    total = len(pairs) + 1
    return _timed_report("dual_pairing", dict(_frame_inputs(fr), rank=r, d=sum(win.lmask)), t0,
                         total - sum(f.startswith("pair") or f == "double dual" for f in failures),
                         total, not failures, [], ", ".join(failures))


def epsilon_twist_check(win: Window, eps, u, rng: random.Random, trials: int = 2) -> CheckReport:
    """Multiplication by eps, with sigma(eps) / eps = u, is an isomorphism
    between the dual of the base change and the base change of the dual."""
    fr = win.frame
    if fr.sigma(eps) != u * eps:
        raise FrameError("sigma(eps) eps^{-1} != u")
    t0 = time.perf_counter()
    target = TwistedFrame(fr, u)
    P_bc = win.base_change_twist(target)
    X = win.dual().base_change_twist(target)    # base change of the dual
    Y = P_bc.dual()                             # dual of the base change
    failures = []
    for name, w in (("base change", P_bc), ("X", X), ("Y", Y)):
        failures += [f"{name}: {f}" for f in w.axiom_failures(rng)]
    # the two dual-side operators differ by the scalar u
    if any(b != u * a for ra, rb in zip(X.Phi, Y.Phi) for a, b in zip(ra, rb)):
        failures.append("operators differ by more than u")
    for _ in range(trials):
        x = [fr.random(rng) for _ in range(win.rank)]
        if any(eps * a != b for a, b in zip(Y.F(x), X.F([eps * c for c in x]))):
            failures.append("eps does not intertwine F")
        q = Y.random_Q(rng)
        if any(eps * a != b for a, b in zip(Y.Fdot(q), X.Fdot([eps * c for c in q]))):
            failures.append("eps does not intertwine F_dot")
    return _timed_report("epsilon_twist", dict(_frame_inputs(fr), rank=win.rank), t0,
                         not failures, True, not failures, [], ", ".join(failures))


# -- change of base ring O -> O' -------------------------------------------

def base_morphism_alpha(w: WittVector, target: WittRing) -> WittVector:
    """W_O(R) -> W_O'(R), the map that is the identity on ghost components."""
    if w.W.over != "O" or target.over != "O'" or target.R is not w.W.R:
        raise ValueError("alpha goes from W_O(R) to W_O'(R) over the same R")
    out = target.from_ghosts(w.ghosts, w.prec)
    out.coords  # solving over O' asserts integrality
    return out


def alpha_tensor(x: TensorElem, target: WittRing) -> WittVector:
    """O' (x)_O W_O(R) -> W_O'(R), O'-linear extension of alpha."""
    c = target.R.cover
    out = None
    pp = c.one_raw
    for a in x.comps:
        term = target.scalar(pp, a.length) * base_morphism_alpha(a, target)
        out = term if out is None else out + term
        pp = c.rmul(pp, c.pi_raw)
    return out


def alpha_check(frame: LTFrame, rng: random.Random, trials: int = 2) -> CheckReport:
    """alpha is Frobenius-equivariant, fixes Teichmueller lifts, satisfies
    alpha V = (pi/pi') V' alpha, and intertwines the divided Frobenii of
    the O'/O frame and the O'/O' frame with kappa' = alpha(kappa)."""
    t0 = time.perf_counter()
    T = frame.T
    R, W = T.R, T.W
    Wp = WittRing(R, "O'", T.m)
    c = R.cover
    failures = []
    a = R.random(rng)
    if base_morphism_alpha(W.teichmuller(a), Wp) != Wp.teichmuller(a):
        failures.append("teichmuller")
    for _ in range(trials):
        w = W.random(rng)
        if base_morphism_alpha(w.F(), Wp) != base_morphism_alpha(w, Wp).F():
            failures.append("frobenius")
    ratio = c.rshift_down(W.pi, 1)  # pi / pi'
    lhs = base_morphism_alpha(W.one().V(), Wp)
    if lhs != Wp.scalar(ratio, lhs.length) * Wp.one().V():
        failures.append("verschiebung")
    eps_p = (Wp.scalar(c.pi_raw) - Wp.teichmuller(R.pi_prime)).Vinv()
    scale = alpha_tensor(frame.kappa, Wp) * eps_p.inverse()

    def sdot_target(x):
        return scale * x.Vinv()

    gens = frame.witt_ideal_elements(rng, trials) + frame.extra_generators()
    for n, xi in enumerate(gens):
        y = T.random(rng)
        z = xi * y
        if alpha_tensor(frame.sigma_dot(z), Wp) != sdot_target(alpha_tensor(z, Wp)):
            failures.append(f"strict[{n}]")
    return _timed_report("alpha_strict", _frame_inputs(frame), t0, not failures, True,
                         not failures, [], ", ".join(failures))


# -- basic identity suite --------------------------------------------------

def witt_identity_check(W: WittRing, rng: random.Random, trials: int = 3) -> CheckReport:
    """Ring axioms, ghost homomorphism, FV = pi, V(x F y) = V(x) y,
    Teichmueller multiplicativity, F[a] = [a^q], ghost of V."""
    t0 = time.perf_counter()
    R, c = W.R, W.R.cover
    failures = []
    pi_vec = W.scalar(W.pi)
    for t in range(trials):
        x, y, z = W.random(rng), W.random(rng), W.random(rng)
        if (x + y) * z != x * z + y * z or (x * y) * z != x * (y * z) or x * y != y * x:
            failures.append(f"ring[{t}]")
        if x + (-x) != W.zero() or x * W.one() != x:
            failures.append(f"units[{t}]")
        gs = [R.add(a, b) for a, b in zip(x.ghost(), y.ghost())]
        gp = [R.mul(a, b) for a, b in zip(x.ghost(), y.ghost())]
        if (x + y).ghost() != gs or (x * y).ghost() != gp:
            failures.append(f"ghost[{t}]")
        if x.V().F() != pi_vec * x:
            failures.append(f"FV[{t}]")
        if x.V() * y != (x * y.F()).V():
            failures.append(f"V-projection[{t}]")
        gv = x.V().ghost()
        want = [R.zero] + [R.red(c.rmul(W.pi, g)) for g in x.ghost()]
        if gv[:len(want)] != want[:len(gv)]:
            failures.append(f"ghost-V[{t}]")
        a, b = R.random(rng), R.random(rng)
        if W.teichmuller(R.mul(a, b)) != W.teichmuller(a) * W.teichmuller(b):
            failures.append(f"teich-mult[{t}]")
        if W.teichmuller(a).F() != W.teichmuller(c.rpow(a, W.q)):
            failures.append(f"teich-F[{t}]")
    if W.one().V().F() != pi_vec:
        failures.append("FV(1)")
    total = 8 * trials + 1
    return _timed_report("witt_identities", {"spec": R.spec.to_json(), "k": R.k, "m": W.m, "over": W.over},
                         t0, total - len(failures), total, not failures, [], ", ".join(failures))


def structure_poly_check(W: WittRing, rng: random.Random, trials: int = 2) -> CheckReport:
    """Numeric arithmetic against the symbolic structure polynomials."""
    t0 = time.perf_counter()
    R = W.R
    if W.over != "O":
        raise ValueError("symbolic polynomials exist for O = W(F_q) only")
    m = W.m
    while W.q ** (m - 1) > SYMBOLIC_DEGREE_CAP:
        m -= 1
    polys = structure_polys(R.p, W.q, m)
    failures = []
    for t in range(trials):
        x, y = W.random(rng, m), W.random(rng, m)
        vals = list(x.coords) + list(y.coords)
        s = tuple(R.red(eval_poly(P, vals, R.cover)) for P in polys["sum"])
        pr = tuple(R.red(eval_poly(P, vals, R.cover)) for P in polys["prod"])
        if (x + y).coords != s:
            failures.append(f"sum[{t}]")
        if (x * y).coords != pr:
            failures.append(f"prod[{t}]")
    return _timed_report("structure_polys", {"spec": R.spec.to_json(), "k": R.k, "m": m}, t0,
                         2 * trials - len(failures), 2 * trials, not failures, [m], ", ".join(failures))


# -- lemma-level checks with precision stability ---------------------------

def theta_check(spec: LocalFieldSpec, k: int, m: int = 4) -> CheckReport:
    """theta kills J into O' (x) I_O, and its image in O' has valuation e - 1;
    recomputed at residue precision k + 2."""
    t0 = time.perf_counter()
    vals = []
    for kk in (k, k + 2):
        T = TensorRing(CoefficientRing(spec, kk), m)
        th = lubin_tate_theta(T)
        vals.append(theta_image_valuation(th))
    e = spec.e
    return _timed_report("theta_properties", {"spec": spec.to_json(), "k": k, "m": m}, t0,
                         vals[0], e - 1, vals[0] == e - 1 and vals[0] == vals[1], [k, k + 2])


def kappa_check(spec: LocalFieldSpec, k: int, m: int = 4) -> CheckReport:
    t0 = time.perf_counter()
    certs = []
    for kk in (k, k + 2):
        T = TensorRing(CoefficientRing(spec, kk), m)
        _, cert = lubin_tate_kappa(T)
        certs.append(cert)
    ok = all(c.ok for c in certs)
    return _timed_report("kappa_unit", {"spec": spec.to_json(), "k": k, "m": m}, t0,
                         certs[0].image_valuation, 0, ok, [k, k + 2],
                         "" if ok else repr(certs))


# -- suites ----------------------------------------------------------------

DEFAULT_EXTENSIONS = {
    3: [None, (-3, 0, 1), (3, 3, 1), (-3, 0, 0, 1)],
    5: [None, (-5, 0, 1), (-5, 0, 0, 1)],
}


def default_k(spec: LocalFieldSpec) -> int:
    """2e + 2, lowered so that the k + 2 recheck ring stays within size."""
    k = 2 * spec.e + 2
    while k > 1 and spec.q ** (k + 2) > MAX_RING_SIZE:
        k -= 1
    return k


def witt_check(spec: LocalFieldSpec, seed: int = 0, m: int = 4, k: int | None = None) -> list:
    """All Witt/frame checks for one extension O'/O; a list of CheckReports."""
    rng = random.Random(f"witt:{spec.p}:{spec.f0}:{spec.eis}:{seed}")
    k = default_k(spec) if k is None else k
    R = CoefficientRing(spec, k)
    W = WittRing(R, "O", m)
    out = [witt_identity_check(W, rng), structure_poly_check(W, rng),
           witt_identity_check(WittRing(R, "O'", m), rng),
           theta_check(spec, k, m), kappa_check(spec, k, m)]
    T = TensorRing(R, m)
    lt = LTFrame(T)
    out.append(frame_axiom_check(lt, rng))
    other = LTFrame(T, lt.random_unit(rng))
    out.append(frame_axiom_check(other, rng))
    out.append(frobenius_round_trip_check(lt, lt.random_unit(rng), rng))
    out.append(frobenius_round_trip_check(other, other.random_unit(rng), rng))
    if spec.e == 1:
        out.append(witt_frame_as_lubin_tate(R, m, rng))
        wf = WittFrame(W)
        out.append(frame_axiom_check(wf, rng))
        frames = [wf]
    else:
        frames = [lt]
    for fr in frames:
        for rank, d in ((1, 1), (1, 0), (2, 1)):
            win = random_window(fr, rank, d, rng)
            out.append(pairing_check(win, rng))
            eps = fr.random_unit(rng)
            u = fr.sigma(eps) * eps.inverse()
            out.append(epsilon_twist_check(win, eps, u, rng))
    out.append(alpha_check(lt, rng))
    return out


def witt_suite(seed: int = 0, m: int = 4) -> list:
    out = []
    for p, exts in DEFAULT_EXTENSIONS.items():
        for eis in exts:
            out.extend(witt_check(LocalFieldSpec(p, 1, eis, quadratic=False), seed, m))
    return out
