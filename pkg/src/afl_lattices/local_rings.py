"""Truncated arithmetic in p-adic rings of integers.

A ring handle models O/pi^N where O is either O_{E0} or O_E, the ring of
integers of the unramified quadratic extension E of E0.  E0 is the
unramified extension of Q_p of degree f0, optionally followed by a totally
ramified step given by an Eisenstein polynomial with integer coefficients.

Integral elements ("raw" values) are flat tuples of e*d integers; entry
i*d + a is the coefficient of t^i w^a, where t is the Eisenstein root (the
uniformizer) and w a root of the Galois-ring modulus.  Block i is reduced
modulo p^ceil((N - i)/e), which makes the tuple a canonical representative
of the class modulo pi^N.

Field elements are ``RingElem`` objects pi^(-k) * c with c raw.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterable, Sequence

Raw = tuple


class RingSpecError(ValueError):
    """Invalid ring specification."""


class PrecisionError(ArithmeticError):
    """Working precision is too small for the requested operation."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def vp_int(a: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    return v


# -- polynomials over F_p (little-endian coefficient lists) ---------------

def _fp_trim(a: list) -> list:
    while a and a[-1] == 0:
        a.pop()
    return a


def _fp_mod(a: list, m: list, p: int) -> list:
    a = [x % p for x in a]
    _fp_trim(a)
    inv = pow(m[-1], -1, p)
    while len(a) >= len(m):
        c = a[-1] * inv % p
        s = len(a) - len(m)
        for i, mi in enumerate(m):
            a[s + i] = (a[s + i] - c * mi) % p
        _fp_trim(a)
    return a


def _fp_mulmod(a: list, b: list, m: list, p: int) -> list:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _fp_mod(out, m, p)


def _fp_gcd(a: list, b: list, p: int) -> list:
    a, b = _fp_trim([x % p for x in a]), _fp_trim([x % p for x in b])
    while b:
        a, b = b, _fp_mod(a, b, p)
    return a


def _fp_irreducible(m: list, p: int) -> bool:
    d = len(m) - 1
    if d == 1:
        return True
    x = [0, 1]
    power = x
    for _ in range(1, d // 2 + 1):
        # power <- power^p mod m
        res = [1]
        base, e = power, p
        while e:
            if e & 1:
                res = _fp_mulmod(res, base, m, p)
            base = _fp_mulmod(base, base, m, p)
            e >>= 1
        power = res
        diff = list(power) + [0] * max(0, 2 - len(power))
        diff[1] = (diff[1] - 1) % p
        if len(_fp_gcd(m, diff, p)) > 1:
            return False
    return True


@lru_cache(maxsize=None)
def galois_modulus(p: int, d: int) -> tuple:
    """Lexicographically first monic irreducible polynomial of degree d mod p.

    The polynomial with coefficients in [0, p) also defines the Galois ring
    GR(p^M, d) for every M.  When d > 1 the constant term is forced nonzero.
    """
    if d == 1:
        return (0, 1)
    for tail in product(range(p), repeat=d):
        m = list(tail) + [1]
        if m[0] == 0:
            continue
        if _fp_irreducible(m, p):
            return tuple(m)
    raise RingSpecError(f"no irreducible polynomial of degree {d} mod {p}")


# -- Galois ring helpers on d-tuples modulo P ------------------------------

def _gr_reduction_table(modulus: tuple, P: int) -> list:
    """Coordinates of w^k for d <= k <= 2d - 2."""
    d = len(modulus) - 1
    table = []
    cur = [(-c) % P for c in modulus[:-1]]  # w^d
    for _ in range(max(0, d - 1)):
        table.append(tuple(cur))
        top = cur[-1]
        cur = [0] + cur[:-1]
        for i in range(d):
            cur[i] = (cur[i] - top * modulus[i]) % P
    return table


class _GR:
    """GR(P, d) arithmetic where P is a power of p."""

    __slots__ = ("p", "d", "P", "modulus", "table")

    def __init__(self, p: int, d: int, P: int):
        self.p, self.d, self.P = p, d, P
        self.modulus = galois_modulus(p, d)
        self.table = _gr_reduction_table(self.modulus, P)

    def mul(self, a: Sequence[int], b: Sequence[int]) -> list:
        d, P = self.d, self.P
        if d == 1:
            return [a[0] * b[0] % P]
        prod_ = [0] * (2 * d - 1)
        for i in range(d):
            ai = a[i]
            if ai:
                for j in range(d):
                    prod_[i + j] += ai * b[j]
        out = prod_[:d]
        for k in range(d, 2 * d - 1):
            c = prod_[k]
            if c:
                row = self.table[k - d]
                for i in range(d):
                    out[i] += c * row[i]
        return [x % P for x in out]

    def one(self) -> list:
        return [1] + [0] * (self.d - 1)

    def pow(self, a: Sequence[int], e: int) -> list:
        res, base = self.one(), list(a)
        while e:
            if e & 1:
                res = self.mul(res, base)
            base = self.mul(base, base)
            e >>= 1
        return res

    def inv(self, a: Sequence[int]) -> list:
        p, d = self.p, self.d
        if all(x % p == 0 for x in a):
            raise ZeroDivisionError("not a unit")
        x = _GR(p, d, p).pow([c % p for c in a], p ** d - 2)
        P = self.P
        for _ in range(64):
            ax = self.mul(a, x)
            if ax == self.one():
                return x
            two_minus = [(-c) % P for c in ax]
            two_minus[0] = (two_minus[0] + 2) % P
            x = self.mul(x, two_minus)
        raise PrecisionError("unit inversion did not converge")

    def eval_poly(self, coeffs: Sequence[int], r: Sequence[int]) -> list:
        out = [0] * self.d
        for c in reversed(coeffs):
            out = self.mul(out, r)
            out[0] = (out[0] + c) % self.P
        return out

    def frobenius_root(self) -> list:
        """The root of the modulus congruent to w^p (Hensel lift)."""
        m = self.modulus
        dm = [i * m[i] for i in range(1, len(m))]
        w = [0, 1] + [0] * (self.d - 2) if self.d > 1 else [0]
        r = self.pow(w, self.p) if self.d > 1 else [0]
        if self.d == 1:
            return [0]
        for _ in range(80):
            val = self.eval_poly(m, r)
            if not any(val):
                return r
            step = self.mul(val, self.inv(self.eval_poly(dm, r)))
            r = [(x - y) % self.P for x, y in zip(r, step)]
        raise PrecisionError("Frobenius root did not converge")


# -- specification ---------------------------------------------------------

@dataclass(frozen=True)
class LocalFieldSpec:
    """p, inertia degree f0 of E0, optional Eisenstein polynomial, and
    whether the ring models E (quadratic=True) or E0 itself."""

    p: int
    f0: int = 1
    eis: tuple | None = None
    quadratic: bool = True

    def validate(self) -> None:
        if not isinstance(self.p, int) or not is_prime(self.p):
            raise RingSpecError(f"p={self.p!r} is not prime")
        if self.p == 2:
            raise RingSpecError("p = 2 is not supported")
        if not isinstance(self.f0, int) or self.f0 < 1:
            raise RingSpecError(f"f0={self.f0!r} must be a positive integer")
        if self.eis is not None:
            c = tuple(self.eis)
            if len(c) < 2 or c[-1] != 1:
                raise RingSpecError("Eisenstein polynomial must be monic of degree >= 1")
            if any(not isinstance(a, int) for a in c):
                raise RingSpecError("Eisenstein coefficients must be integers")
            if c[0] % self.p or c[0] % (self.p * self.p) == 0:
                raise RingSpecError("constant term must have valuation exactly 1")
            if any(a % self.p for a in c[1:-1]):
                raise RingSpecError("non-leading coefficients must be divisible by p")

    @property
    def e(self) -> int:
        return 1 if self.eis is None else len(self.eis) - 1

    @property
    def q(self) -> int:
        """Residue field size of E0."""
        return self.p ** self.f0

    @property
    def eis_coeffs(self) -> tuple:
        return (-self.p, 1) if self.eis is None else tuple(self.eis)

    def to_json(self, precision: int | None = None) -> dict:
        out = {"p": self.p, "f0": self.f0,
               "eis_coeffs": None if self.eis is None else list(self.eis),
               "quadratic": self.quadratic}
        if precision is not None:
            out["precision"] = precision
        return out

    @classmethod
    def from_json(cls, data: dict) -> "LocalFieldSpec":
        try:
            eis = data.get("eis_coeffs")
            spec = cls(int(data["p"]), int(data.get("f0", 1)),
                       None if eis is None else tuple(int(a) for a in eis),
                       bool(data.get("quadratic", True)))
        except (KeyError, TypeError) as exc:
            raise RingSpecError(f"malformed ring spec: {exc}") from exc
        spec.validate()
        return spec


# -- ring handle -----------------------------------------------------------

class LocalRing:
    """O/pi^N for the field described by ``spec``."""

    def __init__(self, spec: LocalFieldSpec, N: int, _allow_small: bool = False):
        spec.validate()
        if N < (1 if _allow_small else 2):
            raise PrecisionError(f"precision N={N} too small (need N >= 2)")
        self.spec = spec
        self.N = N
        self.p = spec.p
        self.e = spec.e
        self.d = 2 * spec.f0 if spec.quadratic else spec.f0
        self.q = spec.q
        self.residue_size = self.q ** 2 if spec.quadratic else self.q
        e, p = self.e, self.p
        self.exps = tuple(-(-(N - i) // e) for i in range(e))
        self.mods = tuple(p ** m for m in self.exps)
        self.P = self.mods[0]
        self.gr = _GR(p, self.d, self.P)
        self.eisc = spec.eis_coeffs
        a0 = self.eisc[0]
        self._u0inv = pow(a0 // p, -1, self.P)
        # t^k for e <= k <= 2e - 2 as integer vectors in t^0..t^(e-1)
        self._tpow = []
        cur = [-a for a in self.eisc[:-1]]
        for _ in range(max(0, e - 1)):
            self._tpow.append(tuple(cur))
            top = cur[-1]
            cur = [0] + cur[:-1]
            for i in range(e):
                cur[i] -= top * self.eisc[i]
        self.size = len(self.mods) * self.d
        self._sigma = self._sigma_matrix() if spec.quadratic else None
        self.zero_raw = (0,) * self.size
        self.one_raw = self.canon([1] + [0] * (self.size - 1))
        v = [0] * self.size
        if e == 1:
            v[0] = p
        else:
            v[self.d] = 1
        self.pi_raw = self.canon(v)

    # -- identity
    def __repr__(self) -> str:
        return (f"LocalRing(p={self.p}, f0={self.spec.f0}, e={self.e}, "
                f"quadratic={self.spec.quadratic}, N={self.N})")

    def with_precision(self, N: int) -> "LocalRing":
        return make_ring(self.spec, N)

    def _sigma_matrix(self) -> list:
        gr = self.gr
        r1 = gr.frobenius_root()
        r = [0, 1] + [0] * (self.d - 2)
        for _ in range(self.spec.f0):
            r = gr.eval_poly(r, r1)
        cols = [gr.one()]
        for _ in range(1, self.d):
            cols.append(gr.mul(cols[-1], r))
        return cols  # cols[a] = sigma(w^a)

    # -- raw (integral) arithmetic
    def canon(self, c: Iterable[int]) -> Raw:
        c = list(c)
        d = self.d
        if self.e == 1:
            P = self.P
            return tuple(x % P for x in c)
        out = []
        for i, m in enumerate(self.mods):
            out.extend(x % m for x in c[i * d:(i + 1) * d])
        return tuple(out)

    def radd(self, a: Raw, b: Raw) -> Raw:
        if self.e == 1:
            P = self.P
            return tuple((x + y) % P for x, y in zip(a, b))
        return self.canon(x + y for x, y in zip(a, b))

    def rsub(self, a: Raw, b: Raw) -> Raw:
        if self.e == 1:
            P = self.P
            return tuple((x - y) % P for x, y in zip(a, b))
        return self.canon(x - y for x, y in zip(a, b))

    def rneg(self, a: Raw) -> Raw:
        return self.canon(-x for x in a)

    def rmul(self, a: Raw, b: Raw) -> Raw:
        d, e, gr = self.d, self.e, self.gr
        if e == 1:
            if d == 1:
                return ((a[0] * b[0]) % self.P,)
            return tuple(gr.mul(a, b))
        blocks_a = [a[i * d:(i + 1) * d] for i in range(e)]
        blocks_b = [b[i * d:(i + 1) * d] for i in range(e)]
        prod_ = [[0] * d for _ in range(2 * e - 1)]
        for i, x in enumerate(blocks_a):
            if any(x):
                for j, y in enumerate(blocks_b):
                    if any(y):
                        xy = gr.mul(x, y)
                        acc = prod_[i + j]
                        for k in range(d):
                            acc[k] += xy[k]
        out = prod_[:e]
        for k in range(e, 2 * e - 1):
            blk = prod_[k]
            if any(blk):
                row = self._tpow[k - e]
                for i in range(e):
                    if row[i]:
                        for a_ in range(d):
                            out[i][a_] += row[i] * blk[a_]
        return self.canon(x for blk in out for x in blk)

    def rscale(self, a: Raw, n: int) -> Raw:
        return self.canon(n * x for x in a)

    def rval(self, a: Raw) -> int | None:
        """Valuation of a raw value; None when it is zero mod pi^N."""
        p, d, e = self.p, self.d, self.e
        best = None
        for i in range(e):
            for x in a[i * d:(i + 1) * d]:
                if x:
                    v = e * vp_int(x, p) + i
                    if best is None or v < best:
                        best = v
        return best

    def rshift_up(self, a: Raw, s: int = 1) -> Raw:
        """Multiply by pi^s."""
        if s <= 0:
            return a
        if self.e == 1:
            f = self.p ** s
            P = self.P
            return tuple(x * f % P for x in a)
        d, e = self.d, self.e
        cur = list(a)
        for _ in range(s):
            top = cur[(e - 1) * d:]
            new = [0] * d + cur[:(e - 1) * d]
            for i in range(e):
                ai = self.eisc[i]
                if ai:
                    for k in range(d):
                        new[i * d + k] -= ai * top[k]
            cur = list(self.canon(new))
        return tuple(cur)

    def rshift_down(self, a: Raw, s: int = 1) -> Raw:
        """Divide by pi^s; the caller guarantees divisibility."""
        if s <= 0:
            return a
        p = self.p
        if self.e == 1:
            f = p ** s
            for x in a:
                if x % f:
                    raise ArithmeticError("not divisible by pi^s")
            return tuple(x // f for x in a)
        d, e = self.d, self.e
        cur = list(a)
        for _ in range(s):
            c0 = cur[:d]
            if any(x % p for x in c0):
                raise ArithmeticError("not divisible by pi")
            w = [(x // p) * self._u0inv for x in c0]
            new = cur[d:] + [0] * d
            for i in range(e):
                ai = self.eisc[i + 1]
                if ai:
                    for k in range(d):
                        new[i * d + k] -= w[k] * ai
            cur = list(self.canon(new))
        return tuple(cur)

    def rinv_unit(self, a: Raw) -> Raw:
        d = self.d
        if not any(x % self.p for x in a[:d]):
            raise ZeroDivisionError("not a unit")
        x = self.canon(self.gr.inv(a[:d]) + [0] * (self.size - d))
        one = self.one_raw
        for _ in range(64):
            ax = self.rmul(a, x)
            if ax == one:
                return x
            x = self.rmul(x, self.rsub(self.rscale(one, 2), ax))
        raise PrecisionError("unit inversion did not converge")

    def rsigma(self, a: Raw) -> Raw:
        if self._sigma is None:
            raise RingSpecError("sigma is only defined on the quadratic ring")
        d, P = self.d, self.P
        if d == 1:
            return a
        out = []
        cols = self._sigma
        for i in range(self.e):
            blk = a[i * d:(i + 1) * d]
            acc = [0] * d
            for k, c in enumerate(blk):
                if c:
                    col = cols[k]
                    for r in range(d):
                        acc[r] += c * col[r]
            out.extend(x % P for x in acc)
        return self.canon(out)

    def reduce_mod(self, a: Raw, k: int) -> Raw:
        """Canonical representative of a modulo pi^k (k <= N)."""
        if k >= self.N:
            return a
        if k <= 0:
            return self.zero_raw
        d, e, p = self.d, self.e, self.p
        out = []
        for i in range(e):
            m = p ** (-(-(k - i) // e)) if k > i else 1
            out.extend(x % m for x in a[i * d:(i + 1) * d])
        return tuple(out)

    def residue(self, a: Raw) -> Raw:
        return self.reduce_mod(a, 1)

    def rteichmuller(self, a: Raw) -> Raw:
        """Teichmueller lift of the residue class of a."""
        x = self.canon(list(self.residue(a)))
        Q = self.p ** self.d
        for _ in range(self.N + 1):
            y = self.rpow(x, Q)
            if y == x:
                return x
            x = y
        return x

    def rpow(self, a: Raw, n: int) -> Raw:
        res, base = self.one_raw, a
        while n:
            if n & 1:
                res = self.rmul(res, base)
            base = self.rmul(base, base)
            n >>= 1
        return res

    def residue_elements(self) -> list:
        """Canonical lifts (digits in [0, p)) of all residue field elements."""
        d = self.d
        return [self.canon(list(t) + [0] * (self.size - d)) for t in product(range(self.p), repeat=d)]

    def digit_reps(self, k: int) -> list:
        """All canonical representatives of O/pi^k."""
        d, e, p = self.d, self.e, self.p
        ranges = []
        for i in range(e):
            m = p ** (-(-(k - i) // e)) if k > i else 1
            ranges.extend([range(m)] * d)
        return [tuple(t) for t in product(*ranges)]

    # -- element constructors
    def elem(self, c: Iterable[int], k: int = 0) -> "RingElem":
        return RingElem(self, k, self.canon(c))

    def from_int(self, n: int) -> "RingElem":
        return RingElem(self, 0, self.rscale(self.one_raw, n)) if n else self.zero()

    def zero(self) -> "RingElem":
        return RingElem(self, 0, self.zero_raw)

    def one(self) -> "RingElem":
        return RingElem(self, 0, self.one_raw)

    def pi(self) -> "RingElem":
        return RingElem(self, 0, self.pi_raw)

    def pi_power(self, k: int) -> "RingElem":
        if k >= 0:
            return RingElem(self, 0, self.rshift_up(self.one_raw, k))
        return RingElem(self, -k, self.one_raw)

    def gen(self) -> "RingElem":
        """The Galois-ring generator w."""
        c = [0] * self.size
        c[1 % self.d if self.d > 1 else 0] = 1
        return self.elem(c)

    def coerce(self, a: "RingElem") -> "RingElem":
        """Move an element to this ring when only the precision differs."""
        if a.ring is self:
            return a
        if a.ring.spec != self.spec:
            raise RingSpecError("cannot coerce between different fields")
        return RingElem(self, a.k, self.canon(a.c))

    def teichmuller(self, a: "RingElem") -> "RingElem":
        if a.k:
            raise ValueError("Teichmueller lift needs an integral element")
        return RingElem(self, 0, self.rteichmuller(a.c))

    def base_embedding(self, f: int) -> "RingElem":
        """A root of galois_modulus(p, f) inside this ring (f | d)."""
        return RingElem(self, 0, _embed_root(self, f))

    def norm_one_residues(self) -> list:
        """q + 1 Teichmueller representatives of the norm-one residue classes."""
        if not self.spec.quadratic:
            raise RingSpecError("norm-one residues are defined on the quadratic ring")
        gen = _residue_generator(self)
        out = []
        step = self.rpow(gen, self.q - 1)
        cur = self.one_raw
        for _ in range(self.q + 1):
            out.append(RingElem(self, 0, self.rteichmuller(cur)))
            cur = self.rmul(cur, step)
        return out

    def random_integral(self, rng, bound: int | None = None) -> "RingElem":
        bound = self.p if bound is None else bound
        return self.elem([rng.randrange(bound) for _ in range(self.size)])

    def trace_zero_unit(self) -> "RingElem":
        """A unit delta with sigma(delta) = -delta."""
        for r in self.residue_elements():
            a = RingElem(self, 0, r)
            dlt = a - a.sigma()
            if dlt.valuation() == 0:
                return dlt
        raise RingSpecError("no trace-zero unit found")


def _residue_generator(ring: LocalRing) -> Raw:
    """A generator of the multiplicative group of the residue field."""
    small = _GR(ring.p, ring.d, ring.p)
    order = ring.p ** ring.d - 1
    primes = [r for r in range(2, order + 1) if order % r == 0 and is_prime(r)]
    for t in product(range(ring.p), repeat=ring.d):
        if not any(t):
            continue
        if all(small.pow(list(t), order // r) != small.one() for r in primes):
            return ring.canon(list(t) + [0] * (ring.size - ring.d))
    raise RingSpecError("no residue generator")


def _embed_root(ring: LocalRing, f: int) -> Raw:
    if ring.d % f:
        raise RingSpecError(f"degree {f} does not divide {ring.d}")
    m = galois_modulus(ring.p, f)
    small = _GR(ring.p, ring.d, ring.p)
    root = None
    for t in product(range(ring.p), repeat=ring.d):
        if not any(small.eval_poly(m, list(t))):
            root = list(t)
            break
    assert root is not None
    gr = ring.gr
    dm = [i * m[i] for i in range(1, len(m))]
    r = root
    for _ in range(80):
        val = gr.eval_poly(m, r)
        if not any(val):
            break
        step = gr.mul(val, gr.inv(gr.eval_poly(dm, r)))
        r = [(x - y) % gr.P for x, y in zip(r, step)]
    return ring.canon(r + [0] * (ring.size - ring.d))


@lru_cache(maxsize=256)
def _cached_ring(spec: LocalFieldSpec, N: int, allow_small: bool) -> LocalRing:
    return LocalRing(spec, N, allow_small)


def make_ring(spec: LocalFieldSpec, N: int) -> LocalRing:
    """Ring handle for ``spec`` at pi-adic precision N (N >= 2)."""
    return _cached_ring(spec, N, False)


def residue_ring(spec: LocalFieldSpec, k: int) -> LocalRing:
    """O/pi^k for any k >= 1 (used by the finite-module kernel)."""
    return _cached_ring(spec, k, True)


class RingElem:
    """pi^(-k) * c with c a canonical raw value."""

    __slots__ = ("ring", "k", "c")

    def __init__(self, ring: LocalRing, k: int, c: Raw):
        if k > 0:
            v = ring.rval(c)
            if v is None:
                k = 0
            elif v > 0:
                s = min(v, k)
                c = ring.rshift_down(c, s)
                k -= s
        elif k < 0:
            c = ring.rshift_up(c, -k)
            k = 0
        self.ring, self.k, self.c = ring, k, c

    def _align(self, other):
        if not isinstance(other, RingElem):
            other = self.ring.from_int(other)
        r = self.ring
        k = max(self.k, other.k)
        a = r.rshift_up(self.c, k - self.k)
        b = r.rshift_up(other.c, k - other.k)
        return k, a, b

    def __add__(self, other):
        k, a, b = self._align(other)
        return RingElem(self.ring, k, self.ring.radd(a, b))

    __radd__ = __add__

    def __sub__(self, other):
        k, a, b = self._align(other)
        return RingElem(self.ring, k, self.ring.rsub(a, b))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return RingElem(self.ring, self.k, self.ring.rneg(self.c))

    def __mul__(self, other):
        if not isinstance(other, RingElem):
            return RingElem(self.ring, self.k, self.ring.rscale(self.c, other))
        r = self.ring
        if not (self.k or other.k):
            return RingElem(r, 0, r.rmul(self.c, other.c))
        # with a denominator present, multiply unit parts so that no digits
        # are dropped before the valuations cancel
        va, vb = r.rval(self.c), r.rval(other.c)
        if va is None or vb is None:
            return r.zero()
        u = r.rmul(r.rshift_down(self.c, va), r.rshift_down(other.c, vb))
        return RingElem(r, self.k + other.k - va - vb, u)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, RingElem):
            other = self.ring.from_int(other)
        return self * other.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        res, base = self.ring.one(), self
        while n:
            if n & 1:
                res = res * base
            base = base * base
            n >>= 1
        return res

    def valuation(self):
        """Normalized valuation; float('inf') when zero at working precision."""
        v = self.ring.rval(self.c)
        return float("inf") if v is None else v - self.k

    def is_zero(self) -> bool:
        return self.ring.rval(self.c) is None

    def is_integral(self) -> bool:
        return self.k == 0

    def unit_part(self) -> Raw:
        v = self.ring.rval(self.c)
        if v is None:
            raise ZeroDivisionError("zero has no unit part")
        return self.ring.rshift_down(self.c, v)

    def inverse(self) -> "RingElem":
        r = self.ring
        v = r.rval(self.c)
        if v is None:
            raise ZeroDivisionError("inverse of zero at working precision")
        u = r.rshift_down(self.c, v)
        ui = r.rinv_unit(u)
        return RingElem(r, v - self.k, ui)

    def sigma(self) -> "RingElem":
        return RingElem(self.ring, self.k, self.ring.rsigma(self.c))

    def norm(self) -> "RingElem":
        return self * self.sigma()

    def trace(self) -> "RingElem":
        return self + self.sigma()

    def is_sigma_fixed(self) -> bool:
        return (self - self.sigma()).is_zero()

    def __eq__(self, other) -> bool:
        if not isinstance(other, (RingElem, int)):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        raise TypeError("RingElem is not hashable; use key()")

    def key(self) -> tuple:
        return (self.k, self.c)

    def to_json(self) -> dict:
        # balanced digits, so small integers survive a lift to higher precision
        d, mods = self.ring.d, self.ring.mods
        coords = []
        for i, x in enumerate(self.c):
            m = mods[i // d]
            coords.append(x - m if 2 * x > m else x)
        return {"denom": self.k, "coords": coords}

    def __repr__(self) -> str:
        return f"RingElem(k={self.k}, c={self.c})"


def elem_from_json(ring: LocalRing, data) -> RingElem:
    if isinstance(data, int):
        return ring.from_int(data)
    try:
        k = int(data.get("denom", 0))
        coords = [int(x) for x in data["coords"]]
    except (AttributeError, KeyError, TypeError, ValueError) as exc:
        raise RingSpecError(f"malformed element {data!r}") from exc
    if len(coords) > ring.size:
        raise RingSpecError("too many coordinates for this ring")
    coords += [0] * (ring.size - len(coords))
    if k < 0:
        raise RingSpecError("denominator exponent must be non-negative")
    return RingElem(ring, k, ring.canon(coords))


def spec_to_json(spec: LocalFieldSpec, precision: int) -> str:
    return json.dumps(spec.to_json(precision), sort_keys=True)
