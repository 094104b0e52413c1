"""Regular semisimple pairs (x, j) and their lattice counts.

For a pair on (V, J) with L = O_E[x] j the enumerated sets are

    M(x, j)_i = {L <= Lam <= L^dual : x Lam <= Lam, tau Lam = Lam, len(Lam / L) = i}
    I(x, j)   = #{L <= Lam <= L^dual : x Lam <= Lam, Lam^dual = Lam}

and the orbital series is O(x, j; u) = sum_i (-1)^i |M_i| u^i with u = q^-s.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Sequence

from . import matrices as mx
from .hermitian import HermitianSpace, Parity, adjoint, dual_lattice, parity
from .lattices import (DEFAULT_CAP, FiniteQuotient, Lattice, enumerate_submodules, hnf, index,
                       lattice_sum, quotient)
from .local_rings import LocalRing, PrecisionError, RingElem


class NotRegularSemisimple(ValueError):
    pass


class NotAdjointStable(ValueError):
    pass


class SaturationError(RuntimeError):
    """O_E[x] j did not stabilise: x is not integral over O_E."""


# -- Laurent polynomials ---------------------------------------------------

class LaurentSeries:
    """Finitely supported integer Laurent polynomial in u."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: dict | None = None):
        self.coeffs = {int(k): int(v) for k, v in (coeffs or {}).items() if v}

    @classmethod
    def from_counts(cls, counts: dict) -> "LaurentSeries":
        return cls({i: (-1) ** (i % 2) * m for i, m in counts.items()})

    @classmethod
    def monomial(cls, k: int, c: int = 1) -> "LaurentSeries":
        return cls({k: c})

    def __add__(self, other: "LaurentSeries") -> "LaurentSeries":
        out = Counter(self.coeffs)
        out.update(other.coeffs)
        return LaurentSeries(out)

    def __neg__(self) -> "LaurentSeries":
        return LaurentSeries({k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other: "LaurentSeries") -> "LaurentSeries":
        return self + (-other)

    def __mul__(self, other) -> "LaurentSeries":
        if isinstance(other, int):
            return LaurentSeries({k: other * v for k, v in self.coeffs.items()})
        out: Counter = Counter()
        for a, x in self.coeffs.items():
            for b, y in other.coeffs.items():
                out[a + b] += x * y
        return LaurentSeries(out)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = LaurentSeries({0: other})
        return isinstance(other, LaurentSeries) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.coeffs.items())))

    def shift(self, l: int) -> "LaurentSeries":
        return LaurentSeries({k + l: v for k, v in self.coeffs.items()})

    def value_at_one(self) -> int:
        return sum(self.coeffs.values())

    def evaluate(self, u: float) -> float:
        return sum(v * u ** k for k, v in self.coeffs.items())

    def derivative_at_one(self) -> int:
        """d/du at u = 1."""
        return sum(k * v for k, v in self.coeffs.items())

    def s_derivative(self) -> int:
        """(log q)^-1 d/ds at s = 0, where u = q^-s."""
        return -self.derivative_at_one()

    def to_json(self) -> list:
        return [[k, self.coeffs[k]] for k in sorted(self.coeffs)]

    @classmethod
    def from_json(cls, data: list) -> "LaurentSeries":
        return cls({k: v for k, v in data})

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for k in sorted(self.coeffs):
            v = self.coeffs[k]
            terms.append(f"{v}" if k == 0 else f"{v}*u^{k}")
        return " + ".join(terms)


# -- pairs -----------------------------------------------------------------

def cyclic_matrix(x: mx.Matrix, j: Sequence[RingElem], count: int | None = None) -> mx.Matrix:
    n = len(x)
    count = n if count is None else count
    cols, v = [], list(j)
    for _ in range(count):
        cols.append(v)
        v = mx.mat_vec(x, v)
    return mx.from_columns(cols)


def _poly_in(x: mx.Matrix, y: mx.Matrix, C: mx.Matrix, j: Sequence[RingElem], slack: int) -> list | None:
    """Coefficients c with y = sum c_i x^i, or None if y is not in E[x]."""
    c = [row[0] for row in mx.solve(C, [[a] for a in mx.mat_vec(y, list(j))])]
    R = x[0][0].ring
    acc = mx.zeros(R, len(x))
    xp = mx.identity(R, len(x))
    for ci in c:
        acc = mx.add(acc, mx.scale(xp, ci))
        xp = mx.mul(xp, x)
    return c if mx.close(acc, y, slack) else None


def precision_loss(gram: mx.Matrix, C: mx.Matrix, x: mx.Matrix, j: Sequence[RingElem]) -> int:
    """e_max: a bound on the digits lost to the divisions by det(gram) and
    det(C) in adjoints, duals and cyclic coordinates."""
    vG = mx.det(gram).valuation()
    vC = mx.det(C).valuation()
    vG = 0 if vG == float("inf") else vG
    vC = 0 if vC == float("inf") else vC
    spread = max(0, -mx.min_valuation(gram), -mx.min_valuation(x), -min(a.valuation() for a in j))
    return int(abs(vG) + 2 * abs(vC) + spread)


@dataclass
class RSPair:
    space: HermitianSpace
    x: mx.Matrix
    j: list
    cyclic_basis: mx.Matrix
    adjoint_x: mx.Matrix
    tau: mx.Matrix
    group: bool = False
    integral: bool = True
    label: str = ""
    slack: int = 0
    meta: dict = field(default_factory=dict, repr=False, compare=False)
    recipe: Callable[[int], "RSPair"] | None = field(default=None, repr=False, compare=False)
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def ring(self) -> LocalRing:
        return self.space.ring

    @property
    def n(self) -> int:
        return self.space.n

    def parity(self) -> Parity:
        return parity(self.space)

    def tau_apply(self, v: Sequence[RingElem]) -> list:
        return mx.mat_vec(self.tau, [a.sigma() for a in v])

    def to_json(self) -> dict:
        out = {"space": self.space.to_json(), "x": mx.to_json(self.x), "j": [a.to_json() for a in self.j]}
        if self.group:
            out["mode"] = "group"
        if self.label:
            out["label"] = self.label
        if "origin" in self.meta:
            out["origin"] = self.meta["origin"]
        return out

    def at_precision(self, N: int) -> "RSPair":
        """The same pair over O_E / pi^N: rebuilt from its recipe when it has
        one, otherwise lifted from the serialized entries."""
        if self.recipe is not None:
            return self.recipe(N)
        return _lift_from_source(self.to_json(), N)


def make_pair(space: HermitianSpace, x: mx.Matrix, j: Sequence[RingElem], group: bool = False,
              label: str = "") -> RSPair:
    """Validate (x, j) and build the cyclic basis, x* and tau.

    tau(sum c_i x^i j) = sum sigma(c_i) (x*)^i j, so with C = [x^i j] and
    Y = [(x*)^i j] its matrix is T = Y sigma(C)^-1, acting as v -> T sigma(v)."""
    R = space.ring
    n = space.n
    if len(x) != n or any(len(r) != n for r in x) or len(j) != n:
        raise ValueError("shape mismatch between space, x and j")
    x = mx.coerce(R, x)
    j = [R.coerce(a) for a in j]
    C = cyclic_matrix(x, j)
    if mx.det(C).is_zero():
        raise NotRegularSemisimple("E[x] j is a proper subspace")
    xs = adjoint(x, space)
    slack = precision_loss(space.gram, C, x, j)
    cp = mx.charpoly(x)
    integral = all(c.is_integral() for c in cp)
    fwd = _poly_in(x, xs, C, j, slack)
    if fwd is None:
        raise NotAdjointStable("x* is not a polynomial in x")
    if integral:
        back = _poly_in(xs, x, cyclic_matrix(xs, j), j, slack)
        if back is None or not all(c.is_integral() for c in fwd + back):
            raise NotAdjointStable("O_E[x] != O_E[x*]")
    if group:
        if not mx.close(mx.mul(xs, x), mx.identity(R, n), slack):
            raise ValueError("group mode needs x in U(J)")
    Y = cyclic_matrix(xs, j)
    T = mx.mul(Y, mx.inverse(mx.sigma(C)))
    return RSPair(space, x, j, C, xs, T, group, integral, label, slack)


# builders for serialized pairs that name how they were made: kind -> (origin, N) -> RSPair
ORIGINS: dict[str, Callable[[dict, int], "RSPair"]] = {}


def _canon_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def pair_from_json(data: dict, precision: int | None = None) -> RSPair:
    if "origin" in data:
        return _pair_from_origin(data, precision)
    space = HermitianSpace.from_json(data["space"], precision)
    R = space.ring
    x = mx.from_json(R, data["x"])
    j = mx.vec_from_json(R, data["j"])
    group = data.get("mode") == "group"
    stored = data["space"].get("ring_spec", {}).get("precision", R.N)
    if group and R.N > int(stored):
        x = unitary_lift(x, space)
    pair = make_pair(space, x, j, group=group, label=data.get("label", ""))
    # other precisions start again from the digits we were given
    pair.recipe = lambda N, src=data: _lift_from_source(src, N)
    return pair


def _lift_from_source(data: dict, N: int) -> RSPair:
    try:
        return pair_from_json(data, N)
    except (NotAdjointStable, NotRegularSemisimple, ValueError) as exc:
        stored = data["space"]["ring_spec"].get("precision")
        raise PrecisionError(f"entries known to {stored} digits do not lift to N={N} ({exc}); "
                             "store the pair at a higher precision or with its origin") from exc


def _pair_from_origin(data: dict, precision: int | None) -> RSPair:
    origin = data["origin"]
    build = ORIGINS.get(origin.get("kind") if isinstance(origin, dict) else None)
    if build is None:
        raise ValueError(f"unknown pair origin {origin!r}")
    stored = int(data["space"]["ring_spec"]["precision"])
    here = build(origin, stored)
    # the entries must be the ones the origin produces
    if _canon_json(here.to_json()) != _canon_json(data):
        raise ValueError("pair entries do not match their origin")
    return here if precision in (None, stored) else build(origin, precision)


def unitary_lift(x: mx.Matrix, space: HermitianSpace) -> mx.Matrix:
    """Newton steps x <- x (3 - x* x) / 2 until x* x = 1 exactly; each step
    doubles the number of correct digits."""
    R = space.ring
    one = mx.identity(R, space.n)
    half = R.from_int(2).inverse()
    for _ in range(R.N.bit_length() + 2):
        err = mx.mul(adjoint(x, space), x)
        if mx.equal(err, one):
            break
        x = mx.scale(mx.mul(x, mx.sub(mx.scale(one, R.from_int(3)), err)), half)
    return x


def precision_for(pair: RSPair) -> int:
    """Working precision N = 2 e_max + 8."""
    return 2 * pair.slack + 8


# -- lattices of a pair ----------------------------------------------------

def span_lattice(pair: RSPair, max_rounds: int | None = None) -> Lattice:
    """O_E[x] j; saturates under x when the charpoly is not integral."""
    if "L" in pair._cache:
        return pair._cache["L"]
    lat = hnf(pair.cyclic_basis)
    rounds = pair.ring.N if max_rounds is None else max_rounds
    for _ in range(rounds):
        image = mx.mul(pair.x, lat.basis)
        if all(lat.contains(col) for col in mx.columns(image)):
            pair._cache["L"] = lat
            return lat
        lat = lattice_sum(lat, hnf(image))
    raise SaturationError("x-saturation of j did not terminate")


def dual_span(pair: RSPair) -> Lattice:
    if "Lv" not in pair._cache:
        pair._cache["Lv"] = dual_lattice(span_lattice(pair), pair.space)
    return pair._cache["Lv"]


def is_sub_dual(pair: RSPair) -> bool:
    """L <= L^dual, i.e. the Gram matrix of L is integral."""
    try:
        L = span_lattice(pair)
    except SaturationError:
        return False
    return mx.is_integral(pair.space.pairing_matrix(L.basis))


def pair_quotient(pair: RSPair) -> FiniteQuotient | None:
    if not is_sub_dual(pair):
        return None
    if "Q" not in pair._cache:
        pair._cache["Q"] = quotient(span_lattice(pair), dual_span(pair))
    return pair._cache["Q"]


def _stabilizers(pair: RSPair, Q: FiniteQuotient, with_tau: bool) -> list:
    ops = [Q.linear_operator(pair.x)]
    if pair.group:
        ops.append(Q.linear_operator(pair.adjoint_x))
    if with_tau:
        ops.append(Q.semilinear_operator(pair.tau))
    return ops


def enumerate_M(pair: RSPair, cap: int = DEFAULT_CAP, strategy: str | None = None) -> list:
    """[(length over L, lattice)] for all members of M(x, j)."""
    Q = pair_quotient(pair)
    if Q is None:
        return []
    subs = enumerate_submodules(Q, _stabilizers(pair, Q, True), mode="stable", strategy=strategy, cap=cap)
    return [(s.length, Q.lattice_of(s)) for s in subs]


def _self_dual_candidates(pair: RSPair, cap: int, with_tau: bool) -> list:
    Q = pair_quotient(pair)
    if Q is None or Q.length % 2:
        return []
    half = Q.length // 2
    subs = enumerate_submodules(Q, _stabilizers(pair, Q, with_tau), mode="stable", cap=cap)
    out = []
    for s in subs:
        if s.length != half:
            continue
        lat = Q.lattice_of(s)
        if mx.is_integral(pair.space.pairing_matrix(lat.basis)):
            out.append(lat)
    return out


def enumerate_I(pair: RSPair, cap: int = DEFAULT_CAP) -> list:
    """Self-dual x-stable lattices between L and L^dual."""
    return _self_dual_candidates(pair, cap, with_tau=False)


def counting_sets(pair: RSPair, cap: int = DEFAULT_CAP) -> dict:
    """{i: |M(x, j)_i|}; empty when L is not inside its dual."""
    if "counts" not in pair._cache:
        pair._cache["counts"] = dict(sorted(Counter(i for i, _ in enumerate_M(pair, cap)).items()))
    return dict(pair._cache["counts"])


def orbital_series(pair: RSPair, cap: int = DEFAULT_CAP) -> LaurentSeries:
    return LaurentSeries.from_counts(counting_sets(pair, cap))


def orbital_value(pair: RSPair, cap: int = DEFAULT_CAP) -> int:
    return orbital_series(pair, cap).value_at_one()


def derived_orbital(pair: RSPair, cap: int = DEFAULT_CAP) -> int:
    """-sum_i (-1)^i i |M_i|."""
    return orbital_series(pair, cap).s_derivative()


def unitary_count(pair: RSPair, cap: int = DEFAULT_CAP) -> int:
    if "unitary" not in pair._cache:
        pair._cache["unitary"] = len(enumerate_I(pair, cap))
    return pair._cache["unitary"]


def dual_index_of_span(pair: RSPair) -> int | None:
    Q = pair_quotient(pair)
    return None if Q is None else Q.length


def results_json(pair: RSPair, cap: int = DEFAULT_CAP) -> dict:
    counts = counting_sets(pair, cap)
    series = LaurentSeries.from_counts(counts)
    return {"counts": {str(k): v for k, v in counts.items()}, "series": series.to_json(),
            "derived": series.s_derivative(), "unitary": unitary_count(pair, cap)}


# -- transfer factor and matching -----------------------------------------

def transfer_factor(gamma: mx.Matrix, u: Sequence[RingElem], ref: Lattice) -> tuple:
    """(l, Omega): l = vdet(span{gamma^i u}) - vdet(ref), Omega = (-1)^l.

    So l = len(ref / span) when span <= ref."""
    C = cyclic_matrix(gamma, u)
    if mx.det(C).is_zero():
        raise NotRegularSemisimple("gamma^i u do not span")
    span = hnf(C)
    l = index(ref, span)
    return l, (-1) ** (l % 2)


def series_with_transfer(series: LaurentSeries, l: int) -> LaurentSeries:
    return series.shift(l)


@dataclass(frozen=True)
class MatchInvariants:
    charpoly: tuple
    moments: tuple


def match_invariants(gamma: mx.Matrix, u: Sequence[RingElem], u_dual: Sequence[RingElem]) -> MatchInvariants:
    """Characteristic polynomial and the moments u_dual gamma^i u, 0 <= i < 2n."""
    n = len(gamma)
    if mx.det(cyclic_matrix(gamma, u)).is_zero():
        raise NotRegularSemisimple("gamma^i u do not span V")
    if mx.det(cyclic_matrix(mx.transpose(gamma), u_dual)).is_zero():
        raise NotRegularSemisimple("u_dual gamma^i do not span the dual")
    moments = []
    v = list(u)
    for _ in range(2 * n):
        moments.append(sum((a * b for a, b in zip(u_dual, v)), gamma[0][0].ring.zero()))
        v = mx.mat_vec(gamma, v)
    cp = mx.charpoly(gamma)
    return MatchInvariants(tuple(c.key() for c in cp), tuple(m.key() for m in moments))


def is_match(a: MatchInvariants, b: MatchInvariants) -> bool:
    return a.charpoly == b.charpoly and a.moments == b.moments


def is_rs_element(x: mx.Matrix, u: Sequence[RingElem], space: HermitianSpace) -> bool:
    """x^i u span V and J(u, x^i .) span the dual."""
    u_dual = mx.mat_vec(mx.transpose(space.gram), [a.sigma() for a in u])
    try:
        match_invariants(x, u, u_dual)
    except NotRegularSemisimple:
        return False
    return True
