import pytest
from hypothesis import given, strategies as st

from afl_lattices.local_rings import (LocalFieldSpec, PrecisionError, RingSpecError, elem_from_json,
                                      galois_modulus, is_prime, make_ring, vp_int)

SPECS = [
    LocalFieldSpec(3),
    LocalFieldSpec(5),
    LocalFieldSpec(3, 2),
    LocalFieldSpec(3, 1, (-3, 0, 1)),
    LocalFieldSpec(5, 1, (5, 5, 0, 1)),
    LocalFieldSpec(3, quadratic=False),
    LocalFieldSpec(3, 1, (-3, 0, 1), quadratic=False),
]

spec_st = st.sampled_from(SPECS)


def _elem(R, data, unit=False):
    x = R.elem(data[: R.size] + [0] * max(0, R.size - len(data)))
    if unit and x.valuation() != 0:
        x = x + R.one()
    return x


@st.composite
def ring_and_elems(draw, count=3):
    spec = draw(spec_st)
    R = make_ring(spec, draw(st.integers(4, 10)))
    bound = R.P
    xs = [_elem(R, draw(st.lists(st.integers(0, bound - 1), min_size=R.size, max_size=R.size)))
          for _ in range(count)]
    return R, xs


# -- oracle: Z/p^N --------------------------------------------------------

@pytest.mark.parametrize("p", [3, 5, 7])
def test_unramified_degree_one_is_integers_mod_pN(p):
    N = 6
    R = make_ring(LocalFieldSpec(p, quadratic=False), N)
    mod = p ** N
    for a in range(-40, 40, 7):
        for b in range(1, 90, 11):
            A, B = R.from_int(a), R.from_int(b)
            assert (A * B).c == R.from_int(a * b % mod).c
            assert (A + B).c == R.from_int((a + b) % mod).c
            if a % mod:
                assert A.valuation() == vp_int(a % mod, p)


def test_gaussian_integers_oracle():
    # p = 3: -1 is a non-square, so O_E = Z_3[i]; multiply (a+bi)(c+di) by hand
    R = make_ring(LocalFieldSpec(3), 5)
    i = R.trace_zero_unit()
    sq = i * i
    assert sq.is_sigma_fixed() and sq.valuation() == 0
    pairs = [(1, 2, 4, 7), (5, 0, 2, 3), (11, 13, 17, 19)]
    for a, b, c, d in pairs:
        x = R.from_int(a) + R.from_int(b) * i
        y = R.from_int(c) + R.from_int(d) * i
        expect = R.from_int(a * c) + R.from_int(b * d) * sq + R.from_int(a * d + b * c) * i
        assert x * y == expect
        assert x.sigma() == R.from_int(a) - R.from_int(b) * i


def test_residue_field_sizes():
    assert make_ring(LocalFieldSpec(3), 4).residue_size == 9
    assert make_ring(LocalFieldSpec(5, 2), 4).residue_size == 625
    assert make_ring(LocalFieldSpec(3, 1, (-3, 0, 1)), 4).residue_size == 9
    assert make_ring(LocalFieldSpec(3, quadratic=False), 4).residue_size == 3


@pytest.mark.parametrize("p,d", [(3, 2), (3, 4), (5, 2), (5, 4), (7, 3)])
def test_galois_modulus_irreducible_by_root_count(p, d):
    m = galois_modulus(p, d)
    assert len(m) == d + 1 and m[-1] % p == 1
    # no roots in F_p
    for r in range(p):
        assert sum(c * pow(r, i, p) for i, c in enumerate(m)) % p != 0


def test_is_prime_small():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


# -- validation ------------------------------------------------------------

@pytest.mark.parametrize("kwargs", [
    dict(p=2), dict(p=4), dict(p=3, f0=0), dict(p=3, eis=(-9, 0, 1)), dict(p=3, eis=(-3, 1, 1)),
    dict(p=3, eis=(-3, 0, 2)),
])
def test_bad_specs_rejected(kwargs):
    with pytest.raises(RingSpecError):
        make_ring(LocalFieldSpec(**kwargs), 8)


def test_precision_floor():
    with pytest.raises(PrecisionError):
        make_ring(LocalFieldSpec(3), 1)


def test_spec_json_round_trip():
    for spec in SPECS:
        assert LocalFieldSpec.from_json(spec.to_json(12)) == spec


def test_elem_json_round_trip_and_errors():
    R = make_ring(LocalFieldSpec(3, 1, (-3, 0, 1)), 8)
    x = R.pi_power(-3) * (R.gen() + R.from_int(2))
    assert elem_from_json(R, x.to_json()) == x
    assert elem_from_json(R, 7) == R.from_int(7)
    for bad in [{"coords": "x"}, {"denom": -1, "coords": [1]}, {"coords": [0] * 99}, [1, 2]]:
        with pytest.raises(RingSpecError):
            elem_from_json(R, bad)


# -- properties --------------------------------------------------------------

@given(ring_and_elems())
def test_ring_axioms(data):
    R, (a, b, c) = data
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a - a == R.zero()


@given(ring_and_elems(count=2))
def test_sigma_is_an_involutive_automorphism(data):
    R, (a, b) = data
    if not R.spec.quadratic:
        return
    assert a.sigma().sigma() == a
    assert (a * b).sigma() == a.sigma() * b.sigma()
    assert (a + b).sigma() == a.sigma() + b.sigma()
    assert a.norm().is_sigma_fixed() and a.trace().is_sigma_fixed()


@given(ring_and_elems(count=2))
def test_valuation_additive_and_inverse(data):
    R, (a, b) = data
    va, vb = a.valuation(), b.valuation()
    if va + vb < R.N:
        assert (a * b).valuation() == va + vb
    if va == 0:
        assert a * a.inverse() == R.one()


@given(ring_and_elems(count=1), st.integers(0, 6))
def test_fractional_elements(data, k):
    R, (a,) = data
    if a.valuation() != 0 or k >= R.N:  # pi^k vanishes at precision N
        return
    f = a * R.pi_power(-k)
    assert f.valuation() == -k
    back = f * R.pi_power(k)
    if R.e == 1:
        assert back == a
    else:
        # dividing by pi gives up the top pi-adic digit
        assert (back - a).valuation() >= R.N - k


@given(spec_st)
def test_norm_one_residues(spec):
    if not spec.quadratic:
        return
    R = make_ring(spec, 6)
    reps = R.norm_one_residues()
    assert len(reps) == R.q + 1
    assert all((u.norm() - R.one()).valuation() >= 1 for u in reps)
    assert len({R.residue(u.c) for u in reps}) == R.q + 1


@given(spec_st)
def test_teichmuller_is_multiplicative(spec):
    R = make_ring(spec, 6)
    g = R.gen() + R.one()
    h = R.gen() * R.from_int(2) + R.from_int(1)
    if g.valuation() or h.valuation():
        return
    assert R.teichmuller(g * h) == R.teichmuller(g) * R.teichmuller(h)
    t = R.teichmuller(g)
    assert t ** (R.residue_size) == t
