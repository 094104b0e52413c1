import random

import pytest
from hypothesis import given, strategies as st

from afl_lattices import witt_frames as wf
from afl_lattices.local_rings import LocalFieldSpec


def ring(p=3, eis=None, k=1, f0=1):
    return wf.CoefficientRing(LocalFieldSpec(p, f0, eis, quadratic=False), k)


# -- oracle: W(F_p) truncated at m is Z / p^m ---------------------------------

def witt_to_int(w, p, m):
    """sum p^i [x_i] with Teichmueller lifts computed by plain integers."""
    P = p ** m
    total = 0
    for i, x in enumerate(w.coords[:m]):
        a = x[0] % p
        total += p ** i * pow(a, p ** (m - 1), P)
    return total % P


@pytest.mark.parametrize("p,m", [(3, 3), (3, 4), (5, 3)])
def test_witt_vectors_of_Fp_are_p_adic_integers(p, m):
    R = ring(p)
    W = wf.WittRing(R, "O", m)
    rng = random.Random(p * 10 + m)
    for _ in range(12):
        a = W.vec([R.from_int(rng.randrange(p)) for _ in range(m)])
        b = W.vec([R.from_int(rng.randrange(p)) for _ in range(m)])
        A, B = witt_to_int(a, p, m), witt_to_int(b, p, m)
        assert witt_to_int(a + b, p, m) == (A + B) % p ** m
        assert witt_to_int(a * b, p, m) == (A * B) % p ** m
        assert witt_to_int(a - b, p, m) == (A - B) % p ** m
        # F is the identity on W(F_p), V is multiplication by p
        assert witt_to_int(a.F(), p, m - 1) == A % p ** (m - 1)
        assert witt_to_int(a.V(), p, m) == (p * A) % p ** m


def test_classical_sum_polynomial():
    import sympy
    x0, x1, y0, y1 = sympy.symbols("x0 x1 y0 y1")
    polys = wf.structure_polys(3, 3, 2)
    s1 = polys["sum"][1].as_expr()
    assert sympy.expand(s1 - (x1 + y1 - x0 ** 2 * y0 - x0 * y0 ** 2)) == 0
    p1 = polys["prod"][1].as_expr()
    assert sympy.expand(p1 - (x0 ** 3 * y1 + x1 * y0 ** 3 + 3 * x1 * y1)) == 0


# -- properties over relative Witt vectors -----------------------------------------

EXTS = [None, (-3, 0, 1), (3, 3, 1)]


@given(st.sampled_from(EXTS), st.sampled_from(["O", "O'"]), st.integers(0, 10 ** 6))
def test_witt_ring_axioms_and_ghost_map(eis, over, seed):
    R = ring(3, eis, k=3)
    W = wf.WittRing(R, over, 3)
    rng = random.Random(seed)
    a, b, c = (W.random(rng) for _ in range(3))
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    assert a + W.zero() == a and a * W.one() == a
    # ghost map is a ring homomorphism on solved coordinates
    s = W.vec((a + b).coords)
    assert s.ghost() == [R.add(x, y) for x, y in zip(a.ghost(), b.ghost())]
    # F V = pi and V(x F y) = V(x) y
    assert a.V().F() == a * W.scalar(W.pi)
    assert (a * b.F()).V() == a.V() * b


@given(st.sampled_from(EXTS), st.integers(0, 10 ** 6))
def test_teichmuller_multiplicative_and_frobenius(eis, seed):
    R = ring(3, eis, k=3)
    W = wf.WittRing(R, "O", 3)
    rng = random.Random(seed)
    x, y = R.random(rng), R.random(rng)
    assert W.teichmuller(R.mul(x, y)) == W.teichmuller(x) * W.teichmuller(y)
    xq = x
    for _ in range(R.q - 1):
        xq = R.mul(xq, x)
    assert W.teichmuller(x).F() == W.teichmuller(xq)


def test_vinv_needs_ideal_elements():
    R = ring(3, (-3, 0, 1), k=3)
    W = wf.WittRing(R, "O", 3)
    with pytest.raises(wf.NotInImageOfV):
        W.one().Vinv()
    rng = random.Random(0)
    a = W.random(rng)
    assert a.V().Vinv().truncate(2) == a.truncate(2)


def test_unit_inverse():
    R = ring(5, (-5, 0, 1), k=3)
    W = wf.WittRing(R, "O", 3)
    rng = random.Random(4)
    for _ in range(5):
        a = W.random(rng) + W.one()
        if a.is_unit():
            assert a * a.inverse() == W.one()
    with pytest.raises(ZeroDivisionError):
        W.random_ideal(rng).inverse()


def test_coefficient_ring_limits():
    with pytest.raises(ValueError):
        wf.CoefficientRing(LocalFieldSpec(3), 2)
    with pytest.raises(ValueError):
        wf.CoefficientRing(LocalFieldSpec(5, quadratic=False), 12)
    with pytest.raises(ValueError):
        wf.WittRing(ring(), "O", 0)


# -- theta, kappa and frames ---------------------------------------------------------

@pytest.mark.parametrize("eis", [None, (-3, 0, 1), (3, 3, 1), (-3, 0, 0, 1)])
def test_theta_and_kappa(eis):
    spec = LocalFieldSpec(3, 1, eis, quadratic=False)
    R = wf.CoefficientRing(spec, wf.default_k(spec))
    T = wf.TensorRing(R, 4)
    theta = wf.lubin_tate_theta(T)
    assert (theta * T.delta()).in_witt_ideal()
    assert wf.theta_image_valuation(theta) == spec.e - 1
    kappa, cert = wf.lubin_tate_kappa(T, theta)
    assert cert.ok and kappa.is_unit()


def test_theta_one_fails_when_ramified():
    """Negative control: theta = 1 does not put theta * delta in O' (x) I."""
    spec = LocalFieldSpec(3, 1, (-3, 0, 1), quadratic=False)
    T = wf.TensorRing(wf.CoefficientRing(spec, 4), 4)
    assert not (T.one() * T.delta()).in_witt_ideal()


def test_witt_frame_is_the_unramified_lubin_tate_frame():
    R = ring(5, None, k=4)
    rep = wf.witt_frame_as_lubin_tate(R, 4, random.Random(0))
    assert rep.verdict, rep.diagnostic
    W = wf.WittRing(R, "O", 4)
    eps = (W.scalar(W.pi) - W.teichmuller(R.pi_prime)).Vinv()
    # eps = 1 mod pi in the first coordinate
    assert not R.is_unit(R.add(eps.coords[0], R.from_int(-1)))


def test_wrong_dual_and_wrong_epsilon_are_caught(monkeypatch):
    spec = LocalFieldSpec(3, 1, (-3, 0, 1), quadratic=False)
    T = wf.TensorRing(wf.CoefficientRing(spec, 4), 4)
    lt = wf.LTFrame(T)
    rng = random.Random(1)
    win = wf.random_window(lt, 2, 1, rng)
    assert wf.pairing_check(win, rng).verdict
    # inverse without the transpose, and a fixed mask: not the dual
    fake = wf.Window(lt, wf.mat_inverse(win.Phi, lt.one(), lt.zero()), (False, True), False)
    orig = wf.Window.dual
    with monkeypatch.context() as m:
        m.setattr(wf.Window, "dual", lambda self: fake if self is win else orig(self))
        assert not wf.pairing_check(win, rng).verdict
    with pytest.raises(wf.FrameError):
        wf.epsilon_twist_check(win, lt.random_unit(rng), lt.random_unit(rng), rng)


def test_one_extension_full_check():
    spec = LocalFieldSpec(3, 1, (-3, 0, 1), quadratic=False)
    reps = wf.witt_check(spec, seed=3)
    bad = [(r.identity, r.diagnostic) for r in reps if not r.verdict]
    assert not bad
    names = {r.identity for r in reps}
    assert {"witt_identities", "theta_properties", "kappa_unit", "frame_relation", "frobenius_round_trip",
            "dual_pairing", "epsilon_twist", "alpha_strict"} <= names
