import pytest

from afl_lattices import matrices as mx
from afl_lattices.hermitian import Parity, parity
from afl_lattices.local_rings import LocalFieldSpec
from afl_lattices.orbital import is_sub_dual, pair_quotient
from afl_lattices.reductions import (CheckReport, ExtensionError, InstanceProfile, ProfileError, base_change_compare,
                                     block_extension, check_block_reduction, check_extension, check_product, digest,
                                     fl_check, gen_instance, gen_subfield_instance, group_extension,
                                     split_idempotents, vanishing_check)


@pytest.mark.parametrize("p,f0,n", [(3, 1, 1), (3, 2, 2), (5, 1, 3)])
@pytest.mark.parametrize("par", [Parity.ODD, Parity.EVEN])
def test_generator_honours_profile(p, f0, n, par):
    prof = InstanceProfile(p, f0, n, par, seed=7)
    pair = gen_instance(prof)
    assert parity(pair.space) is par
    assert pair.n == n and pair.ring.p == p and pair.ring.spec.f0 == f0
    assert is_sub_dual(pair)
    assert pair_quotient(pair).size <= prof.cap
    again = gen_instance(prof)
    assert digest(pair.to_json()) == digest(again.to_json())


def test_generator_reports_impossible_profiles():
    with pytest.raises(ProfileError):
        gen_instance(InstanceProfile(3, 1, 2, Parity.ODD, cap=1))


def test_digest_is_canonical():
    assert digest({"b": 1, "a": [1, 2]}) == digest({"a": [1, 2], "b": 1})
    assert digest({"a": 1}) != digest({"a": 2})


def test_report_json_shape():
    rep = CheckReport("x", 1, 1, True, [24, 28], 5, "abc")
    out = rep.to_json()
    assert out["verdict"] == "pass" and out["precisions"] == [24, 28]
    assert set(out) == {"identity", "inputs_digest", "lhs", "rhs", "verdict", "precisions", "millis", "diagnostic"}


def test_checks_refuse_wrong_parity():
    even = gen_instance(InstanceProfile(3, 1, 2, Parity.EVEN, seed=0))
    odd = gen_instance(InstanceProfile(3, 1, 2, Parity.ODD, seed=0))
    with pytest.raises(ValueError):
        vanishing_check(even)
    with pytest.raises(ValueError):
        fl_check(odd)


@pytest.mark.parametrize("seed", range(3))
def test_vanishing_and_fl_small(seed):
    odd = vanishing_check(gen_instance(InstanceProfile(3, 1, 2, Parity.ODD, seed=seed)))
    assert odd.verdict, odd.diagnostic
    assert odd.lhs["O"] == 0 and odd.rhs["fixed_points"] == 0
    even = fl_check(gen_instance(InstanceProfile(3, 1, 2, Parity.EVEN, seed=seed)))
    assert even.verdict, even.diagnostic
    assert even.precisions[1] == even.precisions[0] + 4


@pytest.mark.parametrize("par", [Parity.ODD, Parity.EVEN])
def test_split_factors_cover_the_space(par):
    pair = gen_instance(InstanceProfile(3, 1, 3, par, structure="split", seed=1))
    factors = split_idempotents(pair)
    assert sum(fp.n for fp, _ in factors) == 3
    odd = sum(pp is Parity.ODD for _, pp in factors)
    assert (odd % 2 == 1) == (par is Parity.ODD)
    rep = check_product(pair)
    assert rep.verdict, rep.diagnostic


def test_block_extension_shape():
    pair = gen_instance(InstanceProfile(3, 1, 2, Parity.ODD, seed=2))
    ext = block_extension(pair)
    assert ext.n == 3
    assert mx.close(ext.adjoint_x, mx.scale(ext.x, ext.ring.from_int(-1)), ext.slack)
    assert check_block_reduction(pair).verdict
    assert check_extension(pair).verdict


def test_group_extension_negative_control():
    """An a with P(a) not a unit breaks the bijection; the check must notice."""
    pair = gen_instance(InstanceProfile(3, 1, 2, Parity.ODD, mode="group", seed=0, min_jj_valuation=1))
    assert check_extension(pair).verdict
    R = pair.ring
    cp = mx.charpoly(pair.x)

    def P(a):
        acc = R.zero()
        for c in reversed(cp):
            acc = acc * a + c
        return acc

    bad = [a for a in R.norm_one_residues() if P(a).valuation() >= 1]
    if not bad:
        pytest.skip("every norm-one residue is admissible for this instance")
    try:
        rep = check_extension(pair, bad[0])
    except ExtensionError:
        return
    assert not rep.verdict


def test_group_extension_needs_group_mode():
    pair = gen_instance(InstanceProfile(3, 1, 2, Parity.ODD, seed=0))
    with pytest.raises(ExtensionError):
        group_extension(pair)


def test_base_change_worked_example():
    # A0/E0 unramified of degree 3, n' = 1, J^A = (pi_A)
    inst = gen_subfield_instance(3, 1, LocalFieldSpec(3, 3), 1, 1, seed=0)
    rep = base_change_compare(inst)
    assert rep.verdict, rep.diagnostic
    assert rep.lhs["dO"] == 3 and rep.rhs["f_dO_A"] == 3
    assert rep.rhs["counts_A"] == {"0": 1, "1": 1}
    assert rep.lhs["counts"] == {"0": 1, "3": 1}


def test_base_change_recheck_rebuilds_from_seed():
    inst = gen_subfield_instance(3, 1, LocalFieldSpec(3, 3), 2, 1, seed=0)
    again = inst.recipe(inst.pair.ring.N + 4)
    assert again.pair.ring.N == inst.pair.ring.N + 4
    assert base_change_compare(inst).verdict
