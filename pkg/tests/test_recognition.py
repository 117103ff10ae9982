import numpy as np
import pytest

from fusionkit.catalog import enumerated
from fusionkit.fusion import (build_fusion, classify_known, essential_module, essential_subgroups,
                              gg_classify, identify_natural_sl2)
from fusionkit.group import EnumeratedGroup
from fusionkit.perm import PermGroup
from fusionkit.pgroup import max_elementary_abelian


def fours_group():
    return EnumeratedGroup.from_perm_group(PermGroup([(1, 0, 3, 2), (2, 3, 0, 1)], degree=4))


def sym3_on_fours(trivial=False):
    """Sym(3) permuting the three involutions of V4 (or acting trivially)."""
    L = enumerated("builtin:sym:3")
    W = fours_group()
    rows = []
    for perm in L.elements.tolist():
        rows.append([0, 1, 2, 3] if trivial else [0] + [perm[i] + 1 for i in range(3)])
    return L, W, np.array(rows)


def test_natural_module_sl22():
    L, W, act = sym3_on_fours()
    cert = identify_natural_sl2(L, W, act)
    assert cert is not None and cert.q == 2
    assert cert.kernel_order == 1 and cert.fixed_points_ok


def test_trivial_action_is_not_natural():
    L, W, act = sym3_on_fours(trivial=True)
    assert identify_natural_sl2(L, W, act) is None


def test_action_shape_checked():
    L, W, act = sym3_on_fours()
    with pytest.raises(ValueError):
        identify_natural_sl2(L, W, act[:3])


@pytest.mark.slow
def test_psp44_essential_is_natural_sl24(fusion):
    F = fusion("builtin:psp4:4")
    for rec in essential_subgroups(F):
        cert = essential_module(F, rec.subgroup)
        assert cert is not None and cert.q == 4
        assert cert.fixed_order == 4                      # C_A(L) of order q


def test_psl32_fours_groups_natural_sl22(fusion):
    F = fusion("builtin:psl3:2")
    certs = [essential_module(F, r.subgroup) for r in essential_subgroups(F)]
    assert [c.q for c in certs] == [2, 2]


# -- known systems ----------------------------------------------------------------------

def test_classify_known_psl34(fusion):
    rep = classify_known(fusion("builtin:psl3:4"))
    assert rep.tag == "PSL3(4)" and rep.precondition
    assert rep.essentials_are_max_elementary
    assert sorted(o for o, _ in rep.essentials) == [16, 16]


def test_classify_known_sym6(fusion):
    rep = classify_known(fusion("builtin:sym:6"))
    assert rep.tag == "PSp4(2)"
    assert rep.notes["O^p(F) ~ F(Alt(6))"]


def test_classify_known_inner_dihedral():
    D = enumerated("builtin:dihedral:8")
    rep = classify_known(build_fusion(D, 2, D.whole()))
    assert rep.tag == "none" and not rep.precondition


def test_classify_known_psl32(fusion):
    rep = classify_known(fusion("builtin:psl3:2"))
    assert rep.tag == "PSL3(2)" and rep.shape == "dihedral8"


# -- the class-two taxonomy ---------------------------------------------------------------

@pytest.mark.parametrize("spec,tag", [
    ("builtin:psl2:8", "abelian-i"),
    ("builtin:psl3:2", "dih8-ii"),
    ("builtin:alt:6", "dih8-ii"),
    ("builtin:sym:8", "classtoobig"),
])
def test_gg_classify_small(spec, tag):
    assert gg_classify(spec).tag == tag


def test_gg_psl34(fusion):
    rep = gg_classify("builtin:psl3:4")
    assert (rep.tag, rep.shape, rep.nilpotency_class) == ("rank2-iii", "sylowPSL3(4)", 2)
    assert rep.cross_check


@pytest.mark.slow
@pytest.mark.parametrize("spec,shape", [("builtin:sz:8", "suzuki(8)"), ("builtin:psu3:4", "sylowPSU3(4)"),
                                        ("builtin:psp4:4", "sylowPSp4(4)")])
def test_gg_rank2(spec, shape):
    rep = gg_classify(spec)
    assert (rep.tag, rep.shape) == ("rank2-iii", shape)
    assert rep.cross_check


def test_max_elementary_abelian_of_psl34_are_essential(fusion):
    F = fusion("builtin:psl3:4")
    assert {r.subgroup.key for r in essential_subgroups(F)} == {A.key for A in max_elementary_abelian(F.S, 2)}
