import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frozen_oracle import FROZEN
from fusionkit.catalog import build_group, default_catalog, direct_product, enumerated
from fusionkit.errors import ConfigError
from fusionkit.fusion import (aut_F, build_fusion, centralizer_subsystem, centric_radical, chain_criterion,
                              direct_factorization, essential_subgroups, focal_and_hyperfocal,
                              focal_subgroup, focal_via_ambient, hom_F, hyperfocal_subgroup,
                              is_centric, is_constrained, is_normal_in_F, is_parabolic_char_p,
                              is_radical, largest_normal_subgroup, minimal_subsystems,
                              normalizer_subsystem, op_index_check, quotient_system, saturation_audit,
                              strongly_closed, strongly_closed_subgroupwise, strongly_p_embedded,
                              subsystem_isomorphic, verify_alperin_goldschmidt)
from fusionkit.group import EnumeratedGroup, center, conjugacy_class, sylow_subgroup
from fusionkit.pgroup import HOLDS, PRECONDITION, FAILS, commutator_subgroup

ROOT = Path(__file__).resolve().parents[1]


def inner(spec):
    """F_S(S) for a 2-group given by spec."""
    G = enumerated(spec)
    return build_fusion(G, 2, G.whole())


def engine_profile(spec, F):
    rows = sorted((P.order, F.aut(P).order, len(F.hom_to_S(P)), is_centric(F, P), strongly_closed(F, P))
                  for P in F.subgroups)
    G = enumerated(spec)
    invs = np.flatnonzero(G.element_orders == 2)
    return {
        "order": G.n,
        "sylow": F.S.n,
        "subgroups": len(F.subgroups),
        "rows": rows,
        "essentials": sorted((r.subgroup.order, len(r.members)) for r in essential_subgroups(F)),
        "focal": focal_subgroup(F).order,
        "involution_class_sizes": sorted({len(conjugacy_class(G, int(x))) for x in invs}),
    }


# -- against the frozen brute-force oracle ---------------------------------------------

@pytest.mark.parametrize("spec", sorted(FROZEN))
def test_matches_frozen_oracle(spec, fusion):
    assert engine_profile(spec, fusion(spec)) == FROZEN[spec]


@pytest.mark.parametrize("spec", ["builtin:sym:3", "builtin:sym:4", "builtin:dihedral:8"])
def test_oracle_reproduces_frozen_data(spec):
    sys.path.insert(0, str(ROOT / "tools"))
    try:
        import freeze_oracle
    finally:
        sys.path.pop(0)
    assert freeze_oracle.profile(freeze_oracle.GROUPS[spec]()) == FROZEN[spec]


# -- construction and morphism sets ---------------------------------------------------

def test_inner_fusion_is_aut_S():
    F = inner("builtin:dihedral:8")
    from fusionkit.group import centralizer, normalizer
    for P in F.subgroups:
        assert F.aut(P).order == normalizer(F.S, P).order // centralizer(F.S, P).order
    assert essential_subgroups(F) == []


def test_sym6_fusion_on_d8_times_c2(fusion):
    from fusionkit.isomorphism import isomorphism_test
    F = fusion("builtin:sym:6")
    DC = EnumeratedGroup.from_perm_group(direct_product(build_group("builtin:dihedral:8"),
                                                        build_group("builtin:sym:2")))
    assert isomorphism_test(F.S, DC) is not None


def test_aut_F_examples(fusion):
    F = fusion("builtin:psl3:2")
    assert len(aut_F(F, F.subgroups[0])) == 1
    fours = [P for P in F.subgroups if P.order == 4 and P.is_abelian()
             and all(F.S.element_orders[P.members] <= 2)]
    assert [F.aut(P).order for P in fours] == [6, 6]


def test_aut_F_psl34_on_A(fusion):
    from fusionkit.group import SubgroupHandle, centralizer, normalizer
    from fusionkit.pgroup import max_elementary_abelian
    F = fusion("builtin:psl3:4")
    G, SG = F.ambient, F.sylow
    for A in max_elementary_abelian(F.S, 2):
        H = SubgroupHandle(G, SG.members[A.members])
        assert F.aut(A).order == normalizer(G, H).order // centralizer(G, H).order
        assert F.aut(A).order == 60                  # N_G(A) is a point stabilizer 2^4:SL2(4)


def test_hom_F_examples(fusion):
    F = fusion("builtin:alt:6")
    S = F.whole
    assert hom_F(F, S, F.subgroups[0]) == []
    assert len(hom_F(F, S, S)) == F.aut(S).order
    z = int(center(F.S).members[1])
    P = F.canonical([0, z])
    # one G-class of involutions, so <z> maps onto every involution of S
    assert len(F.hom(P, S)) == int(np.sum(F.S.element_orders == 2))


@given(st.sampled_from(["builtin:sym:4", "builtin:psl3:2", "builtin:alt:6"]), st.data())
@settings(max_examples=25)
def test_hom_sets_compose(spec, data):
    F = build_fusion_cached(spec)
    P = data.draw(st.sampled_from(F.subgroups))
    rows = F.hom_to_S(P)
    assert any(np.array_equal(r, P.members) for r in rows)           # inclusion present
    A = F.aut(P)
    # Inn(P) <= Aut_F(P)
    inn = {F.conj_table[x][P.members].astype(np.int64).tobytes() for x in P.members}
    have = {r.astype(np.int64).tobytes() for r in A.rows}
    assert inn <= have
    # Aut_F(P) is closed under composition
    for a in A.rows[:4]:
        for b in A.rows[:4]:
            pos = np.searchsorted(P.members, a)
            assert b[pos].astype(np.int64).tobytes() in have


def build_fusion_cached(spec):
    from fusionkit.fusion import fusion_of
    return fusion_of(spec)


# -- strongly p-embedded detection -----------------------------------------------------

def test_strongly_embedded_sym3():
    cert = strongly_p_embedded(enumerated("builtin:sym:3"), 2)
    assert cert is not None and cert.verify(2)
    assert cert.subgroup.order == 2


def test_strongly_embedded_p_group():
    assert strongly_p_embedded(enumerated("builtin:dihedral:8"), 2) is None


def test_strongly_embedded_sl24():
    cert = strongly_p_embedded(enumerated("builtin:psl2:4"), 2)
    assert cert is not None and cert.verify(2)
    assert cert.subgroup.order == 12                              # a Borel subgroup


def test_strongly_embedded_brute_force():
    import oracle as O
    for spec in ["builtin:sym:3", "builtin:sym:4", "builtin:alt:4", "builtin:alt:5", "builtin:dihedral:8"]:
        X = enumerated(spec)
        tup = frozenset(tuple(r) for r in X.elements.tolist())
        assert (strongly_p_embedded(X, 2) is not None) == O.has_strongly_embedded(tup, 2)


# -- essentials, centric, radical -------------------------------------------------------

def test_centric_examples(fusion):
    F = fusion("builtin:psl3:2")
    assert is_centric(F, F.whole)
    assert not is_centric(F, center(F.S))


def test_essential_structure_on_corpus(fusion):
    for spec in ["builtin:sym:4", "builtin:psl3:2", "builtin:alt:6", "builtin:sym:6"]:
        F = fusion(spec)
        cr = {P.key for P in centric_radical(F)}
        for rec in essential_subgroups(F):
            assert is_centric(F, rec.subgroup) and is_radical(F, rec.subgroup)
            assert rec.subgroup.key in cr
            assert rec.witness.verify(2)
            assert F.is_fully_normalized(rec.subgroup)


@pytest.mark.slow
def test_essentials_psl34(fusion):
    from fusionkit.pgroup import max_elementary_abelian
    F = fusion("builtin:psl3:4")
    ess = essential_subgroups(F)
    assert {r.subgroup.key for r in ess} == {A.key for A in max_elementary_abelian(F.S, 2)}
    for A in max_elementary_abelian(F.S, 2):
        assert is_centric(F, A) and is_radical(F, A)


def test_alperin_goldschmidt_small(fusion):
    for spec in ["builtin:sym:4", "builtin:psl3:2", "builtin:alt:6", "builtin:sym:6"]:
        rep = verify_alperin_goldschmidt(fusion(spec))
        assert rep.holds and rep.checked > 0
    assert verify_alperin_goldschmidt(inner("builtin:dihedral:8")).holds


def test_saturation_audit(fusion):
    for F in [inner("builtin:dihedral:8"), fusion("builtin:psl3:2"), fusion("builtin:sym:6")]:
        assert saturation_audit(F).passed


# -- strong closure and O_p ----------------------------------------------------------

def test_strongly_closed_examples(fusion):
    F = fusion("builtin:psl3:2")
    assert strongly_closed(F, F.whole)
    assert not strongly_closed(F, center(F.S))
    F6 = fusion("builtin:sym:6")
    even = F6.canonical([i for i in range(F6.S.n)
                         if _is_even(F6.ambient.elements[F6.sylow.members[i]])])
    assert even.order == 8 and strongly_closed(F6, even)


def _is_even(perm):
    seen, sign = set(), 0
    for i in range(len(perm)):
        j, length = i, 0
        while j not in seen:
            seen.add(j)
            j = perm[j]
            length += 1
        sign += max(length - 1, 0)
    return sign % 2 == 0


def test_strongly_closed_two_definitions_agree(fusion):
    for spec in ["builtin:sym:4", "builtin:psl3:2", "builtin:sym:6"]:
        F = fusion(spec)
        for Q in F.subgroups:
            assert strongly_closed(F, Q) == strongly_closed_subgroupwise(F, Q)


def test_largest_normal_subgroup_examples(fusion):
    F = inner("builtin:dihedral:8")
    assert largest_normal_subgroup(F) == F.whole
    S4 = fusion("builtin:sym:4")
    O2 = largest_normal_subgroup(S4)
    assert O2.order == 4 and all(S4.S.element_orders[O2.members] <= 2)
    assert largest_normal_subgroup(fusion("builtin:psl3:2")).order == 1


def test_largest_normal_in_every_centric_radical(fusion):
    for spec in ["builtin:sym:4", "builtin:sym:6", "builtin:psl3:2"]:
        F = fusion(spec)
        Q = largest_normal_subgroup(F)
        assert strongly_closed(F, Q)
        assert all(Q <= P for P in centric_radical(F))


@pytest.mark.parametrize("spec", ["builtin:dihedral:8", "builtin:sym:4", "builtin:psl3:2", "builtin:alt:6"])
def test_abelian_strongly_closed_iff_normal(spec, fusion):
    F = inner(spec) if spec == "builtin:dihedral:8" else fusion(spec)
    for Q in F.subgroups:
        if Q.is_abelian():
            assert strongly_closed(F, Q) == is_normal_in_F(F, Q)


def test_constrained(fusion):
    assert is_constrained(inner("builtin:dihedral:8"))
    assert is_constrained(fusion("builtin:sym:4"))
    assert not is_constrained(fusion("builtin:psl3:2"))


# -- local subsystems ------------------------------------------------------------------

def test_normalizer_of_S(fusion):
    F = fusion("builtin:psl3:2")
    N = normalizer_subsystem(F, F.whole).system
    assert N.aut(N.whole).order == F.aut(F.whole).order
    assert essential_subgroups(N) == []


def test_centralizer_of_central_involution(fusion):
    F = fusion("builtin:psl3:2")
    z = int(center(F.S).members[1])
    C = centralizer_subsystem(F, z).system
    assert C.S.n == 8
    assert largest_normal_subgroup(C) == C.whole              # C_G(z) = S


def test_normalizer_of_center_psp42():
    F = build_fusion_cached("builtin:psp4:2")
    N = normalizer_subsystem(F, center(F.S)).system
    assert largest_normal_subgroup(N).order > 1
    assert saturation_audit(N).passed


def test_normalizer_substitutes_fully_normalized(fusion):
    F = fusion("builtin:sym:4")
    for Q in F.subgroups:
        loc = normalizer_subsystem(F, Q)
        assert loc.substituted == (not F.is_fully_normalized(Q))


def test_parabolic_sym4(fusion):
    assert is_parabolic_char_p(fusion("builtin:sym:4"))


# -- quotients ---------------------------------------------------------------------------

def test_quotient_inner_is_trivial():
    F = inner("builtin:dihedral:8")
    Q = quotient_system(F, F.whole)
    assert Q.S.n == 1


def test_quotient_sym4_by_fours(fusion):
    F = fusion("builtin:sym:4")
    Q = quotient_system(F, largest_normal_subgroup(F))
    assert Q.S.n == 2
    assert saturation_audit(Q).passed
    assert largest_normal_subgroup(Q) == Q.whole


def test_quotient_requires_normal(fusion):
    F = fusion("builtin:psl3:2")
    with pytest.raises(ConfigError):
        quotient_system(F, center(F.S))


# Sym(4)/V4 lives on C2, where the whole support is always normal; Sym(6) has
# O_2(F) = 1, so its quotient is F again
QUOTIENT_CORE = {"builtin:sym:4": 2, "builtin:sym:6": 1}


@pytest.mark.parametrize("spec", ["builtin:sym:4", "builtin:sym:6"])
def test_quotient_by_core_has_core_image(spec, fusion):
    F = fusion(spec)
    O2 = largest_normal_subgroup(F)
    Q = quotient_system(F, O2)
    assert largest_normal_subgroup(Q).order == QUOTIENT_CORE[spec]


# -- focal and hyperfocal ----------------------------------------------------------------

@pytest.mark.parametrize("spec", ["builtin:sym:4", "builtin:psl3:2", "builtin:alt:6", "builtin:sym:6",
                                  "builtin:psl2:8"])
def test_focal_two_routes(spec, fusion):
    F = fusion(spec)
    assert focal_subgroup(F) == focal_via_ambient(F)


def test_focal_inner_is_derived():
    from fusionkit.group import derived_subgroup
    F = inner("builtin:quaternion:16")
    assert focal_subgroup(F) == F.canonical(derived_subgroup(F.S).members)


def test_hyperfocal_examples(fusion):
    F6 = fusion("builtin:sym:6")
    foc, hyp = focal_and_hyperfocal(F6)
    assert hyp.order == 8 and F6.S.n == 16
    F = fusion("builtin:psl3:2")
    assert focal_subgroup(F) == hyperfocal_subgroup(F) == F.whole


# -- minimal subsystems and isomorphism -----------------------------------------------------

def test_op_of_sym6_is_alt6(fusion):
    m = minimal_subsystems(fusion("builtin:sym:6"))
    assert m.op_support.order == 8
    assert op_index_check(fusion("builtin:sym:6"), m.op, m.op_support)[0]
    assert subsystem_isomorphic(m.op, fusion("builtin:alt:6")) is not None


def test_fusion_isomorphism_alt6_psl32(fusion):
    A, L = fusion("builtin:alt:6"), fusion("builtin:psl3:2")
    phi = subsystem_isomorphic(A, L)
    assert phi is not None and phi.method == "full"
    assert subsystem_isomorphic(A, inner("builtin:dihedral:8")) is None
    assert subsystem_isomorphic(A, A) is not None
    # transitivity on the triple
    assert subsystem_isomorphic(L, A) is not None
    assert subsystem_isomorphic(L, inner("builtin:dihedral:8")) is None


# -- factorization and chains --------------------------------------------------------------

def test_direct_factorization_simple(fusion):
    f = direct_factorization(fusion("builtin:psl3:2"))
    assert len(f.factors) == 1


def test_direct_factorization_product():
    L = build_group("builtin:psl3:2")
    F = build_fusion(direct_product(L, L), 2)
    f = direct_factorization(F)
    assert len(f.factors) == 2
    for _, sub in f.factors:
        assert sub.S.n == 8
        assert len(essential_subgroups(sub)) == 2
    assert any(d.verified for d in f.decompositions)


def test_direct_factorization_inner_fours():
    V = enumerated("builtin:dihedral:4")
    F = build_fusion(V, 2, V.whole())
    f = direct_factorization(F)
    assert all(d.verified for d in f.decompositions) and len(f.factors) == 2


def test_chain_criterion_examples(fusion):
    F = fusion("builtin:psl3:2")
    ess = essential_subgroups(F)
    E = ess[0].subgroup
    chain = [F.subgroups[0], E]
    v = chain_criterion(F, E, chain, E)
    assert v.status == HOLDS and v.conclusion
    assert chain_criterion(F, F.subgroups[0], [F.subgroups[0]], E).status == PRECONDITION


@pytest.mark.parametrize("spec", ["builtin:sym:4", "builtin:psl3:2", "builtin:alt:6", "builtin:sym:6"])
def test_chain_criterion_sweep(spec, fusion):
    F = fusion(spec)
    normal = [Q for Q in F.subgroups if Q.is_normal_in(F.whole)]
    for E in centric_radical(F):
        Z = F.canonical(center(F.S, E).members)
        chain = [F.subgroups[0], Z, E] if 1 < Z.order < E.order else [F.subgroups[0], E]
        for Q in normal:
            v = chain_criterion(F, E, chain, Q)
            assert v.status != FAILS
