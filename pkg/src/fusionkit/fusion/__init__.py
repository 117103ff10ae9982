"""Fusion systems F_S(G) and their local structure."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from ..group import EnumeratedGroup, GroupMorphism, SubgroupHandle
from ..perm import PermGroup
from .local import (EmbeddingCertificate, EssentialRecord, center_of_system, centralizer_subsystem,
                    centric_radical, essential_subgroups, generated_by, is_centric, is_constrained,
                    is_normal_in_F, is_parabolic_char_p, is_radical, largest_normal_subgroup,
                    normalizer_subsystem, strongly_closed, strongly_closed_subgroupwise,
                    strongly_p_embedded, verify_alperin_goldschmidt)
from .structure import (chain_criterion, direct_factorization, equals_on_generators,
                        focal_and_hyperfocal, focal_subgroup, focal_via_ambient,
                        hyperfocal_subgroup, minimal_subsystems, op_index_check,
                        op_prime_subsystem, op_subsystem, quotient_system, saturation_audit,
                        subsystem_isomorphic)
from .system import (FusionSystem, GeneratedFusion, GroupFusion, QuotientFusion,
                     RestrictedFusion)


def build_fusion(G, p, sylow: SubgroupHandle = None, name=None) -> GroupFusion:
    """F_S(G) for a permutation group, an enumerated group or a builtin spec string.

    For builtin classical groups in characteristic 2 the unipotent Sylow
    2-subgroup is used directly (it is checked to be Sylow on construction).
    """
    from ..catalog import build_sylow_2_direct, enumerated, parse_spec
    gens = None
    if isinstance(G, str):
        spec = parse_spec(G)
        name = name or spec.label
        E = enumerated(str(spec))
        if spec.family != "file":
            from ..catalog import build_group
            perm = build_group(spec)
            gens = [int(i) for i in E.lookup(np.array([g.images for g in perm.generators]))]
        if sylow is None and p == 2:
            try:
                sylow = build_sylow_2_direct(spec, E)
            except Exception:
                sylow = None
        G = E
    elif isinstance(G, PermGroup):
        name = name or getattr(G, "name", None)
        E = EnumeratedGroup.from_perm_group(G, name=name)
        gens = [int(i) for i in E.lookup(np.array([g.images for g in G.generators]))]
        G = E
    name = name or G.name
    return GroupFusion.from_group(G, p, sylow, name=name, ambient_gens=gens)


@lru_cache(maxsize=16)
def fusion_of(spec_text, p=2) -> GroupFusion:
    """Memoized build_fusion for builtin spec strings."""
    return build_fusion(spec_text, p)


def aut_F(F: FusionSystem, P: SubgroupHandle):
    """Aut_F(P) as a list of GroupMorphism."""
    P = F.canonical(P)
    return [GroupMorphism(P, P, r) for r in F.hom(P, P)]


def hom_F(F: FusionSystem, P: SubgroupHandle, Q: SubgroupHandle):
    """Hom_F(P, Q) as a list of GroupMorphism (empty when |Q| < |P|)."""
    P, Q = F.canonical(P), F.canonical(Q)
    if Q.order < P.order:
        return []
    return [GroupMorphism(P, Q, r) for r in F.hom(P, Q)]


__all__ = [
    "FusionSystem", "GroupFusion", "GeneratedFusion", "QuotientFusion", "RestrictedFusion",
    "EmbeddingCertificate", "EssentialRecord",
    "build_fusion", "fusion_of", "aut_F", "hom_F",
    "is_centric", "is_radical", "strongly_p_embedded", "essential_subgroups", "centric_radical",
    "generated_by", "verify_alperin_goldschmidt", "strongly_closed", "strongly_closed_subgroupwise",
    "is_normal_in_F", "largest_normal_subgroup", "center_of_system", "is_constrained",
    "normalizer_subsystem", "centralizer_subsystem", "is_parabolic_char_p",
    "saturation_audit", "focal_subgroup", "hyperfocal_subgroup", "focal_and_hyperfocal",
    "focal_via_ambient", "minimal_subsystems", "op_subsystem", "op_prime_subsystem",
    "op_index_check", "equals_on_generators", "subsystem_isomorphic", "direct_factorization",
    "chain_criterion", "quotient_system",
]

from .recognition import (GGReport, KnownReport, NaturalModuleCertificate, classify_known,  # noqa: E402
                          essential_module, gg_classify, identify_natural_sl2)

__all__ += ["GGReport", "KnownReport", "NaturalModuleCertificate", "classify_known",
            "essential_module", "gg_classify", "identify_natural_sl2"]
