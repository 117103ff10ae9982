"""Centric, radical and essential subgroups; strong closure; normal subgroups of F."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..group import EnumeratedGroup, SubgroupHandle, centralizer, normalizer, sylow_subgroup
from .system import FusionSystem, GeneratedFusion, GroupFusion, components, quotient_group, share_support


# -- centric and radical ----------------------------------------------------------

def is_centric(F: FusionSystem, P):
    """C_S(P') <= P' for every F-conjugate P'."""
    P = F.canonical(P)
    for Q in F.class_members(P):
        if not centralizer(F.S, Q) <= Q:
            return False
    return True


def is_radical(F: FusionSystem, P):
    """O_p(Out_F(P)) = 1, i.e. O_p(Aut_F(P)) = Inn(P)."""
    A = F.aut(P)
    return A.op.order == A.inn.order


# -- strongly p-embedded subgroups ------------------------------------------------

@dataclass
class EmbeddingCertificate:
    subgroup: SubgroupHandle          # H in the ambient group X
    components: int                   # components of the Sylow-intersection graph
    pair: tuple                       # Sylows from two different components

    def verify(self, p):
        H = self.subgroup
        X = H.parent
        if H.order % p or H.order == X.n:
            return False
        outside = np.flatnonzero(~H.mask)
        for x in outside:
            inter = H.mask[X.conj(H.members, x)]
            k = int(inter.sum())
            if k % p == 0:
                return False
        return True


def _subgroup_orbit(X, T):
    seen = {T.key: T}
    frontier = [T]
    gens = X.whole().generators
    while frontier:
        nxt = []
        for K in frontier:
            for g in gens:
                L = K.conjugate(g)
                if L.key not in seen:
                    seen[L.key] = L
                    nxt.append(L)
        frontier = nxt
    return sorted(seen.values(), key=SubgroupHandle.sort_key)


def strongly_p_embedded(X: EnumeratedGroup, p):
    """A certificate H (p | |H|, p does not divide |H cap H^x| off H) or None."""
    if X.n % p:
        return None
    T = sylow_subgroup(X, p)
    if T.order == X.n:
        return None
    syl = _subgroup_orbit(X, T)
    a, b = [], []
    for i in range(len(syl)):
        for j in range(i + 1, len(syl)):
            if np.count_nonzero(syl[i].mask & syl[j].mask) > 1:
                a.append(i)
                b.append(j)
    comp = components(len(syl), a, b)
    ncomp = len(set(comp.tolist()))
    if ncomp == 1:
        return None
    i0 = next(i for i, K in enumerate(syl) if K == T)
    inside = {syl[i].key for i in range(len(syl)) if comp[i] == comp[i0]}
    # H = stabilizer of T's component
    Tm = T.members
    keep = [x for x in range(X.n)
            if SubgroupHandle(X, X.conj(Tm, x)).key in inside]
    H = SubgroupHandle(X, keep)
    other = next(K for i, K in enumerate(syl) if comp[i] != comp[i0])
    cert = EmbeddingCertificate(H, ncomp, (T, other))
    if not cert.verify(p):
        raise RuntimeError("strongly p-embedded certificate failed its own check")
    return cert


# -- essential subgroups ----------------------------------------------------------

@dataclass
class EssentialRecord:
    subgroup: SubgroupHandle
    out: EnumeratedGroup
    witness: EmbeddingCertificate
    centric: bool = True
    radical: bool = True
    module_data: object = None
    members: list = field(default_factory=list)   # the whole F-class


def essential_subgroups(F: FusionSystem):
    """Fully normalized representatives of the F-classes of essential subgroups."""
    cached = getattr(F, "_essentials", None)
    if cached is not None:
        return cached
    out = []
    S = F.whole
    for members in F.subgroup_classes:
        P = F.representative(members)
        if P == S or not is_centric(F, P):
            continue
        if not is_radical(F, P):
            continue
        A = F.aut(P)
        outF, _ = A.out()
        cert = strongly_p_embedded(outF, F.p)
        if cert is None:
            continue
        out.append(EssentialRecord(P, outF, cert, True, True,
                                   members=[F.subgroups[i] for i in members]))
    F._essentials = out
    return out


def centric_radical(F: FusionSystem):
    """Fully normalized representatives of F-classes that are centric and radical."""
    return [P for P in (F.representative(c) for c in F.subgroup_classes)
            if is_centric(F, P) and is_radical(F, P)]


# -- Alperin--Goldschmidt ---------------------------------------------------------

@dataclass
class GenerationReport:
    holds: bool
    checked: int
    mismatches: list
    generators: int


def generated_by(F: FusionSystem, domains, name=None, provider=None):
    """The subsystem of F on S generated by Aut_F(R) for R among ``domains`` (handles)."""
    keys = {R.key for R in domains}

    def full(R):
        A = F.aut(R)
        return A.gens_of(A.group.whole())

    G = GeneratedFusion(F.S, F.p, provider or full, name=name, domains=keys)
    share_support(F, G)
    return G


def verify_alperin_goldschmidt(F: FusionSystem, budget=None):
    """Close Aut_F(S) and Aut_F(E) (E essential, all members) and compare every Hom_F(P, S).

    One subgroup per F-class suffices: if the generated Hom-set from P is all
    of Hom_F(P, S), the same follows for every F-conjugate of P.
    """
    domains = [F.whole]
    for rec in essential_subgroups(F):
        domains.extend(rec.members)
    G = generated_by(F, domains, name="AG closure")
    if budget is not None:
        G.closure_budget = budget
    mismatches = []
    reps = F.class_representatives()
    for P in reps:
        a, b = F.hom_to_S(P), G.hom_to_S(P)
        if a.shape != b.shape or not np.array_equal(a, b):
            mismatches.append(P)
    return GenerationReport(not mismatches, len(reps), mismatches, len(domains))


# -- strong closure and normal subgroups ------------------------------------------

def strongly_closed(F: FusionSystem, Q):
    """Every F-conjugate (in S) of every element of Q lies in Q."""
    lab = F.element_class_labels
    inside = np.unique(lab[Q.members])
    return bool(np.all(Q.mask[np.isin(lab, inside)]))


def strongly_closed_subgroupwise(F: FusionSystem, Q):
    """The subgroup-level definition: P <= Q and a in Hom_F(P, S) give Pa <= Q."""
    Q = F.canonical(Q)
    for P in F.subgroups:
        if P <= Q:
            rows = F.hom_to_S(P)
            if not Q.mask[rows].all():
                return False
    return True


def is_normal_in_F(F: FusionSystem, Q):
    """Q normal in F: Q normal in S and every morphism extends to PQ fixing Q."""
    Q = F.canonical(Q)
    if not Q.is_normal_in(F.whole):
        return False
    S = F.S
    for P in F.class_representatives():
        PQ = F.subgroup(np.concatenate([P.members, Q.members]))
        rows = F.hom_to_S(P)
        ext = F.hom_to_S(PQ)
        ext = ext[Q.mask[ext[:, np.searchsorted(PQ.members, Q.members)]].all(axis=1)]
        restricted = {r.tobytes() for r in ext[:, np.searchsorted(PQ.members, P.members)]}
        if any(r.tobytes() not in restricted for r in rows):
            return False
    return True


def _invariant(F, Q, P):
    """Q <= P and Q is Aut_F(P)-invariant."""
    if not Q <= P:
        return False
    A = F.aut(P)
    pos = np.searchsorted(P.members, Q.members)
    imgs = A.rows[:, pos]
    return bool(Q.mask[imgs].all())


@dataclass
class CoreReport:
    core: SubgroupHandle
    candidates: list
    unique: bool


def largest_normal_subgroup(F: FusionSystem, report=False):
    """O_p(F): the largest strongly closed Q in every essential, invariant under their Aut_F and Aut_F(S)."""
    ess = [M for rec in essential_subgroups(F) for M in rec.members]
    S = F.whole
    good = []
    for Q in F.subgroups:
        if not Q.is_normal_in(S):
            continue
        if not all(Q <= E for E in ess):
            continue
        if not strongly_closed(F, Q):
            continue
        if not _invariant(F, Q, S) or not all(_invariant(F, Q, E) for E in ess):
            continue
        good.append(Q)
    top = max(good, key=SubgroupHandle.sort_key)
    unique = all(Q <= top for Q in good)
    if not unique:
        raise RuntimeError("candidates for O_p(F) have no unique maximum")
    return CoreReport(top, good, unique) if report else top


def center_of_system(F: FusionSystem):
    """Z(F): elements of Z(S) fused to nothing else."""
    from ..group import center
    Z = center(F.S)
    lab = F.element_class_labels
    counts = np.bincount(lab)
    keep = [z for z in Z.members if counts[lab[z]] == 1]
    return F.canonical(keep) if "subgroups" in F.__dict__ else SubgroupHandle(F.S, keep)


def is_constrained(F: FusionSystem):
    Q = largest_normal_subgroup(F)
    return centralizer(F.S, Q) <= Q


# -- normalizer and centralizer subsystems ----------------------------------------

@dataclass
class LocalSubsystem:
    system: FusionSystem
    subgroup: SubgroupHandle
    substituted: bool = False       # the input was replaced by a fully normalized conjugate


def _fully_normalized_conjugate(F, Q):
    Q = F.canonical(Q)
    if F.is_fully_normalized(Q):
        return Q, False
    members = [F.sub_index[R.key] for R in F.class_members(Q)]
    return F.representative(members), True


def normalizer_subsystem(F: GroupFusion, Q):
    """N_F(Q) realized as the fusion of N_G(Q) on N_S(Q)."""
    Q, sub = _fully_normalized_conjugate(F, Q)
    if Q.is_normal_in(F.whole):
        keep = []
        for cm in F.cmaps:
            img = cm[Q.members]
            keep.append(bool(np.all(img >= 0)) and bool(np.all(Q.mask[img])))
        return LocalSubsystem(F.restricted(keep, name=f"N_F({Q.order})"), Q, sub)
    G, SG = F.ambient, F.sylow
    Qg = SubgroupHandle(G, SG.members[Q.members])
    N = normalizer(G, Qg)
    NS = normalizer(F.S, Q)
    NG = N.as_group()
    sub_S = SubgroupHandle(NG, NG.lookup(G.elements[SG.members[NS.members]]))
    return LocalSubsystem(GroupFusion.from_group(NG, F.p, sub_S, name=f"N_F({Q.order})"), Q, sub)


def centralizer_subsystem(F: GroupFusion, x):
    """C_F(x) realized as the fusion of C_G(x) on C_S(x); x replaced by a fully centralized conjugate."""
    x = int(x)
    cls = F.element_class(x)
    co = [centralizer(F.S, int(y)).order for y in cls]
    sub = co[list(cls).index(x)] != max(co)
    if sub:
        x = int(cls[int(np.argmax(co))])
    C = centralizer(F.S, x)
    if C.order == F.S.n:
        keep = [cm[x] == x for cm in F.cmaps]
        return LocalSubsystem(F.restricted(keep, name=f"C_F({x})"), F.canonical([0, x]) if "subgroups" in F.__dict__
                              else SubgroupHandle(F.S, [0, x]), sub)
    G, SG = F.ambient, F.sylow
    CG = centralizer(G, int(SG.members[x]))
    H = CG.as_group()
    sub_S = SubgroupHandle(H, H.lookup(G.elements[SG.members[C.members]]))
    return LocalSubsystem(GroupFusion.from_group(H, F.p, sub_S, name=f"C_F({x})"), SubgroupHandle(F.S, [0, x]), sub)


def is_parabolic_char_p(F: GroupFusion, report=False):
    """N_F(Q) constrained for every nontrivial Q normal in S."""
    S = F.whole
    results = []
    for Q in F.subgroups:
        if Q.order == 1 or not Q.is_normal_in(S):
            continue
        if centralizer(F.S, Q) <= Q:
            # Q <= O_p(N_F(Q)), so C_S(O_p) <= C_S(Q) <= Q already
            results.append((Q, True))
            continue
        N = normalizer_subsystem(F, Q).system
        results.append((Q, is_constrained(N)))
    ok = all(c for _, c in results)
    return (ok, results) if report else ok
