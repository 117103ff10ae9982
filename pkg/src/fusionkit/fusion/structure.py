"""Saturation audit, focal subgroups, minimal subsystems, isomorphism and factorization."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ResourceError
from ..group import (EnumeratedGroup, SubgroupHandle, centralizer, closure, derived_subgroup,
                     normalizer)
from ..isomorphism import ISOMORPHISM_BOUND, isomorphisms
from ..pgroup import FAILS, HOLDS, PRECONDITION, Verdict, commutator_subgroup
from .local import (essential_subgroups, is_centric, is_normal_in_F, is_radical,
                    strongly_closed, verify_alperin_goldschmidt)
from .system import FusionSystem, GeneratedFusion, GroupFusion, QuotientFusion, RestrictedFusion, \
    share_support, unique_rows


def _p_part(n, p):
    q = 1
    while n % p == 0:
        n //= p
        q *= p
    return q


def _row_set(rows):
    return {r.tobytes() for r in np.ascontiguousarray(rows, dtype=np.int64)}


# -- saturation ---------------------------------------------------------------------

@dataclass
class AuditEntry:
    subgroup: SubgroupHandle
    axiom: str            # "automized" or "receptive"
    detail: str = ""


@dataclass
class AuditReport:
    passed: bool
    classes: int
    morphisms: int
    failures: list = field(default_factory=list)


def _aut_S_keys(F, P):
    NS = normalizer(F.S, P)
    rows = F.conj_table[NS.members][:, P.members]
    return _row_set(rows)


def saturation_audit(F: FusionSystem) -> AuditReport:
    """Check the Sylow and extension axioms on a fully normalized member of each F-class.

    Fully automized: Aut_S(P) has the full p-part of |Aut_F(P)|.  Receptive:
    every isomorphism phi: Q -> P extends to N_phi.  Q runs over S-class
    representatives and phi over Aut_S(P)-orbits, since both moves carry
    extensions along with them.
    """
    S, p = F.S, F.p
    failures, morphisms = [], 0
    classes = F.subgroup_classes
    for members in classes:
        P = F.representative(members)
        A = F.aut(P)
        if A.aut_S.order != _p_part(A.order, p):
            failures.append(AuditEntry(P, "automized", f"|Aut_S|={A.aut_S.order} |Aut_F|={A.order}"))
        autS = _aut_S_keys(F, P)
        autS_rows = np.array([np.frombuffer(k, dtype=np.int64) for k in autS])
        autS_pos = np.searchsorted(P.members, autS_rows)
        seen_s = set()
        for i in members:
            Q = F.subgroups[i]
            if Q.key in seen_s:
                continue
            seen_s.update(F.subgroups[j].key for j in _s_class_of(F, i))
            rows = F.hom(Q, P)
            done = set()
            NQ = normalizer(S, Q)
            cq = F.conj_table[NQ.members][:, Q.members]       # c_g on Q, per g
            for phi in rows:
                if phi.tobytes() in done:
                    continue
                # the Aut_S(P)-orbit of phi (compose on the right)
                orbit = P.members[autS_pos[:, np.searchsorted(P.members, phi)]]
                done.update(r.tobytes() for r in orbit)
                morphisms += 1
                # N_phi: g in N_S(Q) with phi^-1 c_g phi in Aut_S(P)
                pos_img = np.searchsorted(P.members, phi)           # position in P of x.phi
                qpos = np.searchsorted(Q.members, cq)               # position in Q of x^g
                conj = np.empty((len(NQ.members), P.order), dtype=np.int64)
                conj[:, pos_img] = phi[qpos]
                keep = np.array([r.tobytes() in autS for r in conj])
                N = F.canonical(NQ.members[keep])
                ext = F.hom_to_S(N)[:, np.searchsorted(N.members, Q.members)]
                if phi.tobytes() not in _row_set(ext):
                    failures.append(AuditEntry(Q, "receptive", f"into {P!r}, |N_phi|={N.order}"))
    return AuditReport(not failures, len(classes), morphisms, failures)


def _s_class_of(F, i):
    cache = F.__dict__.setdefault("_s_class_lookup", {})
    if not cache:
        for c in F.s_classes:
            for j in c:
                cache[j] = c
    return cache[i]


# -- focal and hyperfocal subgroups -------------------------------------------------

def _fusion_commutators(F, P, aut_rows):
    """x^-1 (x alpha) for alpha among aut_rows, as elements of P."""
    S = F.S
    inv = S.inverses[P.members]
    return np.unique(S.table[inv[None, :], aut_rows])


def _generated_by_commutators(F, which):
    S = F.S
    found = np.zeros(S.n, dtype=bool)
    found[0] = True
    for P in F.class_representatives():
        A = F.aut(P)
        H = A.group.whole() if which == "focal" else A.o_p
        U = _fusion_commutators(F, P, A.rows_of(H))
        if len(U) <= 1:
            continue
        # move the set to every F-conjugate of P (the set is natural in P)
        homs = F.hom_to_S(P)
        found[homs[:, np.searchsorted(P.members, U)].ravel()] = True
    return F.canonical(closure(S, np.flatnonzero(found)))


def focal_subgroup(F: FusionSystem):
    """<x^-1 (x alpha) : alpha in Aut_F(P), x in P <= S>."""
    return _generated_by_commutators(F, "focal")


def hyperfocal_subgroup(F: FusionSystem):
    """As the focal subgroup, with alpha restricted to O^p(Aut_F(P))."""
    return _generated_by_commutators(F, "hyperfocal")


def focal_and_hyperfocal(F: FusionSystem):
    foc, hyp = focal_subgroup(F), hyperfocal_subgroup(F)
    if not (strongly_closed(F, foc) and strongly_closed(F, hyp)):
        raise RuntimeError("a focal subgroup is not strongly closed")
    return foc, hyp


def focal_via_ambient(F: GroupFusion):
    """S cap [G, G], with [G, G] built as a permutation group in the ambient group."""
    G, SG = F.ambient, F.sylow
    gens = F.ambient_gens if F.ambient_gens else G.whole().generators
    D = derived_perm_group([G.elements[g].astype(np.int64) for g in gens], G.degree)
    keep = [s for s in SG.members if D.contains(G.elements[s])]
    return F.canonical(np.searchsorted(SG.members, keep))


def derived_perm_group(gens, degree):
    """[G, G] as the normal closure of commutators of generators (right actions)."""
    from ..perm import PermGroup
    inv = [np.argsort(g) for g in gens]
    comms = [b[a[ib[ia]]] for a, ia in zip(gens, inv) for b, ib in zip(gens, inv)]
    D = PermGroup(comms, degree=degree)
    while True:
        extra = []
        for d in D.gens:
            for g, ig in zip(gens, inv):
                c = g[d[ig]]
                if not D.contains(c):
                    extra.append(c)
                    break
            if extra:
                break
        if not extra:
            return D
        D = PermGroup(D.gens + extra, degree=degree)


# -- minimal subsystems ---------------------------------------------------------------

def _rows_to_local(rows, embed):
    return np.searchsorted(embed, rows)


def aut0_of_S(F: FusionSystem, G0: GeneratedFusion):
    """Aut^0_F(S): generated by alpha in Aut_F(S) whose restriction to some F-centric P lies in G0.

    G0 is the subsystem generated by O^{p'}(Aut_F(P)) for all P.  Candidates
    are scanned essentials first, then larger subgroups first, stopping once
    all of Aut_F(S) is reached.
    """
    S = F.whole
    A = F.aut(S)
    X = A.group
    cur = A.o_p_prime
    if cur.order == X.n:
        return cur
    ess = [M for rec in essential_subgroups(F) for M in rec.members]
    rest = sorted((P for P in F.subgroups if P != S), key=lambda P: -P.order)
    order = ess + [P for P in rest if P.key not in {E.key for E in ess}]
    full_rows = A.rows_of(X.whole())
    for P in order:
        if cur.order == X.n:
            break
        if not centralizer(F.S, P) <= P or not is_centric(F, P):
            continue
        reach = _row_set(G0.hom_to_S(P))
        pos = np.searchsorted(S.members, P.members)
        add = [i for i in range(X.n)
               if not cur.mask[i] and full_rows[i][pos].tobytes() in reach]
        if add:
            cur = SubgroupHandle.generated(X, list(cur.generators) + add)
    return cur


@dataclass
class MinimalSubsystems:
    op: GeneratedFusion              # O^p(F), on hyp(F)
    op_support: SubgroupHandle
    op_prime: GeneratedFusion        # O^{p'}(F), on S
    aut0: SubgroupHandle             # Aut^0_F(S) inside Aut_F(S)


def op_prime_subsystem(F: FusionSystem, name="O^p'(F)"):
    """O^{p'}(F): generated by O^{p'}(Aut_F(P)) for all P < S and Aut^0_F(S) on S."""

    def small(R):
        A = F.aut(R)
        return A.gens_of(A.o_p_prime)

    G0 = GeneratedFusion(F.S, F.p, small, name="O^p'_*(F)")
    share_support(F, G0)
    A = F.aut(F.whole)
    aut0 = aut0_of_S(F, G0)

    def provider(R):
        if R.order == F.S.n:
            return A.gens_of(aut0)
        return small(R)

    E = GeneratedFusion(F.S, F.p, provider, name=name)
    share_support(F, E)
    E.aut0 = aut0
    return E


def op_subsystem(F: FusionSystem, name="O^p(F)"):
    """O^p(F): on T = hyp(F), generated by Inn(T) and O^p(Aut_F(P)) for P <= T."""
    T = hyperfocal_subgroup(F)
    TG = T.as_group()
    emb = T.members
    inner = F.conj_table[np.asarray(T.generators, dtype=np.int64)][:, T.members] \
        if T.generators else np.empty((0, T.order), dtype=np.int64)

    def provider(R):
        Rp = F.canonical(emb[R.members])
        A = F.aut(Rp)
        rows = A.gens_of(A.o_p)
        if R.order == TG.n and len(inner):
            rows = np.concatenate([rows, inner]) if len(rows) else inner
        return _rows_to_local(rows, emb)

    return GeneratedFusion(TG, F.p, provider, embed=emb, name=name), T


def minimal_subsystems(F: FusionSystem):
    E, T = op_subsystem(F)
    Epp = op_prime_subsystem(F)
    return MinimalSubsystems(E, T, Epp, Epp.aut0)


def op_index_check(F: FusionSystem, E: GeneratedFusion, T: SubgroupHandle):
    """For every P <= T (up to F-class), O^p(Aut_F(P)) lies in Aut_E(P)."""
    emb = T.members
    bad = []
    for P in F.class_representatives():
        for Q in F.class_members(P):
            if not Q <= T:
                continue
            A = F.aut(Q)
            need = _rows_to_local(A.rows_of(A.o_p), emb)
            Ql = E.canonical(_rows_to_local(Q.members, emb))
            have = _row_set(E.hom(Ql, Ql))
            if any(r.tobytes() not in have for r in np.ascontiguousarray(need)):
                bad.append(Q)
            break
    return not bad, bad


def equals_on_generators(F: FusionSystem, E: FusionSystem):
    """Aut_E(S) and Aut_E(X) agree with F for S and every essential X of F.

    With Alperin--Goldschmidt verified for F, this says E = F when E is a
    subsystem of F on the same support.
    """
    domains = [F.whole] + [M for rec in essential_subgroups(F) for M in rec.members]
    for P in domains:
        a, b = F.hom(P, P), E.hom(P, P)
        if a.shape != b.shape or not np.array_equal(a, b):
            return False
    return True


# -- isomorphism of fusion systems ------------------------------------------------------

def _element_labels(F):
    lab = F.element_class_labels
    sizes = np.bincount(lab)
    orders = F.S.element_orders
    return [(int(orders[x]), int(sizes[lab[x]])) for x in range(F.S.n)]


def _map_rows(phi, P_members, rows):
    img = phi[P_members]
    order = np.argsort(img)
    return img[order], unique_rows(phi[rows][:, order])


def _carries(phi, F1, F2, domains):
    for P in domains:
        dom, rows = _map_rows(phi, P.members, F1.hom_to_S(P))
        Q = F2.canonical(dom)
        other = F2.hom_to_S(Q)
        if rows.shape != other.shape or not np.array_equal(rows, other):
            return False
    return True


@dataclass
class FusionIsomorphism:
    phi: np.ndarray          # S1 index -> S2 index
    method: str              # "full" or "generators"


FULL_CHECK_BOUND = 128


def subsystem_isomorphic(F1: FusionSystem, F2: FusionSystem, bound=ISOMORPHISM_BOUND):
    """A group isomorphism S1 -> S2 carrying every Hom-set of F1 onto that of F2, or None.

    Small supports are checked on every class representative.  Larger ones
    are checked on S and the essentials in both directions, which determines
    the systems once Alperin--Goldschmidt is verified for both.
    """
    S1, S2 = F1.S, F2.S
    if S1.n != S2.n:
        return None
    if S1.n > bound:
        raise ResourceError(f"isomorphism bound {bound} exceeded")
    l1, l2 = _element_labels(F1), _element_labels(F2)
    if sorted(l1) != sorted(l2):
        return None
    e1, e2 = essential_subgroups(F1), essential_subgroups(F2)
    if sorted(len(r.members) * 1000 + r.subgroup.order for r in e1) != \
            sorted(len(r.members) * 1000 + r.subgroup.order for r in e2):
        return None
    full = S1.n <= FULL_CHECK_BOUND
    if full:
        dom1 = F1.class_representatives()
    else:
        if not (verify_alperin_goldschmidt(F1).holds and verify_alperin_goldschmidt(F2).holds):
            raise RuntimeError("generator-level comparison needs Alperin--Goldschmidt on both sides")
        dom1 = [F1.whole] + [M for r in e1 for M in r.members]
        dom2 = [F2.whole] + [M for r in e2 for M in r.members]
    for phi in isomorphisms(S1, S2, [str(x) for x in l1], [str(x) for x in l2], bound=bound):
        if not _carries(phi, F1, F2, dom1):
            continue
        if not full:
            inv = np.empty_like(phi)
            inv[phi] = np.arange(len(phi))
            if not _carries(inv, F2, F1, dom2):
                continue
        return FusionIsomorphism(phi.copy(), "full" if full else "generators")
    return None


# -- direct factorization ---------------------------------------------------------------

@dataclass
class Decomposition:
    factors: tuple           # (Q1, Q2)
    verified: bool
    detail: str = ""


@dataclass
class Factorization:
    factors: list            # (support, subsystem) pairs
    decompositions: list


def _projections(S: EnumeratedGroup, Q1, Q2):
    """x -> (x1, x2) with x = x1 x2, x1 in Q1, x2 in Q2."""
    prod = S.table[Q1.members[:, None], Q2.members[None, :]]
    p1 = np.empty(S.n, dtype=np.int64)
    p2 = np.empty(S.n, dtype=np.int64)
    p1[prod] = Q1.members[:, None]
    p2[prod] = Q2.members[None, :]
    return p1, p2


def _product_criterion(F, Q1, Q2):
    S = F.S
    p1, p2 = _projections(S, Q1, Q2)
    done = set()
    for P in F.class_representatives():
        P1 = F.canonical(closure(S, p1[P.members]))
        P2 = F.canonical(closure(S, p2[P.members]))
        Pb = F.canonical(closure(S, np.union1d(P1.members, P2.members)))
        rows = F.hom_to_S(Pb)
        pos1 = np.searchsorted(Pb.members, P1.members)
        pos2 = np.searchsorted(Pb.members, P2.members)
        split = rows[Q1.mask[rows[:, pos1]].all(axis=1) & Q2.mask[rows[:, pos2]].all(axis=1)]
        restricted = _row_set(split[:, np.searchsorted(Pb.members, P.members)])
        for r in F.hom_to_S(P):
            if r.tobytes() not in restricted:
                return False, f"a morphism from a subgroup of order {P.order} does not split"
        if Pb.key in done:
            continue
        done.add(Pb.key)
        # every pair of factor morphisms must occur
        n1 = len(F.hom(P1, Q1))
        n2 = len(F.hom(P2, Q2))
        if len(split) != n1 * n2:
            return False, f"{len(split)} split morphisms on P1 x P2, expected {n1 * n2}"
    return True, ""


def direct_factorization(F: FusionSystem):
    """Decompositions S = Q1 x Q2 into strongly closed factors satisfying the product criterion."""
    S = F.S
    normal = [Q for Q in F.subgroups
              if 1 < Q.order < S.n and Q.is_normal_in(F.whole) and strongly_closed(F, Q)]
    decs = []
    for i, Q1 in enumerate(normal):
        for Q2 in normal[i + 1:]:
            if Q1.order * Q2.order != S.n or np.count_nonzero(Q1.mask & Q2.mask) != 1:
                continue
            comm = S.table[Q1.members[:, None], Q2.members[None, :]] == \
                S.table[Q2.members[None, :], Q1.members[:, None]]
            if not comm.all():
                continue
            ok, detail = _product_criterion(F, Q1, Q2)
            decs.append(Decomposition((Q1, Q2), ok, detail))
    good = [d for d in decs if d.verified]
    if good:
        Q1, Q2 = good[0].factors
        factors = [(Q1, RestrictedFusion(F, Q1, name="factor 1")),
                   (Q2, RestrictedFusion(F, Q2, name="factor 2"))]
    else:
        factors = [(F.whole, F)]
    return Factorization(factors, decs)


# -- chain criterion ------------------------------------------------------------------

def chain_criterion(F: FusionSystem, E, chain, Q) -> Verdict:
    """If [Q, E_i] <= E_{i-1} along an Aut_F(E)-invariant chain 1 = E_0 <= ... <= E_m = E, then Q <= E.

    Returns a precondition verdict when E is not centric and radical or the
    chain is not invariant; otherwise the hypothesis and whether Q <= E.
    """
    E = F.canonical(E)
    chain = [F.canonical(C) for C in chain]
    if not (is_centric(F, E) and is_radical(F, E)):
        return Verdict(PRECONDITION, False, False, "E is not centric and radical")
    if chain[0].order != 1 or chain[-1] != E:
        return Verdict(PRECONDITION, False, False, "the chain must run from 1 to E")
    A = F.aut(E)
    for C in chain:
        if not C <= E:
            return Verdict(PRECONDITION, False, False, "a chain member is not inside E")
        img = A.rows[:, np.searchsorted(E.members, C.members)]
        if not C.mask[img].all():
            return Verdict(PRECONDITION, False, False, "a chain member is not Aut_F(E)-invariant")
    for a, b in zip(chain, chain[1:]):
        if not a <= b or not a.is_normal_in(b):
            return Verdict(PRECONDITION, False, False, "the chain is not subnormal")
    hyp = all(commutator_subgroup(F.S, Q, Ei) <= Eprev for Eprev, Ei in zip(chain, chain[1:]))
    conc = Q <= E
    status = FAILS if hyp and not conc else HOLDS
    return Verdict(status, hyp, conc)


# -- quotients --------------------------------------------------------------------------

def quotient_system(F: FusionSystem, Q, name=None):
    """F/Q on S/Q; Q must be normal in F."""
    from ..errors import ConfigError
    Q = F.canonical(Q)
    if not is_normal_in_F(F, Q):
        raise ConfigError("the subgroup is not normal in the fusion system")
    return QuotientFusion(F, Q, name=name or f"{F.name or 'F'}/Q")
