"""Structure of finite p-groups and mechanical checks of three small lemmas.

Every function here takes the p-group itself as an :class:`EnumeratedGroup`
(small enough for a multiplication table) and subgroups as handles into it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import ConfigError
from .group import EnumeratedGroup, SubgroupHandle, center, centralizer, closure, derived_subgroup
from .isomorphism import fingerprint, isomorphism_test, lower_central_sizes
from .lattice import _prime_power, all_subgroups

HOLDS = "holds"
FAILS = "fails"
PRECONDITION = "precondition-violated"


@dataclass
class Verdict:
    status: str
    hypothesis: bool = None
    conclusion: bool = None
    detail: str = ""

    @property
    def ok(self):
        """False only when a lemma's hypothesis holds and its conclusion fails."""
        return self.status != FAILS


@dataclass
class PGroupProfile:
    order: int
    prime: int
    nilpotency_class: int
    center: SubgroupHandle
    derived: SubgroupHandle
    frattini: SubgroupHandle
    omega1: SubgroupHandle
    agemo1: SubgroupHandle
    max_elem_abelian: list
    involution_count: int = None
    lower_central: list = field(default_factory=list)

    @property
    def is_special(self):
        return (self.nilpotency_class == 2 and self.center.order == self.derived.order
                == self.frattini.order and self.center == self.derived == self.frattini)


def _check_pgroup(P: EnumeratedGroup, p=None):
    q = _prime_power(P.n)
    if P.n == 1:
        return p or 2
    if q is None or (p is not None and q != p):
        raise ConfigError(f"order {P.n} is not a power of {p or 'a prime'}")
    return q


def upper_central_sizes(P: EnumeratedGroup):
    """Orders of Z_1 < Z_2 < ... up to P, computed from commutator tables."""
    T, inv = P.table, P.inverses
    comm = T[T[inv[:, None], inv[None, :]], T]  # comm[x, y] = [x, y]
    cur = np.zeros(P.n, dtype=bool)
    cur[0] = True
    sizes = [1]
    while not cur.all():
        # x lies in the next term iff [x, y] lies in the current one for all y
        nxt = cur[comm].all(axis=1)
        if nxt.sum() == cur.sum():
            raise RuntimeError("upper central series stalled: not nilpotent")
        cur = nxt
        sizes.append(int(cur.sum()))
    return sizes


def nilpotency_class(P: EnumeratedGroup):
    """Class from the lower central series, confirmed by the upper central series."""
    lower = lower_central_sizes(P)
    upper = upper_central_sizes(P)
    c = len(lower) - 1 if lower[-1] == 1 else None
    if c is None or len(upper) - 1 != c:
        raise RuntimeError("lower and upper central series disagree on the class")
    return c


def omega1(P: EnumeratedGroup, p):
    return P.subgroup(np.flatnonzero(P.element_orders == p))


def agemo1(P: EnumeratedGroup, p):
    pw = np.unique([P.power(x, p) for x in range(P.n)])
    return P.subgroup(pw)


def frattini_pgroup(P: EnumeratedGroup, p):
    D = derived_subgroup(P)
    pw = np.unique([P.power(x, p) for x in range(P.n)])
    return P.subgroup(D.generators + pw.tolist())


def is_elementary_abelian(H: SubgroupHandle, p):
    if H.order == 1:
        return True
    orders = H.parent.element_orders[H.members]
    return H.is_abelian() and bool(np.all(orders[1:] == p))


def elementary_abelian_subgroups(P: EnumeratedGroup, p):
    """Every elementary abelian subgroup, grown one order-p element at a time."""
    T = P.table
    ords = P.element_orders
    elts = np.flatnonzero(ords == p)
    commute = T[elts[:, None], elts[None, :]] == T[elts[None, :], elts[:, None]]
    pos = {int(x): i for i, x in enumerate(elts)}
    layer = {P.trivial().key: P.trivial()}
    out = list(layer.values())
    while layer:
        nxt = {}
        for H in layer.values():
            inside = [pos[int(h)] for h in H.members if int(h) in pos]
            ok = commute[inside].all(axis=0) if inside else np.ones(len(elts), dtype=bool)
            ok &= ~H.mask[elts]
            done = np.zeros(P.n, dtype=bool)
            for x in elts[ok]:
                if done[x]:
                    continue
                parts = [H.members]
                y = int(x)
                for _ in range(p - 1):
                    parts.append(T[H.members, y])
                    y = int(T[y, x])
                K = SubgroupHandle(P, np.concatenate(parts), gens=H.generators + [int(x)])
                done[K.members] = True
                nxt.setdefault(K.key, K)
        out.extend(nxt.values())
        layer = nxt
    return sorted(out, key=SubgroupHandle.sort_key)


def max_elementary_abelian(P: EnumeratedGroup, p):
    """The set of elementary abelian subgroups of maximal order."""
    subs = elementary_abelian_subgroups(P, p)
    top = max(H.order for H in subs)
    return [H for H in subs if H.order == top]


def max_rank_elementary_abelian(P: EnumeratedGroup, p, subs=None):
    """Same set by a second route: filter the full lattice and compare minimal generator counts."""
    subs = subs if subs is not None else all_subgroups(P)
    elem = [H for H in subs if is_elementary_abelian(H, p)]
    ranks = [len(H.generators) if H.order > 1 else 0 for H in elem]
    top = max(ranks)
    return [H for H, r in zip(elem, ranks) if r == top]


def profile(P: EnumeratedGroup, p=None, two_ways=True):
    p = _check_pgroup(P, p)
    c = nilpotency_class(P) if P.n > 1 else 0
    A = max_elementary_abelian(P, p)
    if two_ways:
        B = max_rank_elementary_abelian(P, p)
        if {H.key for H in A} != {H.key for H in B}:
            raise RuntimeError("maximal-order and maximal-rank elementary abelian sets differ")
    return PGroupProfile(
        order=P.n, prime=p, nilpotency_class=c, center=center(P), derived=derived_subgroup(P),
        frattini=frattini_pgroup(P, p), omega1=omega1(P, p), agemo1=agemo1(P, p),
        max_elem_abelian=A,
        involution_count=int(np.sum(P.element_orders == 2)) if p == 2 else None,
        lower_central=lower_central_sizes(P))


# -- lemma checkers -----------------------------------------------------------

def elementary2_check(S: EnumeratedGroup, A: SubgroupHandle, B: SubgroupHandle, script_a=None):
    """Two maximal elementary abelian subgroups with AB = S and the centralizer condition."""
    for X, name in ((A, "A"), (B, "B")):
        if not is_elementary_abelian(X, 2):
            raise ConfigError(f"{name} is not elementary abelian")
    script_a = script_a if script_a is not None else max_elementary_abelian(S, 2)
    keys = {H.key for H in script_a}
    if A.key not in keys or B.key not in keys:
        return Verdict(PRECONDITION, detail="A or B is not of maximal order")
    if len(A.product_set(B)) != S.n:
        return Verdict(PRECONDITION, detail="AB != S")
    AB = A.intersection(B)
    hyp = True
    for a in A.members[~AB.mask[A.members]]:
        if centralizer(S, int(a), within=B) != AB:
            hyp = False
            break
    invs = np.flatnonzero(S.element_orders == 2)
    conc = keys == {A.key, B.key} and bool(np.all(A.mask[invs] | B.mask[invs]))
    if not hyp:
        return Verdict(HOLDS, hyp, conc, "hypothesis false; implication vacuous")
    return Verdict(HOLDS if conc else FAILS, hyp, conc)


def _is_direct_product(S, factors):
    T = S.trivial()
    for F in factors:
        if T.intersection(F).order != 1:
            return None
        if not all(S.mul(a, b) == S.mul(b, a) for a in T.generators for b in F.generators):
            return None
        T = T.join(F)
    return T


def nowreath_check(S: EnumeratedGroup, factors, s):
    """Does s normalize each factor of T = T_1 x ... x T_n?  Preconditions are checked first."""
    s = int(s)
    if nilpotency_class(S) != 2:
        return Verdict(PRECONDITION, detail="S does not have class two")
    T = _is_direct_product(S, factors)
    if T is None or T.order != int(np.prod([F.order for F in factors])):
        return Verdict(PRECONDITION, detail="the factors do not form a direct product")
    if not T.is_normal_in(S.whole()):
        return Verdict(PRECONDITION, detail="T is not normal in S")
    groups = [F.as_group() for F in factors]
    for H in groups:
        if nilpotency_class(H) != 2:
            return Verdict(PRECONDITION, detail="a factor does not have class two")
    for H in groups[1:]:
        if isomorphism_test(groups[0], H) is None:
            return Verdict(PRECONDITION, detail="factors are not pairwise isomorphic")
    if s in T:
        return Verdict(PRECONDITION, detail="s lies in T")
    keys = {F.key for F in factors}
    images = [F.conjugate(s) for F in factors]
    if {F.key for F in images} != keys:
        return Verdict(PRECONDITION, detail="s does not permute the factors")
    conc = all(F == G for F, G in zip(factors, images))
    return Verdict(HOLDS if conc else FAILS, True, conc)


def is_dihedral8(H: EnumeratedGroup):
    return isomorphism_test(H, reference_dihedral8()) is not None if H.n == 8 else False


def dihcent_check(S: EnumeratedGroup, P: SubgroupHandle):
    """S = P C_S(P) for a normal dihedral subgroup P of order 8 in a class-two 2-group."""
    if _prime_power(S.n) != 2 or nilpotency_class(S) != 2:
        return Verdict(PRECONDITION, detail="S is not a 2-group of class two")
    if not P.is_normal_in(S.whole()):
        return Verdict(PRECONDITION, detail="P is not normal in S")
    if not is_dihedral8(P.as_group()):
        return Verdict(PRECONDITION, detail="P is not dihedral of order 8")
    C = centralizer(S, P)
    conc = len(P.product_set(C)) == S.n
    return Verdict(HOLDS if conc else FAILS, True, conc)


def commutator_subgroup(S: EnumeratedGroup, R: SubgroupHandle, A: SubgroupHandle):
    """[R, A] generated by all commutators of members."""
    r, a = R.members[:, None], A.members[None, :]
    T, inv = S.table, S.inverses
    comms = np.unique(T[T[inv[r], inv[a]], T[r, a]])
    # [R, A] is normalized by R and A, so the commutators generate it
    return SubgroupHandle(S, closure(S, comms))


@dataclass
class CommutatorReport:
    b: int
    derived_order: int
    checked: int
    skipped: int
    failures: list

    @property
    def ok(self):
        return not self.failures and self.derived_order == 4**self.b


def psp4_commutator_check(S: EnumeratedGroup, A: SubgroupHandle, b, subs=None):
    """For every R <= S with |RA/A| >= 4 check |[R, A]| = 2^(2b); also record |S'|."""
    if b < 2:
        raise ConfigError("the commutator check needs b >= 2")
    subs = subs if subs is not None else all_subgroups(S)
    target = 4**b
    failures, checked, skipped = [], 0, 0
    for R in subs:
        ra = len(R.product_set(A))
        if ra // A.order < 4:
            skipped += 1
            continue
        checked += 1
        c = commutator_subgroup(S, R, A).order
        if c != target:
            failures.append((R, c))
    return CommutatorReport(b, derived_subgroup(S).order, checked, skipped, failures)


# -- sweeps ---------------------------------------------------------------------

@dataclass
class SweepTally:
    lemma: str
    instances: int = 0          # configurations examined
    hypothesis: int = 0         # of which the hypothesis held
    precondition: int = 0       # configurations outside the standing assumptions
    failures: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.failures


def elementary2_sweep(S: EnumeratedGroup, script_a=None):
    """Every pair A, B in the maximal elementary abelian set with AB = S."""
    tally = SweepTally("elementary2")
    script_a = script_a if script_a is not None else max_elementary_abelian(S, 2)
    for i, A in enumerate(script_a):
        for B in script_a[i:]:
            v = elementary2_check(S, A, B, script_a)
            if v.status == PRECONDITION:
                tally.precondition += 1
                continue
            tally.instances += 1
            tally.hypothesis += bool(v.hypothesis)
            if v.status == FAILS:
                tally.failures.append((A, B))
    return tally


def _order8_nonabelian(S: EnumeratedGroup, dihedral_only=False):
    """Nonabelian subgroups of order 8, as <x, y> with |x| = 4 and y inverting x."""
    T, inv, orders = S.table, S.inverses, S.element_orders
    found = {}
    for x in np.flatnonzero(orders == 4):
        x2 = int(T[x, x])
        cyc = np.array([0, x, x2, T[x2, x]])
        inverting = np.flatnonzero(T[T[inv, x], np.arange(S.n)] == inv[x])   # y^-1 x y = x^-1
        for y in inverting:
            y2 = int(T[y, y])
            if y in cyc or y2 not in (0, x2):
                continue
            if dihedral_only and y2 != 0:
                continue
            H = SubgroupHandle(S, np.concatenate([cyc, T[cyc, y]]), gens=[int(x), int(y)])
            found.setdefault(H.key, H)
    return sorted(found.values(), key=SubgroupHandle.sort_key)


def dihcent_sweep(S: EnumeratedGroup):
    """Every normal dihedral subgroup of order 8, when S has class two."""
    tally = SweepTally("dihcent")
    if S.n < 8 or S.whole().is_abelian() or nilpotency_class(S) != 2:
        tally.precondition += 1
        return tally
    whole = S.whole()
    for P in _order8_nonabelian(S, dihedral_only=True):
        if not P.is_normal_in(whole):
            continue
        v = dihcent_check(S, P)
        if v.status == PRECONDITION:
            tally.precondition += 1
            continue
        tally.instances += 1
        tally.hypothesis += 1
        if v.status == FAILS:
            tally.failures.append(P)
    return tally


def nowreath_sweep(S: EnumeratedGroup):
    """Every proper normal T = T_1 x T_2 with nonabelian factors of order 8, and s over S/T.

    A proper normal product of n >= 2 class-two factors has order at least 64,
    so for |S| <= 128 these are all the instances with n >= 2 (n = 1 is
    trivial: s permutes the one factor only by normalizing it).
    """
    tally = SweepTally("nowreath")
    if S.n < 128 or S.whole().is_abelian() or nilpotency_class(S) != 2:
        tally.precondition += 1
        return tally
    whole = S.whole()
    facs = _order8_nonabelian(S)
    T = S.table
    for i, T1 in enumerate(facs):
        for T2 in facs[i + 1:]:
            if np.count_nonzero(T1.mask & T2.mask) != 1:
                continue
            a, b = T1.members, T2.members
            if not np.array_equal(T[a[:, None], b[None, :]], T[b[None, :], a[:, None]]):
                continue
            prod = SubgroupHandle(S, T[a[:, None], b[None, :]].ravel())
            if prod.order != 64 or prod.order == S.n or not prod.is_normal_in(whole):
                continue
            reps, seen = [], prod.mask.copy()
            for s in range(S.n):
                if not seen[s]:
                    reps.append(s)
                    seen[T[prod.members, s]] = True
            for s in reps:
                v = nowreath_check(S, [T1, T2], s)
                if v.status == PRECONDITION:
                    tally.precondition += 1
                    continue
                tally.instances += 1
                tally.hypothesis += 1
                if v.status == FAILS:
                    tally.failures.append((T1, T2, s))
    return tally


def lemma_extras():
    """Order-128 groups where the product lemma has instances, plus a class-three control."""
    from .catalog import build_group, direct_product, wreath_product_c2
    d8, q8, c2 = (build_group(t) for t in ("builtin:dihedral:8", "builtin:quaternion:8", "builtin:sym:2"))
    made = [("D8xD8xC2", direct_product(direct_product(d8, d8), c2)),
            ("Q8xQ8xC2", direct_product(direct_product(q8, q8), c2)),
            ("D8xQ8xC2", direct_product(direct_product(d8, q8), c2)),
            ("D8wrC2", wreath_product_c2(d8))]
    return [(name, EnumeratedGroup.from_perm_group(G, name=name)) for name, G in made]


def lemma_sweep(S: EnumeratedGroup):
    return [elementary2_sweep(S), dihcent_sweep(S), nowreath_sweep(S)]


# -- shape recognition --------------------------------------------------------

@lru_cache(maxsize=1)
def reference_dihedral8():
    from .catalog import build_group
    return EnumeratedGroup.from_perm_group(build_group("builtin:dihedral:8"))


REFERENCE_SYLOWS = [
    ("sylowPSL3(4)", "builtin:psl3:4"),
    ("sylowPSL3(8)", "builtin:psl3:8"),
    ("sylowPSp4(2)", "builtin:psp4:2"),
    ("sylowPSp4(4)", "builtin:psp4:4"),
    ("suzuki(8)", "builtin:sz:8"),
    ("sylowPSU3(4)", "builtin:psu3:4"),
]


@lru_cache(maxsize=None)
def _reference(spec):
    from .catalog import direct_sylow_group
    S = direct_sylow_group(spec)
    return S, fingerprint(S)


def recognize_shape(P: EnumeratedGroup):
    """Tag a 2-group by comparison with reference Sylow 2-subgroups built from matrices."""
    if P.n > 512:
        from .errors import ResourceError
        raise ResourceError("shape recognition is bounded by the isomorphism bound")
    if P.whole().is_abelian():
        return "abelian"
    if P.n == 8 and is_dihedral8(P):
        return "dihedral8"
    fp = None
    for tag, spec in REFERENCE_SYLOWS:
        R, rfp = _reference(spec)
        if R.n != P.n:
            continue
        fp = fp or fingerprint(P)
        if fp == rfp and isomorphism_test(P, R) is not None:
            return tag
    return "other"
