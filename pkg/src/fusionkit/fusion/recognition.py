"""Natural SL2 modules, recognition of the known rank-two systems, and the class-two taxonomy."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import isqrt

import numpy as np

from ..errors import ResourceError
from ..group import EnumeratedGroup, SubgroupHandle
from ..isomorphism import isomorphisms
from ..pgroup import max_elementary_abelian, nilpotency_class, recognize_shape
from .local import essential_subgroups, largest_normal_subgroup
from .structure import equals_on_generators, op_prime_subsystem, op_subsystem, subsystem_isomorphic
from .system import quotient_group


# -- natural SL2(q)-modules -------------------------------------------------------------

@dataclass
class NaturalModuleCertificate:
    q: int
    iso: np.ndarray              # L/C_L(W) index -> reference SL2(q) index
    intertwiner: dict            # coset label of W/C -> vector over GF(q)
    kernel_order: int            # |C_L(W)|
    fixed_order: int             # |C_W(O^p(L))|
    fixed_points_ok: bool        # |C_{W/C}(s)| = q for each nontrivial p-element s


@lru_cache(maxsize=8)
def reference_sl2(q):
    """SL2(q) on the nonzero vectors of GF(q)^2, with the vector list."""
    from .. import classical
    act, mats, order = classical.sl2(q)
    R = EnumeratedGroup.from_generators([act.perm(M) for M in mats], act.degree, name=f"SL2({q})")
    if R.n != order:
        raise RuntimeError("reference SL2 has the wrong order")
    return R, act.points, act.F


def _prime_of(W):
    o = int(W.element_orders.max())
    p = 2
    while o % p:
        p += 1
    return p


def identify_natural_sl2(L: EnumeratedGroup, W: EnumeratedGroup, action=None):
    """Certificate that L/C_L(W) is SL2(q) with W/C_W(O^p(L)) its natural module, or None.

    ``action[l]`` lists the images of W's elements under l (a right action by
    automorphisms); by default L's own elements are used, i.e. L permutes W's
    indices.
    """
    action = L.elements.astype(np.int64) if action is None else np.asarray(action, dtype=np.int64)
    if action.shape != (L.n, W.n):
        raise ValueError("the action needs one image row per element of L")
    if W.n == 1:
        return None
    p = _prime_of(W)
    if not W.whole().is_abelian() or np.any(W.element_orders[1:] != p):
        raise ValueError("W must be elementary abelian")
    if L.n > 10**4 or W.n > 2**12:
        raise ResourceError("natural module identification is bounded")
    ident = np.arange(W.n)
    kernel = np.flatnonzero((action == ident).all(axis=1))
    orders = L.element_orders
    opl = SubgroupHandle.generated(L, np.flatnonzero(orders % p != 0))
    fixed = np.flatnonzero((action[opl.members] == ident).all(axis=0))
    m = W.n // len(fixed)
    q = isqrt(m)
    if q < 2 or q * q != m:
        return None
    qq = q
    while qq % p == 0:
        qq //= p
    if qq != 1:
        return None
    K = SubgroupHandle(L, kernel)
    if L.n // K.order != q * (q * q - 1):
        return None
    Lbar, llab = quotient_group(L, K, bound=10**4) if K.order > 1 else (L, np.arange(L.n))
    # W/C as coset labels
    wlab = np.full(W.n, -1, dtype=np.int64)
    wreps = []
    for w in range(W.n):
        if wlab[w] < 0:
            wlab[W.mul(w, fixed)] = len(wreps)
            wreps.append(w)
    wreps = np.array(wreps)
    lrep = np.zeros(Lbar.n, dtype=np.int64)
    for l in range(L.n - 1, -1, -1):
        lrep[llab[l]] = l
    bar_action = wlab[action[lrep][:, wreps]]       # (|Lbar|, q^2) on coset labels
    R, pts, GF = reference_sl2(q)
    vec = [tuple(v) for v in pts]
    vindex = {v: i for i, v in enumerate(vec)}
    zero = int(wlab[0])
    add_bar = wlab[W.table[wreps[:, None], wreps[None, :]]]
    # fixed-point counts of nontrivial p-elements on W/C
    p_elts = [i for i in range(1, Lbar.n) if _is_p_power(Lbar.element_orders[i], p)]
    fix_ok = all(int((bar_action[i] == np.arange(m)).sum()) == q for i in p_elts)
    start = 1 if zero == 0 else 0
    for psi in isomorphisms(Lbar, R, bound=10**4):
        for v0 in range(len(vec)):
            f = _intertwine(bar_action, R, psi, start, v0, m, zero)
            if f is None:
                continue
            if _additive(f, add_bar, vec, vindex, GF, zero):
                inter = {int(k): (vec[v] if v >= 0 else (0, 0)) for k, v in enumerate(f)}
                return NaturalModuleCertificate(q, psi.copy(), inter, K.order, len(fixed), fix_ok)
    return None


def _is_p_power(n, p):
    while n % p == 0:
        n //= p
    return n == 1


def _intertwine(bar_action, R, psi, w0, v0, m, zero):
    """f(w0 . l) = v0 . psi(l) on the orbit of w0; -1 marks zero. None if inconsistent."""
    f = np.full(m, -2, dtype=np.int64)
    f[zero] = -1
    imgs_w = bar_action[:, w0]
    imgs_v = R.elements[psi, v0].astype(np.int64)
    for w, v in zip(imgs_w.tolist(), imgs_v.tolist()):
        if f[w] == -2:
            f[w] = v
        elif f[w] != v:
            return None
    if (f == -2).any():
        return None
    if len(np.unique(f)) != m:
        return None
    return f


def _additive(f, add_bar, vec, vindex, GF, zero):
    def as_vec(i):
        return (0, 0) if f[i] < 0 else vec[f[i]]
    m = len(f)
    for a in range(m):
        va = as_vec(a)
        for b in range(m):
            vb = as_vec(b)
            s = tuple(int(GF.add[x, y]) for x, y in zip(va, vb))
            if s != as_vec(add_bar[a, b]):
                return False
    return True


def essential_module(F, E: SubgroupHandle):
    """identify_natural_sl2 for L = O^{p'}(Aut_F(E)) on E (E elementary abelian), else None."""
    E = F.canonical(E)
    A = F.aut(E)
    W = E.as_group()
    if not np.array_equal(W.elements, F.S.elements[E.members]):
        raise RuntimeError("subgroup indices are not positions")
    orders = W.element_orders
    if not W.whole().is_abelian() or np.any(orders[1:] != F.p):
        return None
    L = A.o_p_prime.as_group()
    return identify_natural_sl2(L, W)


# -- the known rank-two systems ----------------------------------------------------------

# shape -> (family, q, reference spec or None when the ambient group is out of reach)
KNOWN_SHAPES = {
    "dihedral8": ("PSL3", 2, "builtin:psl3:2"),
    "sylowPSL3(4)": ("PSL3", 4, "builtin:psl3:4"),
    "sylowPSL3(8)": ("PSL3", 8, None),
    "sylowPSp4(2)": ("PSp4", 2, "builtin:psp4:2"),
    "sylowPSp4(4)": ("PSp4", 4, "builtin:psp4:4"),
}


@dataclass
class KnownReport:
    tag: str                      # e.g. "PSL3(4)", "other", "none"
    shape: str
    precondition: bool            # O_p(F) = 1
    essentials: list              # (order, class size) per essential class
    essentials_are_max_elementary: bool = None
    certificate: object = None    # FusionIsomorphism against the reference system
    op_prime_is_F: bool = None
    notes: dict = field(default_factory=dict)


def classify_known(F) -> KnownReport:
    """Compare O^{p'}(F) with the reference systems for the dihedral, PSL3 and PSp4 shapes."""
    from . import fusion_of
    core = largest_normal_subgroup(F)
    try:
        shape = recognize_shape(F.S)
    except ResourceError:
        shape = "other"
    if core.order > 1:
        return KnownReport("none", shape, False, [], notes={"O_p(F)": core.order})
    ess = essential_subgroups(F)
    summary = [(r.subgroup.order, len(r.members)) for r in ess]
    if shape not in KNOWN_SHAPES:
        return KnownReport("other", shape, True, summary)
    fam, q, ref = KNOWN_SHAPES[shape]
    maxel = {H.key for H in max_elementary_abelian(F.S, F.p)}
    ess_keys = {M.key for r in ess for M in r.members}
    report = KnownReport("unverified", shape, True, summary, ess_keys == maxel)
    E = op_prime_subsystem(F)
    report.op_prime_is_F = equals_on_generators(F, E)
    if ref is None:
        report.notes["reference"] = "ambient group beyond the enumeration bound"
        return report
    X = F if report.op_prime_is_F else E
    cert = subsystem_isomorphic(X, fusion_of(ref, F.p))
    report.certificate = cert
    if cert is not None:
        report.tag = f"{fam}({q})"
    if fam == "PSp4" and q == 2:
        O, T = op_subsystem(F)
        alt = subsystem_isomorphic(O, fusion_of("builtin:alt:6", F.p)) if T.order == 8 else None
        report.notes["O^p(F) ~ F(Alt(6))"] = alt is not None
    return report


# -- the class-two taxonomy ----------------------------------------------------------

RANK2_SHAPES = ("sylowPSL3(4)", "sylowPSL3(8)", "sylowPSp4(4)", "suzuki(8)", "sylowPSU3(4)")


@dataclass
class GGReport:
    tag: str              # abelian-i, dih8-ii, rank2-iii, classtoobig, unclassified
    sylow_order: int
    nilpotency_class: int
    shape: str
    cross_check: bool = None
    detail: str = ""


def gg_classify(G, p=2) -> GGReport:
    """Case of the class-two taxonomy for a group given by spec, PermGroup or EnumeratedGroup."""
    from . import build_fusion
    F = build_fusion(G, p)
    S = F.S
    c = nilpotency_class(S) if S.n > 1 else 0
    if c >= 3:
        return GGReport("classtoobig", S.n, c, "-")
    shape = recognize_shape(S)
    if c <= 1:
        return GGReport("abelian-i", S.n, c, shape)
    if shape == "dihedral8":
        return GGReport("dih8-ii", S.n, c, shape)
    if shape not in RANK2_SHAPES:
        return GGReport("unclassified", S.n, c, shape)
    rep = GGReport("rank2-iii", S.n, c, shape)
    if shape in ("suzuki(8)", "sylowPSU3(4)"):
        # no essentials: the Sylow normalizer controls fusion and S is normal in F
        ess = essential_subgroups(F)
        core = largest_normal_subgroup(F)
        rep.cross_check = not ess and core.order == S.n
        rep.detail = f"essentials={len(ess)} |O_p(F)|={core.order}"
    else:
        known = classify_known(F)
        fam = KNOWN_SHAPES[shape][0]
        rep.cross_check = known.tag.startswith(fam) or (known.tag == "unverified" and known.precondition)
        rep.detail = f"classify_known={known.tag}"
    return rep
