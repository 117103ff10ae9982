"""Fusion systems on a p-group, stored as Hom-sets of element-index maps.

Every system has a support ``S`` (an enumerated p-group with its own
indices).  A morphism P -> S is a row of S-indices: the images of P's
members in increasing index order.  ``hom_to_S(P)`` returns all of them as a
sorted, duplicate-free 2-d array; everything else is derived from it.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from ..errors import ResourceError
from ..group import EnumeratedGroup, SubgroupHandle, centralizer, closure, normalizer
from ..lattice import all_subgroups, conjugacy_classes_of_subgroups

CLOSURE_BUDGET = 10**7


def components(n, a, b):
    """Connected-component labels of the graph on 0..n-1 with edges a[i]--b[i]."""
    a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
    graph = coo_matrix((np.ones(len(a), dtype=np.int8), (a, b)), shape=(n, n))
    return connected_components(graph, directed=False)[1]


def unique_rows(rows, return_index=False):
    """Distinct rows in lexicographic order (rows of small nonnegative integers)."""
    rows = np.asarray(rows)
    if len(rows) == 0:
        return (rows, np.empty(0, dtype=np.int64)) if return_index else rows
    be = np.ascontiguousarray(rows, dtype=">i4")
    keys = be.view(np.dtype((np.void, 4 * rows.shape[1]))).ravel()
    _, first = np.unique(keys, return_index=True)
    out = rows[first].astype(np.int64)
    return (out, first) if return_index else out


def row_keys(rows, n):
    """Bit-set keys (matching SubgroupHandle.key) of the image sets of each row."""
    m = np.zeros((len(rows), n), dtype=bool)
    m[np.arange(len(rows))[:, None], rows] = True
    packed = np.packbits(m, axis=1, bitorder="little")
    return [r.tobytes() for r in packed]


class AutF:
    """Aut_F(P) as a permutation group on the positions of P's members."""

    def __init__(self, F: "FusionSystem", P: SubgroupHandle, rows):
        self.F, self.P = F, P
        self.rows = rows
        pos = np.searchsorted(P.members, rows)
        self.group = EnumeratedGroup(pos, name=f"Aut_F({P.order})")

    @property
    def order(self):
        return self.group.n

    def _from_conjugators(self, xs):
        cj = self.F.conj_table
        rows = cj[np.asarray(xs)[:, None], self.P.members[None, :]]
        idx = self.group.lookup(np.searchsorted(self.P.members, rows))
        return SubgroupHandle(self.group, idx)

    @cached_property
    def inn(self):
        return self._from_conjugators(self.P.members)

    @cached_property
    def aut_S(self):
        return self._from_conjugators(normalizer(self.F.S, self.P).members)

    def p_elements(self):
        return _prime_power_mask(self.group.element_orders, self.F.p)

    @cached_property
    def op(self):
        """O_p: the core of a Sylow p-subgroup."""
        from ..group import sylow_subgroup
        X = self.group
        if X.n == 1:
            return X.trivial()
        K = sylow_subgroup(X, self.F.p)
        gens = X.whole().generators
        while True:
            members = K.members
            for g in gens:
                members = np.intersect1d(members, X.conj(K.members, g))
            if len(members) == K.order:
                return K
            K = SubgroupHandle(X, members)

    @cached_property
    def o_p_prime(self):
        """O^{p'}: generated by the p-elements."""
        X = self.group
        return SubgroupHandle.generated(X, np.flatnonzero(self.p_elements()))

    @cached_property
    def o_p(self):
        """O^p: generated by the p'-elements."""
        X = self.group
        orders = X.element_orders
        return SubgroupHandle.generated(X, np.flatnonzero(orders % self.F.p != 0))

    def rows_of(self, H: SubgroupHandle):
        """The automorphisms in H as rows of S-indices."""
        return self.P.members[self.group.elements[H.members].astype(np.int64)]

    def gens_of(self, H: SubgroupHandle):
        return self.P.members[self.group.elements[H.generators].astype(np.int64)] \
            if H.generators else np.empty((0, self.P.order), dtype=np.int64)

    def out(self):
        """Out_F(P) = Aut_F(P)/Inn(P) as an enumerated group, with the coset label of each element."""
        return quotient_group(self.group, self.inn)


def _prime_power_mask(orders, p):
    o = orders.copy()
    while True:
        div = (o % p == 0) & (o > 1)
        if not div.any():
            break
        o[div] //= p
    return o == 1


def quotient_group(X: EnumeratedGroup, N: SubgroupHandle, bound=1024):
    """X/N as an enumerated group (right regular action on cosets) plus coset labels."""
    label = np.full(X.n, -1, dtype=np.int64)
    reps = []
    for x in range(X.n):
        if label[x] >= 0:
            continue
        label[X.mul(N.members, x)] = len(reps)
        reps.append(x)
    m = len(reps)
    if m > bound:
        raise ResourceError(f"quotient of order {m} exceeds the table bound")
    reps = np.array(reps)
    table = label[X.mul(reps[:, None], reps[None, :])]
    return EnumeratedGroup.from_table(table), label


class FusionSystem:
    """Base class; subclasses supply ``_compute_hom``."""

    def __init__(self, S: EnumeratedGroup, p, name=None):
        self.S = S
        self.p = p
        self.name = name
        self._hom = {}
        self._aut = {}
        self.closure_budget = CLOSURE_BUDGET

    def __repr__(self):
        return f"<{type(self).__name__} {self.name or ''} on |S|={self.S.n}>"

    # -- the support ------------------------------------------------------

    @cached_property
    def conj_table(self):
        """conj_table[s, x] = x^s."""
        T, inv = self.S.table, self.S.inverses
        n = self.S.n
        return T[T[inv[:, None], np.arange(n)[None, :]], np.arange(n)[:, None]]

    @cached_property
    def subgroups(self):
        return all_subgroups(self.S)

    @cached_property
    def sub_index(self):
        return {H.key: i for i, H in enumerate(self.subgroups)}

    @cached_property
    def sub_masks(self):
        return np.array([H.mask for H in self.subgroups])

    def canonical(self, P):
        """The lattice member equal to P (so per-subgroup caches are shared)."""
        if not isinstance(P, SubgroupHandle):
            P = SubgroupHandle(self.S, P)
        return self.subgroups[self.sub_index[P.key]]

    def subgroup(self, members):
        return self.canonical(SubgroupHandle(self.S, closure(self.S, members)))

    @property
    def whole(self):
        return self.subgroups[-1]

    @cached_property
    def s_classes(self):
        """Index lists of S-conjugacy classes of subgroups."""
        classes = conjugacy_classes_of_subgroups(self.S, self.subgroups)
        return [[self.sub_index[H.key] for H in c] for c in classes]

    @cached_property
    def normalizer_orders(self):
        out = np.zeros(len(self.subgroups), dtype=np.int64)
        for c in self.s_classes:
            out[c] = self.S.n // len(c)
        return out

    @cached_property
    def centralizer_orders(self):
        return np.array([centralizer(self.S, H).order for H in self.subgroups])

    # -- morphisms --------------------------------------------------------

    def hom_to_S(self, P: SubgroupHandle):
        key = P.key
        if key not in self._hom:
            self._hom[key] = unique_rows(self._compute_hom(P))
        return self._hom[key]

    def _compute_hom(self, P):
        raise NotImplementedError

    def hom(self, P, Q):
        rows = self.hom_to_S(P)
        return rows[Q.mask[rows].all(axis=1)] if len(rows) else rows

    def aut(self, P) -> AutF:
        P = self.canonical(P)
        if P.key not in self._aut:
            self._aut[P.key] = AutF(self, P, self.hom(P, P))
        return self._aut[P.key]

    def images(self, P):
        """Indices of the distinct subgroups P is F-conjugate to."""
        rows = self.hom_to_S(P)
        return sorted({self.sub_index[k] for k in row_keys(rows, self.S.n)})

    # -- conjugacy --------------------------------------------------------

    @cached_property
    def element_class_labels(self):
        """Label per element of S; equal labels = F-conjugate."""
        S = self.S
        a, b = [], []
        for x in range(S.n):
            C = SubgroupHandle(S, closure(S, [x]))
            rows = self.hom_to_S(C)
            col = int(np.searchsorted(C.members, x))
            ys = np.unique(rows[:, col])
            a.extend([x] * len(ys))
            b.extend(ys.tolist())
        return components(S.n, a, b)

    def element_class(self, x):
        lab = self.element_class_labels
        return np.flatnonzero(lab == lab[int(x)])

    @cached_property
    def subgroup_class_labels(self):
        n = len(self.subgroups)
        lab = np.full(n, -1, dtype=np.int64)
        c = 0
        for i, P in enumerate(self.subgroups):
            if lab[i] < 0:
                lab[self.images(P)] = c
                c += 1
        return lab

    @cached_property
    def subgroup_classes(self):
        """F-classes of subgroups as index lists, ordered by their first member."""
        lab = self.subgroup_class_labels
        order = {}
        for i, l in enumerate(lab.tolist()):
            order.setdefault(l, []).append(i)
        return list(order.values())

    def class_members(self, P):
        lab = self.subgroup_class_labels
        i = self.sub_index[P.key]
        return [self.subgroups[j] for j in np.flatnonzero(lab == lab[i])]

    def representative(self, members):
        """Fully normalized member; ties broken by the least canonical bit-set."""
        idx = list(members)
        no = self.normalizer_orders
        best = max(no[i] for i in idx)
        cands = [self.subgroups[i] for i in idx if no[i] == best]
        return min(cands, key=SubgroupHandle.sort_key)

    def class_representatives(self):
        return [self.representative(c) for c in self.subgroup_classes]

    def is_fully_normalized(self, P):
        P = self.canonical(P)
        return self.normalizer_orders[self.sub_index[P.key]] == max(
            self.normalizer_orders[self.sub_index[Q.key]] for Q in self.class_members(P))

    def is_fully_centralized(self, P):
        P = self.canonical(P)
        co = self.centralizer_orders
        return co[self.sub_index[P.key]] == max(co[self.sub_index[Q.key]] for Q in self.class_members(P))

    def to_parent(self, idx):
        """S-indices of this system in the coordinates of the ambient system (identity here)."""
        return np.asarray(idx)


class GroupFusion(FusionSystem):
    """F_S(G) given by the conjugation maps of (S, S)-double coset representatives."""

    def __init__(self, S: EnumeratedGroup, p, cmaps, dreps, name=None, ambient=None, sylow=None,
                 ambient_gens=None):
        super().__init__(S, p, name)
        self.cmaps = np.asarray(cmaps, dtype=np.int64).reshape(-1, S.n)
        self.dreps = list(dreps)
        self.ambient = ambient
        self.sylow = sylow
        self.ambient_gens = ambient_gens

    @classmethod
    def from_group(cls, G: EnumeratedGroup, p, S: SubgroupHandle = None, name=None, ambient_gens=None):
        from ..group import sylow_subgroup
        if S is None:
            S = sylow_subgroup(G, p)
        n, m = G.n, S.order
        q = m
        while q % p == 0:
            q //= p
        if q != 1 or (n // m) % p == 0 or n % m:
            raise ValueError("S is not a Sylow p-subgroup of G")
        SG = S.as_group(name=f"S({name})" if name else None)
        dreps = double_coset_reps(G, S)
        X = SG.elements.astype(np.int64)
        cmaps = []
        for d in dreps:
            g = G.elements[d].astype(np.int64)
            out = np.empty_like(X)
            out[:, g] = g[X]
            cmaps.append(SG.lookup(out, missing="flag"))
        return cls(SG, p, cmaps, dreps, name=name, ambient=G, sylow=S, ambient_gens=ambient_gens)

    def _compute_hom(self, P):
        cj = self.conj_table
        CP = unique_rows(cj[:, P.members])          # the distinct maps x -> x^s
        dom = self.cmaps >= 0
        parts = []
        for d in range(len(self.cmaps)):
            ok = dom[d][CP].all(axis=1)
            if ok.any():
                parts.append(self.cmaps[d][CP[ok]])
        R = unique_rows(np.concatenate(parts))
        # compose with Inn(S) on the right; c_t depends only on the coset Z(S)t
        return cj[self.center_transversal][:, R].reshape(-1, P.order)

    @cached_property
    def center_transversal(self):
        _, first = unique_rows(self.conj_table, return_index=True)
        return np.sort(first)

    @cached_property
    def element_class_labels(self):
        S = self.S
        a, b = [], []
        for t in S.whole().generators:
            a.append(np.arange(S.n))
            b.append(self.conj_table[t])
        for cm in self.cmaps:
            ok = np.flatnonzero(cm >= 0)
            a.append(ok)
            b.append(cm[ok])
        return components(S.n, np.concatenate(a), np.concatenate(b))

    @cached_property
    def subgroup_class_labels(self):
        n = len(self.subgroups)
        a, b = [], []
        for c in self.s_classes:
            a.extend([c[0]] * len(c))
            b.extend(c)
        M = self.sub_masks
        for cm in self.cmaps:
            dom = cm >= 0
            inside = np.flatnonzero(~M[:, ~dom].any(axis=1))
            if not len(inside):
                continue
            img = np.zeros((len(inside), self.S.n), dtype=bool)
            cols = np.flatnonzero(dom)
            img[:, cm[cols]] = M[inside][:, cols]
            keys = np.packbits(img, axis=1, bitorder="little")
            a.extend(inside.tolist())
            b.extend(self.sub_index[k.tobytes()] for k in keys)
        return components(n, a, b)

    def restricted(self, keep, name=None):
        """The fusion system of the union of the kept double cosets (must be a subgroup)."""
        keep = np.asarray(keep, dtype=bool)
        F = GroupFusion(self.S, self.p, self.cmaps[keep], [d for d, k in zip(self.dreps, keep) if k],
                        name=name, ambient=self.ambient, sylow=self.sylow)
        share_support(self, F)
        return F


SUPPORT_CACHES = ("conj_table", "subgroups", "sub_index", "sub_masks", "s_classes",
                  "normalizer_orders", "centralizer_orders", "center_transversal")


def share_support(src: FusionSystem, dst: FusionSystem):
    """Copy caches that depend only on the support (both systems must share S)."""
    for attr in SUPPORT_CACHES:
        if attr in src.__dict__:
            dst.__dict__[attr] = src.__dict__[attr]


def double_coset_reps(G: EnumeratedGroup, S: SubgroupHandle):
    """Least-index representatives of the double cosets S g S."""
    srows = G.elements[S.members].astype(np.int64)
    label = np.full(G.n, -1, dtype=np.int64)
    reps = []
    ptr = 0
    while True:
        while ptr < G.n and label[ptr] >= 0:
            ptr += 1
        if ptr == G.n:
            break
        g = G.elements[ptr].astype(np.int64)
        label[G.lookup(g[srows])] = len(reps)   # the right coset S g
        reps.append(ptr)
    reps = np.array(reps)
    rows = G.elements[reps].astype(np.int64)
    a, b = [], []
    for t in S.generators:
        tt = G.elements[t].astype(np.int64)
        a.append(np.arange(len(reps)))
        b.append(label[G.lookup(tt[rows])])
    comp = components(len(reps), np.concatenate(a), np.concatenate(b)) if a else np.arange(len(reps))
    out = {}
    for i, c in enumerate(comp.tolist()):
        out.setdefault(c, int(reps[i]))
    return sorted(out.values())


class GeneratedFusion(FusionSystem):
    """The fusion system on T generated by automorphisms of chosen subgroups.

    ``provider(R)`` returns generators of the automorphisms given on R, as
    rows of T-indices (images of R's members); it is consulted lazily, only
    for subgroups containing some image reached so far.  ``embed`` maps
    T-indices to the indices of an ambient support.
    """

    def __init__(self, T: EnumeratedGroup, p, provider, embed=None, name=None, domains=None):
        super().__init__(T, p, name)
        self.provider = provider
        self.embed = np.arange(T.n) if embed is None else np.asarray(embed)
        self.domains = domains  # optional set of keys that carry generators
        self._gens = {}
        self.steps = 0

    def to_parent(self, idx):
        return self.embed[np.asarray(idx)]

    def _domain_gens(self, i):
        if i not in self._gens:
            R = self.subgroups[i]
            if self.domains is not None and R.key not in self.domains:
                rows = np.empty((0, R.order), dtype=np.int64)
            else:
                rows = np.asarray(self.provider(R), dtype=np.int64).reshape(-1, R.order)
            gm = np.full((len(rows), self.S.n), -1, dtype=np.int64)
            gm[:, R.members] = rows
            self._gens[i] = gm
        return self._gens[i]

    def _compute_hom(self, P):
        n = self.S.n
        start = P.members[None, :]
        seen = {start.tobytes()}
        found = [start]
        frontier = start
        active, stacked = set(), np.empty((0, n), dtype=np.int64)
        image_keys = set()
        while len(frontier):
            # activate generator domains containing any new image
            M = self.sub_masks
            new_dom = False
            for k, row in zip(row_keys(frontier, n), frontier):
                if k in image_keys:
                    continue
                image_keys.add(k)
                for i in np.flatnonzero(M[:, row].all(axis=1)).tolist():
                    if i not in active:
                        active.add(i)
                        new_dom = True
            if new_dom:
                gms = [self._domain_gens(i) for i in sorted(active)]
                stacked = np.concatenate(gms) if gms else np.empty((0, n), dtype=np.int64)
            if not len(stacked):
                break
            nxt = []
            for c in range(0, len(frontier), 256):
                block = frontier[c:c + 256]
                img = stacked[:, block]                 # (K, f, |P|)
                ok = (img >= 0).all(axis=2)
                self.steps += int(ok.sum())
                if self.steps > self.closure_budget:
                    raise ResourceError(f"closure budget {self.closure_budget} exceeded")
                cand = unique_rows(img[ok])
                for r in cand:
                    b = r.tobytes()
                    if b not in seen:
                        seen.add(b)
                        nxt.append(r)
            frontier = np.array(nxt, dtype=np.int64).reshape(-1, P.order)
            if len(frontier):
                found.append(frontier)
        return np.concatenate(found)


class QuotientFusion(FusionSystem):
    """F/Q on S/Q with morphisms (xQ)a+ = (xa)Q, read off Hom-sets of preimages."""

    def __init__(self, parent: FusionSystem, Q: SubgroupHandle, name=None):
        S = parent.S
        label = np.full(S.n, -1, dtype=np.int64)
        reps = []
        for x in range(S.n):
            if label[x] < 0:
                label[S.mul(x, Q.members)] = len(reps)
                reps.append(x)
        reps = np.array(reps)
        table = label[S.mul(reps[:, None], reps[None, :])]
        super().__init__(EnumeratedGroup.from_table(table, name="S/Q"), parent.p, name)
        self.parent, self.Q = parent, Q
        self.label, self.reps = label, reps

    def preimage(self, P: SubgroupHandle):
        return self.parent.canonical(np.flatnonzero(P.mask[self.label])) \
            if "subgroups" in self.parent.__dict__ else \
            SubgroupHandle(self.parent.S, np.flatnonzero(P.mask[self.label]))

    def _compute_hom(self, P):
        pre = self.preimage(P)
        rows = self.parent.hom_to_S(pre)
        lab = self.label[rows]                          # (k, |pre|)
        pl = self.label[pre.members]
        # each morphism must respect cosets of Q
        first = np.array([int(np.flatnonzero(pl == y)[0]) for y in P.members])
        induced = lab[:, first]
        check = induced[:, np.searchsorted(P.members, pl)]
        if not np.array_equal(check, lab):
            raise ValueError("a morphism does not preserve the cosets of Q")
        return induced


class RestrictedFusion(FusionSystem):
    """The full subsystem of a parent on a subgroup T (morphisms among subgroups of T)."""

    def __init__(self, parent: FusionSystem, T: SubgroupHandle, name=None):
        super().__init__(T.as_group(), parent.p, name)
        self.parent, self.T = parent, T
        self.embed = T.members

    def to_parent(self, idx):
        return self.embed[np.asarray(idx)]

    def _compute_hom(self, P):
        Pp = SubgroupHandle(self.parent.S, self.embed[P.members])
        rows = self.parent.hom(Pp, self.T)
        return np.searchsorted(self.embed, rows)
