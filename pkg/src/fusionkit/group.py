"""Enumerated groups: element indices as the currency of every computation.

An :class:`EnumeratedGroup` stores every element as a row of an image array,
sorted lexicographically, so index 0 is the identity.  Abstract groups given
by a multiplication table are stored through their right regular action.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np

from .errors import ConfigError, ResourceError
from .perm import PermGroup, point_dtype

ENUMERATION_BOUND = 2 * 10**6
TABLE_BOUND = 1024


class EnumeratedGroup:
    def __init__(self, elements, name=None):
        elements = np.ascontiguousarray(elements)
        self.n, self.degree = elements.shape
        dt = point_dtype(self.degree)
        if elements.dtype != dt:
            elements = elements.astype(dt)
        self._void = np.dtype((np.void, self.degree * dt.itemsize))
        keys = elements.view(self._void).ravel()
        order = np.argsort(keys, kind="stable")
        self.elements = np.ascontiguousarray(elements[order])
        self._keys = self.elements.view(self._void).ravel()
        if self.n > 1 and np.any(self._keys[1:] == self._keys[:-1]):
            raise ConfigError("element list has repeats")
        if not np.array_equal(self.elements[0], np.arange(self.degree)):
            raise ConfigError("element list lacks the identity")
        self.name = name

    @classmethod
    def from_perm_group(cls, G: PermGroup, bound=ENUMERATION_BOUND, name=None):
        return cls(G.element_array(bound), name=name)

    @classmethod
    def from_generators(cls, gens, degree, bound=ENUMERATION_BOUND, name=None):
        """Closure of a generating set of image arrays (for small groups)."""
        dt = point_dtype(degree)
        ident = np.arange(degree, dtype=dt)
        gens = [np.asarray(g, dtype=np.int64) for g in gens]
        seen = {ident.tobytes()}
        rows = [ident]
        frontier = [ident.astype(np.int64)]
        while frontier:
            block = np.array(frontier)
            frontier = []
            for g in gens:
                prod = g[block].astype(dt)
                for r in prod:
                    key = r.tobytes()
                    if key not in seen:
                        seen.add(key)
                        rows.append(r)
                        frontier.append(r.astype(np.int64))
            if len(rows) > bound:
                raise ResourceError(f"closure exceeds {bound} elements")
        return cls(np.array(rows, dtype=dt), name=name)

    @classmethod
    def from_table(cls, table, name=None):
        """Right regular representation of a multiplication table (row i = products i*j)."""
        table = np.asarray(table)
        # element g acts as x -> x*g, i.e. column g of the table
        return cls(np.ascontiguousarray(table.T), name=name)

    def __len__(self):
        return self.n

    @property
    def order(self):
        return self.n

    def __repr__(self):
        return f"EnumeratedGroup({self.name or ''} order={self.n}, degree={self.degree})"

    # -- element arithmetic ------------------------------------------------

    def lookup(self, rows, missing="raise"):
        rows = np.ascontiguousarray(np.atleast_2d(rows).astype(self.elements.dtype))
        keys = rows.view(self._void).ravel()
        idx = np.searchsorted(self._keys, keys)
        idx_c = np.minimum(idx, self.n - 1)
        ok = self._keys[idx_c] == keys
        if not ok.all():
            if missing == "raise":
                raise ValueError("permutation is not an element of this group")
            return np.where(ok, idx_c, -1)
        return idx_c

    def index(self, perm):
        return int(self.lookup(np.asarray(perm))[0])

    def contains_perm(self, perm):
        return int(self.lookup(np.asarray(perm), missing="flag")[0]) >= 0

    @cached_property
    def table(self):
        if self.n > TABLE_BOUND:
            raise ResourceError("multiplication table only kept for small groups")
        E = self.elements.astype(np.int64)
        out = np.empty((self.n, self.n), dtype=np.int32)
        for j in range(self.n):
            out[:, j] = self.lookup(E[j][E])
        return out

    def mul(self, a, b):
        """Products of element indices (broadcasting)."""
        a, b = np.broadcast_arrays(np.asarray(a), np.asarray(b))
        if self.n <= TABLE_BOUND:
            return self.table[a, b]
        E = self.elements
        prod = np.take_along_axis(E[b.ravel()], E[a.ravel()], axis=1)
        return self.lookup(prod).reshape(a.shape)

    @cached_property
    def inverses(self):
        E = self.elements
        inv = np.empty_like(E)
        np.put_along_axis(inv, E, np.broadcast_to(np.arange(self.degree, dtype=E.dtype), E.shape), axis=1)
        return self.lookup(inv)

    def inv(self, a):
        return self.inverses[np.asarray(a)]

    def conj(self, x, g):
        """x^g = g^-1 x g for element indices (broadcasting)."""
        x, g = np.broadcast_arrays(np.asarray(x), np.asarray(g))
        if self.n <= TABLE_BOUND:
            return self.table[self.table[self.inverses[g], x], g]
        E = self.elements
        gi, xi = E[g.ravel()], E[x.ravel()]
        out = np.empty_like(gi)
        np.put_along_axis(out, gi, np.take_along_axis(gi, xi, axis=1), axis=1)
        return self.lookup(out).reshape(x.shape)

    def conj_all(self, x):
        """Conjugates x^g for every g, as an index array of length n."""
        return self.conj(np.full(self.n, x), np.arange(self.n))

    def commutator(self, x, y):
        """[x, y] = x^-1 y^-1 x y."""
        return self.mul(self.mul(self.inv(x), self.inv(y)), self.mul(x, y))

    @cached_property
    def element_orders(self):
        E = self.elements
        ident = np.arange(self.degree, dtype=E.dtype)
        orders = np.ones(self.n, dtype=np.int64)
        active = np.flatnonzero(np.any(E != ident, axis=1))
        cur = E[active]
        k = 1
        while len(active):
            k += 1
            cur = np.take_along_axis(E[active], cur, axis=1)
            done = np.all(cur == ident, axis=1)
            orders[active[done]] = k
            active, cur = active[~done], cur[~done]
        return orders

    def power(self, x, k):
        out, base = 0, x
        while k:
            if k & 1:
                out = int(self.mul(out, base))
            base = int(self.mul(base, base))
            k >>= 1
        return out

    # -- subgroups ---------------------------------------------------------

    def subgroup(self, gens=(), name=None):
        return SubgroupHandle.generated(self, gens, name=name)

    def whole(self):
        return SubgroupHandle(self, np.arange(self.n), name=self.name)

    def trivial(self):
        return SubgroupHandle(self, np.array([0]))

    def perms(self, idx):
        return self.elements[np.asarray(idx)]


class SubgroupHandle:
    """A subgroup of an enumerated parent, stored as sorted element indices."""

    def __init__(self, parent: EnumeratedGroup, members, gens=None, name=None, check=False):
        self.parent = parent
        self.members = np.unique(np.asarray(members, dtype=np.int64))
        self._gens = None if gens is None else [int(g) for g in gens]
        self.name = name
        if check and not is_closed(parent, self.members):
            raise ValueError("member set is not closed under multiplication")

    @classmethod
    def generated(cls, parent, gens, name=None):
        gens = [int(g) for g in gens]
        return cls(parent, closure(parent, gens), gens=gens, name=name)

    @property
    def order(self):
        return len(self.members)

    def __len__(self):
        return len(self.members)

    @cached_property
    def mask(self):
        m = np.zeros(self.parent.n, dtype=bool)
        m[self.members] = True
        return m

    @cached_property
    def key(self):
        return np.packbits(self.mask, bitorder="little").tobytes()

    @cached_property
    def bits(self):
        return int.from_bytes(self.key, "little")

    def __hash__(self):
        return hash(self.key)

    def __eq__(self, other):
        return isinstance(other, SubgroupHandle) and self.parent is other.parent and self.key == other.key

    def __le__(self, other):
        return bool(np.all(other.mask[self.members]))

    def __lt__(self, other):
        return self.order < other.order and self <= other

    def sort_key(self):
        return (self.order, self.bits)

    def __contains__(self, x):
        return bool(self.mask[int(x)])

    def __repr__(self):
        label = f"{self.name} " if self.name else ""
        return f"<subgroup {label}order {self.order} of {self.parent.name or 'group'}>"

    @property
    def generators(self):
        if self._gens is None:
            self._gens = small_generating_set(self.parent, self.members)
        return list(self._gens)

    def intersection(self, other):
        return SubgroupHandle(self.parent, np.intersect1d(self.members, other.members))

    def join(self, other):
        return SubgroupHandle.generated(self.parent, self.generators + other.generators)

    def product_set(self, other):
        """The set HK as element indices (a subgroup only when it is one)."""
        return np.unique(self.parent.mul(self.members[:, None], other.members[None, :]))

    def conjugate(self, g):
        return SubgroupHandle(self.parent, self.parent.conj(self.members, g))

    def is_normal_in(self, other):
        return all(set(self.parent.conj(self.members, g).tolist()) <= set(self.members.tolist())
                   for g in other.generators)

    def is_abelian(self):
        gens = self.generators
        P = self.parent
        return all(P.mul(a, b) == P.mul(b, a) for a in gens for b in gens)

    def as_group(self, name=None):
        """This subgroup as an enumerated group in its own right."""
        return EnumeratedGroup(self.parent.elements[self.members], name=name or self.name)


class GroupMorphism:
    """A map of element indices from a source subgroup into a target subgroup."""

    def __init__(self, source: SubgroupHandle, target: SubgroupHandle, images):
        self.source = source
        self.target = target
        self.images = np.asarray(images, dtype=np.int64)
        if len(self.images) != source.order:
            raise ValueError("need one image per source element")

    def __call__(self, x):
        pos = np.searchsorted(self.source.members, x)
        return self.images[pos]

    def image(self):
        return SubgroupHandle(self.target.parent, self.images)

    def is_homomorphism(self):
        S, T = self.source.parent, self.target.parent
        m = self.source.members
        prods = S.mul(m[:, None], m[None, :])
        lhs = self.images[np.searchsorted(m, prods)]
        rhs = T.mul(self.images[:, None], self.images[None, :])
        return bool(np.array_equal(lhs, rhs))

    def is_injective(self):
        return len(np.unique(self.images)) == len(self.images)

    def is_valid(self):
        return self.is_injective() and self.is_homomorphism() and bool(np.all(self.target.mask[self.images]))

    def __eq__(self, other):
        return (self.source == other.source and np.array_equal(self.images, other.images))

    def __hash__(self):
        return hash((self.source.key, self.images.tobytes()))


def closure(G: EnumeratedGroup, gens):
    """Element indices of the subgroup generated by ``gens``."""
    gens = [int(g) for g in gens if int(g) != 0]
    have = np.zeros(G.n, dtype=bool)
    have[0] = True
    members = [0]
    frontier = np.array([0])
    gens_arr = np.array(gens, dtype=np.int64)
    while len(frontier) and len(gens_arr):
        prods = np.unique(G.mul(frontier[:, None], gens_arr[None, :]).ravel())
        new = prods[~have[prods]]
        have[new] = True
        members.extend(new.tolist())
        frontier = new
    return np.flatnonzero(have)


def is_closed(G, members):
    members = np.asarray(members)
    mask = np.zeros(G.n, dtype=bool)
    mask[members] = True
    if not mask[0]:
        return False
    return bool(mask[G.mul(members[:, None], members[None, :])].all()) if len(members) <= 2048 else \
        all(mask[G.mul(members, x)].all() for x in members)


def small_generating_set(G, members):
    """An irredundant generating set, chosen greedily in canonical element order."""
    members = np.asarray(members)
    gens = []
    have = np.zeros(G.n, dtype=bool)
    have[0] = True
    # prefer elements of large order: fewer generators
    order = sorted(members.tolist(), key=lambda x: (-G.element_orders[x], x))
    for x in order:
        if not have[x]:
            gens.append(int(x))
            have[closure(G, gens)] = True
            if have[members].all():
                break
    # drop redundant generators; for p-groups this reaches the minimal count
    for g in list(reversed(gens)):
        rest = [h for h in gens if h != g]
        if len(closure(G, rest)) == len(members):
            gens = rest
    return gens


def centralizer(G: EnumeratedGroup, X, within=None):
    """C_G(X) by filtering the enumerated element list."""
    gens = X.generators if isinstance(X, SubgroupHandle) else [int(X)]
    cand = within.members if within is not None else np.arange(G.n)
    keep = np.ones(len(cand), dtype=bool)
    for x in gens:
        keep &= G.conj(np.full(len(cand), x), cand) == x
    return SubgroupHandle(G, cand[keep])


def normalizer(G: EnumeratedGroup, H: SubgroupHandle, within=None):
    cand = within.members if within is not None else np.arange(G.n)
    keep = np.ones(len(cand), dtype=bool)
    mask = H.mask
    for h in H.generators:
        keep &= mask[G.conj(np.full(len(cand), h), cand)]
    return SubgroupHandle(G, cand[keep])


def conjugacy_class(G: EnumeratedGroup, x, limit=ENUMERATION_BOUND):
    cls = np.unique(G.conj_all(int(x)))
    if len(cls) > limit:
        raise ResourceError("conjugacy class exceeds limit")
    return cls


def transporter(G: EnumeratedGroup, P: SubgroupHandle, Q: SubgroupHandle):
    """{g : P^g <= Q} split by induced map.

    Returns ``(elements, reps)`` where ``elements`` is the whole transporter
    set and ``reps`` maps each distinct induced injection (as a tuple of
    images of P's members) to its least-index representative.  Each class is a
    coset C_G(P)·g of the centralizer, and the transporter is a union of
    right cosets N_G(P)·g.
    """
    g_all = np.arange(G.n)
    keep = np.ones(G.n, dtype=bool)
    for h in P.generators:
        keep &= Q.mask[G.conj(np.full(G.n, h), g_all)]
    elts = g_all[keep]
    reps = {}
    if len(elts):
        imgs = G.conj(P.members[None, :], elts[:, None])
        _, first = np.unique(imgs, axis=0, return_index=True)
        for i in sorted(first.tolist()):
            reps[tuple(imgs[i].tolist())] = int(elts[i])
    return elts, reps


def sylow_subgroup(G: EnumeratedGroup, p, within=None):
    """A Sylow p-subgroup, grown one p-element at a time inside normalizers."""
    H = within if within is not None else G.whole()
    n = H.order
    target = 1
    while n % p == 0:
        n //= p
        target *= p
    P = SubgroupHandle(G, [0])
    cand = H.members
    while P.order < target:
        # scan H in index order for an element normalizing P whose p-part
        # lies outside P; a suitable p-power of it then extends P
        found = None
        for start in range(0, len(cand), 4096):
            chunk = cand[start:start + 4096]
            keep = np.ones(len(chunk), dtype=bool)
            for h in P.generators:
                keep &= P.mask[G.conj(np.full(len(chunk), h), chunk)]
            for x in chunk[keep]:
                o = _order(G, int(x))
                y = G.power(int(x), o // _p_part(o, p))
                if not P.mask[y]:
                    found = y
                    break
            if found is not None:
                break
        if found is None:
            raise RuntimeError("Sylow growth stalled")
        y = found
        while not P.mask[G.power(y, p)]:
            y = G.power(y, p)
        P = SubgroupHandle.generated(G, P.generators + [int(y)])
    return P


def _order(G, x):
    o, y = 1, x
    while y != 0:
        y = int(G.mul(y, x))
        o += 1
    return o


def _p_part(o, p):
    q = 1
    while o % p == 0:
        o //= p
        q *= p
    return q


def derived_subgroup(G: EnumeratedGroup, H: SubgroupHandle = None):
    H = H or G.whole()
    gens = H.generators
    comms = {int(G.commutator(a, b)) for a in gens for b in gens}
    # normal closure in H of commutators of generators
    cur = SubgroupHandle.generated(G, sorted(comms))
    while True:
        extra = [int(G.conj(c, h)) for c in cur.generators for h in gens]
        nxt = SubgroupHandle.generated(G, cur.generators + extra)
        if nxt.order == cur.order:
            return cur
        cur = nxt


def center(G: EnumeratedGroup, H: SubgroupHandle = None):
    H = H or G.whole()
    return centralizer(G, H, within=H)
