"""Subgroup lattices of small enumerated groups."""

from __future__ import annotations

import numpy as np

from .errors import ResourceError
from .group import EnumeratedGroup, SubgroupHandle, closure

LATTICE_BOUND = 2**9


def _prime_power(n):
    if n == 1:
        return None
    p = next(d for d in range(2, n + 1) if n % d == 0)
    while n % p == 0:
        n //= p
    return p if n == 1 else None


def cyclic_subgroups(G: EnumeratedGroup):
    seen = {}
    for x in range(G.n):
        H = SubgroupHandle(G, closure(G, [x]), gens=[x] if x else [])
        seen.setdefault(H.key, H)
    return sorted(seen.values(), key=SubgroupHandle.sort_key)


def all_subgroups(G: EnumeratedGroup, bound=LATTICE_BOUND, method=None):
    """Every subgroup exactly once, sorted by order then bit-set."""
    if G.n > bound:
        raise ResourceError(f"subgroup lattice bound {bound} exceeded (order {G.n})")
    p = _prime_power(G.n)
    if method is None:
        method = "layers" if p else "joins"
    if G.n == 1:
        return [G.whole()]
    subs = _by_layers(G, p) if method == "layers" else _by_joins(G)
    return sorted(subs, key=SubgroupHandle.sort_key)


def _by_joins(G):
    """Close the set of cyclic subgroups under joins with cyclic subgroups."""
    cyc = cyclic_subgroups(G)
    found = {H.key: H for H in cyc}
    frontier = list(cyc)
    while frontier:
        nxt = []
        for H in frontier:
            for C in cyc:
                if C <= H:
                    continue
                K = SubgroupHandle(G, closure(G, H.generators + C.generators),
                                   gens=H.generators + C.generators)
                if K.key not in found:
                    found[K.key] = K
                    nxt.append(K)
        frontier = nxt
    return list(found.values())


def _by_layers(G, p):
    """Grow each layer of a p-group by normalizing elements whose p-th power lies inside."""
    T = G.table
    n = G.n
    pw = np.arange(n)
    for _ in range(p - 1):
        pw = T[pw, np.arange(n)]
    pth = pw  # x^p
    layer = {G.trivial().key: G.trivial()}
    out = list(layer.values())
    while layer:
        nxt = {}
        for H in layer.values():
            h = H.members
            if len(h) == n:
                continue
            right = np.sort(T[h, :], axis=0)        # column g holds Hg
            left = np.sort(T[:, h], axis=1).T       # column g holds gH
            ok = np.all(right == left, axis=0) & H.mask[pth] & ~H.mask
            done = np.zeros(n, dtype=bool)
            for g in np.flatnonzero(ok):
                if done[g]:
                    continue
                parts = [h]
                y = g
                for _ in range(p - 1):
                    parts.append(T[h, y])
                    y = T[y, g]
                K = SubgroupHandle(G, np.concatenate(parts), gens=H.generators + [int(g)])
                done[K.members] = True
                if K.key not in nxt:
                    nxt[K.key] = K
        out.extend(nxt.values())
        layer = nxt
    return out


def conjugacy_classes_of_subgroups(G: EnumeratedGroup, subs, acting=None):
    """Partition ``subs`` into orbits under conjugation by ``acting`` (default G)."""
    acting = acting if acting is not None else G.whole()
    by_key = {H.key: H for H in subs}
    classes = []
    seen = set()
    gens = acting.generators
    for H in subs:
        if H.key in seen:
            continue
        orbit = {H.key: H}
        frontier = [H]
        while frontier:
            nxt = []
            for K in frontier:
                for g in gens:
                    L = SubgroupHandle(G, G.conj(K.members, g))
                    if L.key not in orbit:
                        orbit[L.key] = by_key.get(L.key, L)
                        nxt.append(orbit[L.key])
            frontier = nxt
        seen.update(orbit)
        classes.append(sorted(orbit.values(), key=SubgroupHandle.sort_key))
    return classes


def normal_subgroups(G: EnumeratedGroup, subs=None):
    subs = subs if subs is not None else all_subgroups(G)
    whole = G.whole()
    return [H for H in subs if H.is_normal_in(whole)]
