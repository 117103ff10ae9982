"""Isomorphism testing for small enumerated groups.

Invariant fingerprints filter first; then a depth-first search assigns images
to a short generating sequence, checking every Cayley-graph edge as it goes.
"""

from __future__ import annotations

import numpy as np

from .errors import ResourceError
from .group import EnumeratedGroup, GroupMorphism, SubgroupHandle, center, closure, derived_subgroup

ISOMORPHISM_BOUND = 2**9


def class_sizes(G: EnumeratedGroup):
    T = G.table
    inv = G.inverses
    conj = T[T[inv[:, None], np.arange(G.n)[None, :]], np.arange(G.n)[:, None]]  # conj[g, x] = x^g
    return np.array([len(np.unique(conj[:, x])) for x in range(G.n)])


def lower_central_sizes(G: EnumeratedGroup):
    whole = G.whole()
    cur = whole
    sizes = [cur.order]
    while True:
        comms = {int(G.commutator(a, b)) for a in cur.generators for b in whole.generators}
        nxt = SubgroupHandle.generated(G, sorted(comms))
        # normal closure in G
        while True:
            extra = {int(G.conj(c, g)) for c in nxt.generators for g in whole.generators}
            grown = SubgroupHandle.generated(G, nxt.generators + sorted(extra))
            if grown.order == nxt.order:
                break
            nxt = grown
        if nxt.order == cur.order:
            return sizes
        sizes.append(nxt.order)
        cur = nxt


def frattini(G: EnumeratedGroup):
    from .lattice import _prime_power, all_subgroups
    p = _prime_power(G.n)
    if G.n == 1:
        return G.trivial()
    if p:
        D = derived_subgroup(G)
        powers = np.unique([G.power(x, p) for x in range(G.n)])
        return SubgroupHandle.generated(G, D.generators + powers.tolist())
    subs = all_subgroups(G)
    maximal = [M for M in subs if M.order < G.n and not any(M < K and K.order < G.n for K in subs)]
    members = np.arange(G.n)
    for M in maximal:
        members = np.intersect1d(members, M.members)
    return SubgroupHandle(G, members)


def fingerprint(G: EnumeratedGroup):
    from .lattice import LATTICE_BOUND, _prime_power
    orders = G.element_orders
    spectrum = tuple(sorted(zip(*np.unique(orders, return_counts=True))))
    return (G.n, tuple((int(a), int(b)) for a, b in spectrum), center(G).order,
            derived_subgroup(G).order,
            # the Frattini subgroup of a non-p-group needs the whole lattice
            frattini(G).order if G.n <= LATTICE_BOUND or _prime_power(G.n) else None,
            tuple(lower_central_sizes(G)))


def element_labels(G: EnumeratedGroup, rounds=2):
    """(order, class size), refined by the labels of squares and of commuting elements.

    Every round is invariant under isomorphism, so the labels only prune.
    """
    base = [(int(o), int(c)) for o, c in zip(G.element_orders, class_sizes(G))]
    if G.n > 4096:
        return base
    T = G.table
    commute = T == T.T
    squares = T[np.arange(G.n), np.arange(G.n)]
    lab = _compress(base)
    for _ in range(rounds):
        counts = np.zeros((G.n, lab.max() + 1), dtype=np.int64)
        for c in range(lab.max() + 1):
            counts[:, c] = commute[:, lab == c].sum(axis=1)
        keys = [(int(lab[x]), int(lab[squares[x]])) + tuple(counts[x]) for x in range(G.n)]
        new = _compress(keys)
        if new.max() == lab.max():
            break
        lab = new
    return [(b, int(v)) for b, v in zip(base, lab)]


def _compress(keys):
    """Rank keys by sorted value; isomorphic groups get identical ranks."""
    order = {k: i for i, k in enumerate(sorted(set(keys)))}
    return np.array([order[k] for k in keys], dtype=np.int64)


def _generating_sequence(G, labels_G, candidates):
    """Greedy generators; for a p-group each is taken outside <chosen, Frattini>, so
    the sequence is a minimal generating set (Burnside basis theorem)."""
    from .lattice import _prime_power
    chosen = []
    have = np.zeros(G.n, dtype=bool)
    have[0] = True
    if G.n > 1 and _prime_power(G.n):
        phi = frattini(G).members
        have[phi] = True
        ranked = sorted(range(1, G.n), key=lambda x: (len(candidates[labels_G[x]]), -G.element_orders[x], x))
        while not have.all():
            x = next(x for x in ranked if not have[x])
            chosen.append(x)
            have[closure(G, chosen + phi.tolist())] = True
        return chosen
    ranked = sorted(range(1, G.n), key=lambda x: (len(candidates[labels_G[x]]), -G.element_orders[x], x))
    while not have.all():
        x = next(x for x in ranked if not have[x])
        chosen.append(x)
        have[closure(G, chosen)] = True
    return chosen


def _extend(TG, TH, phi, frontier, gG, gH):
    """Propagate phi along right multiplication by generators; None on conflict."""
    phi = phi.copy()
    gG = np.asarray(gG)
    gH = np.asarray(gH)
    while len(frontier):
        src = TG[frontier[:, None], gG[None, :]].ravel()
        img = TH[phi[frontier][:, None], gH[None, :]].ravel()
        known = phi[src] >= 0
        if np.any(phi[src[known]] != img[known]):
            return None
        src, img = src[~known], img[~known]
        if not len(src):
            break
        usrc, first = np.unique(src, return_index=True)
        # duplicates within the batch must agree
        if len(usrc) != len(src):
            lookup = dict(zip(usrc.tolist(), img[first].tolist()))
            if any(lookup[s] != i for s, i in zip(src.tolist(), img.tolist())):
                return None
        phi[usrc] = img[first]
        frontier = usrc
    return phi


def isomorphisms(G: EnumeratedGroup, H: EnumeratedGroup, labels_G=None, labels_H=None,
                 bound=ISOMORPHISM_BOUND):
    """Yield every isomorphism G -> H as an image array over element indices.

    Optional labels must be preserved; they are invariants supplied by the
    caller (for instance fusion classes) and only prune the search.
    """
    if G.n != H.n:
        return
    if G.n > bound:
        raise ResourceError(f"isomorphism bound {bound} exceeded")
    base_G, base_H = element_labels(G), element_labels(H)
    lab_G = [(a, b) for a, b in zip(base_G, labels_G)] if labels_G is not None else base_G
    lab_H = [(a, b) for a, b in zip(base_H, labels_H)] if labels_H is not None else base_H
    if sorted(lab_G) != sorted(lab_H):
        return
    cand = {}
    for y, lab in enumerate(lab_H):
        cand.setdefault(lab, []).append(y)
    gens = _generating_sequence(G, lab_G, cand)
    TG, TH = G.table, H.table
    start = np.full(G.n, -1, dtype=np.int64)
    start[0] = 0

    def search(i, phi, images):
        if i == len(gens):
            if len(np.unique(phi)) == G.n:
                yield phi
            return
        g = gens[i]
        for y in cand[lab_G[g]]:
            if phi[g] >= 0 and phi[g] != y:
                continue
            if y in images:
                continue
            trial = phi.copy()
            if trial[g] < 0:
                trial[g] = y
            known = np.flatnonzero(trial >= 0)
            nxt = _extend(TG, TH, trial, known, gens[: i + 1], images + [y])
            if nxt is None:
                continue
            dom = nxt >= 0
            if len(np.unique(nxt[dom])) != int(dom.sum()):
                continue
            yield from search(i + 1, nxt, images + [y])

    yield from search(0, start, [])


def isomorphism_test(G: EnumeratedGroup, H: EnumeratedGroup, bound=ISOMORPHISM_BOUND):
    """A bijective morphism G -> H, or None when the groups are not isomorphic."""
    if G.n != H.n:
        raise ValueError("isomorphism_test needs groups of equal order")
    if G.n > bound:
        raise ResourceError(f"isomorphism bound {bound} exceeded")
    if fingerprint(G) != fingerprint(H):
        return None
    phi = next(isomorphisms(G, H, bound=bound), None)
    if phi is None:
        return None
    return GroupMorphism(G.whole(), H.whole(), phi)


def automorphisms(G: EnumeratedGroup, labels=None):
    return list(isomorphisms(G, G, labels, labels))
