"""The affine model group 7^2:SL2(7):2 and a brute-force count of its automorphisms.

Automorphisms are counted through generator images: fix generators x, y of G;
a pair (x', y') defines an automorphism iff the map along a Cayley spanning
tree is multiplicative and onto.  Inner automorphisms act freely (Z(G) = 1),
so it is enough to let x' run over class representatives and weight by class
size.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ResourceError
from .fields import GF


def _affine_perm(F, M, t):
    """v -> vM + t on GF(q)^2, points indexed a*q + b."""
    q = F.q
    pts = [(a, b) for a in range(q) for b in range(q)]
    out = []
    for a, b in pts:
        x = F.add[F.mul[a, M[0][0]], F.mul[b, M[1][0]]]
        y = F.add[F.mul[a, M[0][1]], F.mul[b, M[1][1]]]
        out.append(int(F.add[x, t[0]]) * q + int(F.add[y, t[1]]))
    return np.array(out, dtype=np.int64)


class _Enumerated:
    """Elements as rows of images with a row hash; right action (g*h)[x] = h[g[x]]."""

    def __init__(self, gens, bound):
        gens = [np.asarray(g, dtype=np.int64) for g in gens]
        deg = len(gens[0])
        self.gens = gens
        rows = [np.arange(deg)]
        index = {rows[0].tobytes(): 0}
        parent, via = [-1], [-1]
        frontier = [0]
        while frontier:
            nxt = []
            for i in frontier:
                for k, s in enumerate(gens):
                    r = s[rows[i]]
                    key = r.tobytes()
                    if key not in index:
                        if len(rows) >= bound:
                            raise ResourceError(f"group exceeds the element budget {bound}")
                        index[key] = len(rows)
                        rows.append(r)
                        parent.append(i)
                        via.append(k)
                        nxt.append(len(rows) - 1)
            frontier = nxt
        self.rows = np.array(rows)
        self.index = index
        self.parent = np.array(parent)
        self.via = np.array(via)
        self.n = len(rows)
        self.right = np.array([[index[s[r].tobytes()] for s in gens] for r in rows])
        depth = np.zeros(self.n, dtype=np.int64)
        for i in range(1, self.n):
            depth[i] = depth[self.parent[i]] + 1
        self.layers = [np.flatnonzero(depth == d) for d in range(1, int(depth.max()) + 1)]

    def lookup(self, rows):
        return np.array([self.index[r.tobytes()] for r in np.atleast_2d(rows)])

    def mul_rows(self, a, b):
        return b[a] if a.ndim == 1 else np.take_along_axis(b, a, axis=-1)

    def orders(self):
        ident = np.arange(self.rows.shape[1])
        out = np.zeros(self.n, dtype=np.int64)
        cur = self.rows.copy()
        k = 1
        while (out == 0).any():
            done = (out == 0) & (cur == ident).all(axis=1)
            out[done] = k
            cur = np.take_along_axis(self.rows, cur, axis=1)     # cur * g
            k += 1
        return out

    def classes(self):
        """Conjugacy class label per element (orbits of conjugation by the generators)."""
        inv = [np.argsort(s) for s in self.gens]
        conj = []
        for s, si in zip(self.gens, inv):
            # g^s = s^-1 g s, as image rows: s[g[si]]
            conj.append(self.lookup(s[self.rows[:, si]]))
        label = np.full(self.n, -1, dtype=np.int64)
        sizes = []
        for g in range(self.n):
            if label[g] >= 0:
                continue
            c = len(sizes)
            label[g] = c
            stack = [g]
            size = 0
            while stack:
                h = stack.pop()
                size += 1
                for m in conj:
                    k = m[h]
                    if label[k] < 0:
                        label[k] = c
                        stack.append(k)
            sizes.append(size)
        return label, np.array(sizes)


def _extend(G: _Enumerated, images):
    """Image rows along the spanning tree, or None if the map is not an automorphism."""
    deg = G.rows.shape[1]
    phi = np.empty((G.n, deg), dtype=np.int64)
    phi[0] = np.arange(deg)
    imgs = np.array(images)
    for layer in G.layers:
        par, k = G.parent[layer], G.via[layer]
        phi[layer] = np.take_along_axis(imgs[k], phi[par], axis=1)
    for k in range(len(images)):
        if not np.array_equal(phi[G.right[:, k]], imgs[k][phi]):
            return None
    if len(np.unique(phi, axis=0)) != G.n:
        return None
    return phi


@dataclass
class RVModelReport:
    order: int
    center_order: int
    automorphisms: int
    affine_normalizer: int        # |AGL2(7)| acting by conjugation
    affine_centralizer: int       # points fixed by a point stabilizer, = |C_Sym(G)|
    normalized: bool              # a determinant-3 matrix normalizes G

    @property
    def ok(self):
        return (self.order == 32928 and self.center_order == 1
                and self.automorphisms == self.affine_normalizer == 98784
                and self.affine_centralizer == 1 and self.normalized)


def rv_model_group(bound=10**5):
    F = GF(7)
    gens = [_affine_perm(F, [[1, 1], [0, 1]], (0, 0)),
            _affine_perm(F, [[1, 0], [1, 1]], (0, 0)),
            _affine_perm(F, [[1, 0], [0, 6]], (0, 0)),       # determinant -1
            _affine_perm(F, [[1, 0], [0, 1]], (1, 0))]
    return _Enumerated(gens, bound)


def _two_generators(G: _Enumerated):
    """A generating pair, found by seeded random search."""
    rng = np.random.default_rng(7)
    for _ in range(2000):
        x, y = (int(v) for v in rng.integers(1, G.n, size=2))
        H = _Enumerated([G.rows[x], G.rows[y]], G.n + 1)
        if H.n == G.n:
            return x, y
    raise RuntimeError("no generating pair found")


def rv_model_check(bound=10**5) -> RVModelReport:
    G = rv_model_group(bound)
    orders = G.orders()
    label, sizes = G.classes()
    center = int((sizes[label] == 1).sum())
    x, y = _two_generators(G)
    H = _Enumerated([G.rows[x], G.rows[y]], G.n + 1)
    xy = int(G.lookup(G.mul_rows(G.rows[x], G.rows[y]))[0])
    com_x, com_y = np.argsort(G.rows[x]), np.argsort(G.rows[y])
    comm = int(G.lookup(G.rows[y][G.rows[x][com_y[com_x]]])[0])
    want = (orders[y], orders[xy], orders[comm])
    total = 0
    reps = [int(np.flatnonzero(label == c)[0]) for c in range(len(sizes))]
    ys = np.flatnonzero(orders == orders[y])
    for r in reps:
        if orders[r] != orders[x] or sizes[label[r]] != sizes[label[x]]:
            continue
        rr = G.rows[r]
        rinv = np.argsort(rr)
        cand = G.rows[ys]
        prod = G.lookup(np.take_along_axis(cand, np.broadcast_to(rr, cand.shape), axis=1))
        cinv = np.argsort(cand, axis=1)
        # [r, y'] = r^-1 y'^-1 r y' ; composing left to right under right actions
        c1 = cinv[:, rinv]                                   # r^-1 then y'^-1
        c2 = rr[c1]                                          # then r
        c3 = np.take_along_axis(cand, c2, axis=1)            # then y'
        cm = G.lookup(c3)
        keep = ys[(orders[prod] == want[1]) & (orders[cm] == want[2])]
        for yy in keep:
            if _extend(H, [rr, G.rows[yy]]) is not None:
                total += int(sizes[label[r]])
    # AGL2(7) = <G, diag(1, 3)>; it acts on G by conjugation, faithfully when
    # only the origin is fixed by the origin's stabilizer
    d = _affine_perm(GF(7), [[1, 0], [0, 3]], (0, 0))
    dinv = np.argsort(d)
    normalized = all(d[g[dinv]].tobytes() in G.index for g in G.gens)
    agl = 49 * (49 - 1) * (49 - 7)
    stab = np.flatnonzero(G.rows[:, 0] == 0)
    fixed = np.flatnonzero((G.rows[stab] == np.arange(G.rows.shape[1])).all(axis=0))
    return RVModelReport(G.n, center, total, agl, len(fixed), normalized)
