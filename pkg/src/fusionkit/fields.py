"""Small finite fields with fixed defining polynomials.

Elements of GF(p^k) are the integers 0..q-1 read as base-p coefficient
vectors (least significant digit = constant term).  Defining polynomials are
the Conway polynomials, so labelings (and hence permutation images) are
reproducible.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import ConfigError

# coefficients low degree first, monic
CONWAY = {
    2: (2, (1, 1)),
    3: (3, (1, 1)),
    4: (2, (1, 1, 1)),
    5: (5, (1, 1)),
    7: (7, (1, 1)),
    8: (2, (1, 1, 0, 1)),
    9: (3, (2, 2, 1)),
    16: (2, (1, 1, 0, 0, 1)),
    49: (7, (3, 6, 1)),
    64: (2, (1, 1, 0, 1, 1, 0, 1)),
}


class GF:
    def __init__(self, q):
        if q not in CONWAY:
            raise ConfigError(f"field of order {q} not in the supported table {sorted(CONWAY)}")
        p, poly = CONWAY[q]
        self.q, self.p = q, p
        self.k = len(poly) - 1
        digits = [self._digits(a) for a in range(q)]
        add = np.zeros((q, q), dtype=np.int64)
        for a in range(q):
            for b in range(q):
                add[a, b] = self._num([(x + y) % p for x, y in zip(digits[a], digits[b])])
        mul = np.zeros((q, q), dtype=np.int64)
        for a in range(q):
            for b in range(q):
                mul[a, b] = self._num(self._polymul(digits[a], digits[b], poly))
        self.add, self.mul = add, mul
        self.neg = np.array([int(np.flatnonzero(add[a] == 0)[0]) for a in range(q)])
        self.inv = np.zeros(q, dtype=np.int64)
        for a in range(1, q):
            self.inv[a] = int(np.flatnonzero(mul[a] == 1)[0])
        self.sub = add[:, self.neg]
        self.pow = np.ones((q, q), dtype=np.int64)  # pow[a, e] for 0 <= e < q
        for a in range(q):
            for e in range(1, q):
                self.pow[a, e] = mul[self.pow[a, e - 1], a]
        self.pow[0, 0] = 1

    def _digits(self, a):
        return [(a // self.p**i) % self.p for i in range(self.k)]

    def _num(self, digits):
        return sum(d * self.p**i for i, d in enumerate(digits))

    def _polymul(self, a, b, poly):
        p, k = self.p, self.k
        prod = [0] * (2 * k - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
        for d in range(len(prod) - 1, k - 1, -1):
            c = prod[d]
            if c:
                for i in range(k + 1):
                    prod[d - k + i] = (prod[d - k + i] - c * poly[i]) % p
        return prod[:k]

    def power(self, a, e):
        if a == 0:
            return 0 if e > 0 else 1
        return int(self.pow[a, e % (self.q - 1)])

    def frobenius(self, a, times=1):
        return self.power(a, self.p**times)

    @property
    def elements(self):
        return range(self.q)

    def additive_basis(self):
        return [self.p**i for i in range(self.k)]

    def primitive(self):
        for a in range(2, self.q) if self.q > 2 else [1]:
            if len({self.power(a, e) for e in range(self.q - 1)}) == self.q - 1:
                return a
        return 1

    # -- vectors and matrices ------------------------------------------------

    def dot(self, u, v):
        acc = 0
        for x, y in zip(u, v):
            acc = self.add[acc, self.mul[x, y]]
        return int(acc)

    def vecmat(self, vs, M):
        """Rows ``vs`` (k x n) times matrix ``M`` (n x m)."""
        vs = np.atleast_2d(vs)
        M = np.asarray(M)
        out = np.zeros((vs.shape[0], M.shape[1]), dtype=np.int64)
        for i in range(M.shape[0]):
            out = self.add[out, self.mul[vs[:, i][:, None], M[i][None, :]]]
        return out

    def matmul(self, A, B):
        return self.vecmat(np.asarray(A), B)

    def det(self, M):
        M = [list(map(int, r)) for r in M]
        n = len(M)
        d = 1
        for c in range(n):
            piv = next((r for r in range(c, n) if M[r][c]), None)
            if piv is None:
                return 0
            if piv != c:
                M[c], M[piv] = M[piv], M[c]
                d = int(self.neg[d])
            d = int(self.mul[d, M[c][c]])
            ic = int(self.inv[M[c][c]])
            for r in range(c + 1, n):
                f = int(self.mul[M[r][c], ic])
                if f:
                    M[r] = [int(self.sub[x, self.mul[f, y]]) for x, y in zip(M[r], M[c])]
        return d

    def normalize(self, v):
        """Scale so the first nonzero coordinate is 1."""
        v = np.asarray(v)
        nz = np.flatnonzero(v)
        return self.mul[self.inv[v[nz[0]]], v]

    def projective_points(self, n):
        """Normalized nonzero vectors of GF(q)^n in lexicographic order."""
        pts = []
        for lead in range(n):
            for tail in np.ndindex(*([self.q] * (n - lead - 1))):
                pts.append((0,) * lead + (1,) + tuple(tail))
        return sorted(pts)


@lru_cache(maxsize=None)
def field(q):
    return GF(q)
