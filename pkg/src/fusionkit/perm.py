"""Permutations, stabilizer chains and the group text format.

Permutations act on the right: ``x^(gh) = (x^g)^h``.  As image arrays this
means ``(g*h)[x] = h[g[x]]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, ResourceError

MAX_DEGREE = 4096
MAX_ORDER = 10**7


def point_dtype(degree):
    # big-endian so that raw bytes compare in lexicographic order
    return np.dtype(np.uint8) if degree <= 256 else np.dtype(">u2")


@dataclass(frozen=True)
class Permutation:
    images: tuple

    def __post_init__(self):
        if sorted(self.images) != list(range(len(self.images))):
            raise ValueError("image list is not a bijection")

    @property
    def degree(self):
        return len(self.images)

    @classmethod
    def identity(cls, degree):
        return cls(tuple(range(degree)))

    @classmethod
    def from_cycles(cls, degree, *cycles):
        img = list(range(degree))
        for cyc in cycles:
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                img[a] = b
        return cls(tuple(img))

    def __mul__(self, other):
        return Permutation(tuple(other.images[i] for i in self.images))

    def inverse(self):
        inv = [0] * self.degree
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(tuple(inv))

    def __pow__(self, n):
        out = Permutation.identity(self.degree)
        base = self if n >= 0 else self.inverse()
        for _ in range(abs(n)):
            out = out * base
        return out

    def array(self):
        return np.array(self.images, dtype=np.int64)

    def __str__(self):
        seen, out = set(), []
        for i in range(self.degree):
            if i in seen or self.images[i] == i:
                continue
            cyc, j = [i], self.images[i]
            while j != i:
                seen.add(j)
                cyc.append(j)
                j = self.images[j]
            out.append("(" + " ".join(map(str, cyc)) + ")")
        return "".join(out) or "()"


def _inv(a):
    out = np.empty_like(a)
    out[a] = np.arange(len(a), dtype=a.dtype)
    return out


@dataclass
class _Level:
    base: int
    gens: list
    transversal: dict = field(default_factory=dict)

    def rebuild(self, degree):
        ident = np.arange(degree, dtype=np.int64)
        trans = {self.base: ident}
        frontier = [self.base]
        while frontier:
            nxt = []
            for p in frontier:
                u = trans[p]
                for g in self.gens:
                    q = int(g[p])
                    if q not in trans:
                        trans[q] = g[u]
                        nxt.append(q)
            frontier = nxt
        self.transversal = trans


class PermGroup:
    """A permutation group with a verified stabilizer chain."""

    def __init__(self, generators, degree=None, max_order=MAX_ORDER, max_degree=MAX_DEGREE):
        gens = []
        for g in generators:
            img = g.images if isinstance(g, Permutation) else tuple(int(x) for x in g)
            if sorted(img) != list(range(len(img))):
                raise ConfigError("generator image list is not a bijection")
            gens.append(np.array(img, dtype=np.int64))
        if degree is None:
            if not gens:
                raise ConfigError("degree required for an empty generator list")
            degree = len(gens[0])
        if any(len(g) != degree for g in gens):
            raise ConfigError("generators do not share one degree")
        if degree > max_degree:
            raise ResourceError(f"degree {degree} exceeds bound {max_degree}")
        self.degree = degree
        self.max_order = max_order
        ident = np.arange(degree)
        self.gens = [g for g in gens if not np.array_equal(g, ident)]
        self.levels = self._schreier_sims()
        self.order = math.prod(len(lv.transversal) for lv in self.levels)
        for g in self.gens:
            if not self.contains(g):
                raise RuntimeError("stabilizer chain failed its own membership check")

    @property
    def generators(self):
        return [Permutation(tuple(int(x) for x in g)) for g in self.gens]

    @property
    def base(self):
        return [lv.base for lv in self.levels]

    def _sift(self, g, levels, start=0):
        for j in range(start, len(levels)):
            lv = levels[j]
            b = int(g[lv.base])
            u = lv.transversal.get(b)
            if u is None:
                return g, j
            g = _inv(u)[g]
        return g, len(levels)

    def _schreier_sims(self):
        degree = self.degree
        ident = np.arange(degree, dtype=np.int64)
        levels = []
        for g in self.gens:
            if not any(g[lv.base] != lv.base for lv in levels) and not np.array_equal(g, ident):
                levels.append(_Level(int(np.flatnonzero(g != ident)[0]), []))
        for i, lv in enumerate(levels):
            lv.gens = [g for g in self.gens if all(g[levels[k].base] == levels[k].base for k in range(i))]
            lv.rebuild(degree)
        i = len(levels) - 1
        while i >= 0:
            lv = levels[i]
            restart = None
            for p, u in lv.transversal.items():
                for x in lv.gens:
                    ux = x[u]
                    v = lv.transversal[int(ux[lv.base])]
                    s = _inv(v)[ux]
                    if np.array_equal(s, ident):
                        continue
                    h, j = self._sift(s, levels, i + 1)
                    if np.array_equal(h, ident):
                        continue
                    if j == len(levels):
                        levels.append(_Level(int(np.flatnonzero(h != ident)[0]), []))
                    for k in range(i + 1, j + 1):
                        levels[k].gens.append(h)
                        levels[k].rebuild(degree)
                    if math.prod(len(l.transversal) for l in levels) > self.max_order:
                        raise ResourceError(f"group order exceeds bound {self.max_order}")
                    restart = j
                    break
                if restart is not None:
                    break
            i = restart if restart is not None else i - 1
        return levels

    def contains(self, g):
        g = g.array() if isinstance(g, Permutation) else np.asarray(g, dtype=np.int64)
        if len(g) != self.degree:
            return False
        h, j = self._sift(g, self.levels)
        return j == len(self.levels) and np.array_equal(h, np.arange(self.degree))

    def element_array(self, max_elements=2 * 10**6):
        """All elements as rows of an image array, in canonical order."""
        if self.order > max_elements:
            raise ResourceError(f"order {self.order} exceeds enumeration bound {max_elements}")
        dt = point_dtype(self.degree)
        elts = np.arange(self.degree, dtype=np.int64)[None, :]
        for lv in reversed(self.levels):
            us = list(lv.transversal.values())
            elts = np.concatenate([u[elts] for u in us])
        elts = elts.astype(dt)
        return elts[np.argsort(elts.view(np.dtype((np.void, elts.shape[1] * dt.itemsize))).ravel())]

    def __repr__(self):
        return f"PermGroup(degree={self.degree}, order={self.order})"


def make_perm_group(generators, degree=None, **bounds):
    return PermGroup(generators, degree=degree, **bounds)


def read_group_text(text):
    """Parse the ``degree N`` / ``count K`` / image-lines format."""
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if len(lines) < 2:
        raise ConfigError("group file needs 'degree' and 'count' lines")
    try:
        key, n = lines[0].split()
        key2, k = lines[1].split()
        n, k = int(n), int(k)
    except ValueError as exc:
        raise ConfigError(f"malformed group header: {exc}") from None
    if key != "degree" or key2 != "count":
        raise ConfigError("group file must start with 'degree N' then 'count K'")
    rows = lines[2:]
    if len(rows) != k:
        raise ConfigError(f"expected {k} generator lines, found {len(rows)}")
    gens = []
    for row in rows:
        img = tuple(int(x) for x in row.split())
        if len(img) != n:
            raise ConfigError(f"generator has {len(img)} images, expected {n}")
        gens.append(img)
    return gens, n


def load_group_file(path, **bounds):
    gens, n = read_group_text(Path(path).read_text())
    return PermGroup(gens, degree=n, **bounds)


def format_group_text(gens, degree, comments=()):
    out = [f"# {c}" for c in comments]
    out += [f"degree {degree}", f"count {len(gens)}"]
    for g in gens:
        img = g.images if isinstance(g, Permutation) else g
        out.append(" ".join(str(int(x)) for x in img))
    return "\n".join(out) + "\n"
