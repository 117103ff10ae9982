"""Permutation representations of the small classical groups.

Matrices act on row vectors from the right.  Projective points are stored
normalized (first nonzero coordinate 1) and listed lexicographically.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .errors import ConfigError
from .fields import field


def _gcd(a, b):
    return math.gcd(a, b)


class ProjectiveAction:
    """Action of invertible matrices on a fixed list of projective points."""

    def __init__(self, F, points):
        self.F = F
        self.points = [tuple(p) for p in points]
        self.index = {p: i for i, p in enumerate(self.points)}
        self._pts = np.array(self.points, dtype=np.int64)

    @property
    def degree(self):
        return len(self.points)

    def perm(self, M):
        imgs = self.F.vecmat(self._pts, np.asarray(M))
        out = []
        for v in imgs:
            key = tuple(int(x) for x in self.F.normalize(v))
            if key not in self.index:
                raise ValueError("matrix does not preserve the point set")
            out.append(self.index[key])
        return tuple(out)


def identity(n):
    return np.eye(n, dtype=np.int64)


def elementary(n, i, j, a):
    M = identity(n)
    M[i, j] = a
    return M


def matrix_closure(F, gens, limit=10**5):
    """All products of the given matrices (small groups only)."""
    n = len(gens[0])
    start = identity(n)
    seen = {start.tobytes(): start}
    frontier = [start]
    while frontier:
        nxt = []
        for A in frontier:
            for g in gens:
                B = F.matmul(A, g)
                key = B.tobytes()
                if key not in seen:
                    seen[key] = B
                    nxt.append(B)
        if len(seen) > limit:
            raise RuntimeError("matrix closure too large")
        frontier = nxt
    return list(seen.values())


def conjugate_bar(F, M, power):
    """Entrywise Frobenius x -> x^power."""
    return np.vectorize(lambda x: F.power(int(x), power))(np.asarray(M))


# -- PSL_3(q), PSL_2(q), SL_2(q) ---------------------------------------------

def psl_generators(q, n):
    F = field(q)
    gens = []
    for i, j in itertools.permutations(range(n), 2):
        for a in F.additive_basis():
            gens.append(elementary(n, i, j, a))
    return F, gens


def psl3(q):
    F, mats = psl_generators(q, 3)
    act = ProjectiveAction(F, F.projective_points(3))
    order = q**3 * (q**3 - 1) * (q**2 - 1) // _gcd(3, q - 1)
    return act, mats, order


def psl2(q):
    F, mats = psl_generators(q, 2)
    act = ProjectiveAction(F, F.projective_points(2))
    order = q * (q * q - 1) // _gcd(2, q - 1)
    return act, mats, order


class VectorAction(ProjectiveAction):
    """Action on nonzero vectors (faithful for linear groups)."""

    def perm(self, M):
        imgs = self.F.vecmat(self._pts, np.asarray(M))
        return tuple(self.index[tuple(int(x) for x in v)] for v in imgs)


def sl2(q):
    F, mats = psl_generators(q, 2)
    pts = sorted(p for p in itertools.product(range(q), repeat=2) if any(p))
    return VectorAction(F, pts), mats, q * (q * q - 1)


def unitriangular(F, n, form=None, frob=None):
    """Upper unitriangular matrices, optionally restricted to isometries of ``form``.

    For a sesquilinear form pass ``frob`` (the exponent of the field
    automorphism applied to the second argument).
    """
    slots = [(i, j) for i in range(n) for j in range(i + 1, n)]
    out = []
    for vals in itertools.product(range(F.q), repeat=len(slots)):
        M = identity(n)
        for (i, j), v in zip(slots, vals):
            M[i, j] = v
        if form is None or preserves_form(F, M, form, frob):
            out.append(M)
    return out


def preserves_form(F, M, J, frob=None):
    Mb = M if frob is None else conjugate_bar(F, M, frob)
    return np.array_equal(F.matmul(F.matmul(M, J), Mb.T), np.asarray(J))


def unitriangular_generators(F, mats):
    """A small generating set of a group of unitriangular matrices (greedy)."""
    chosen = []
    have = {identity(len(mats[0])).tobytes()}
    for M in mats:
        if M.tobytes() not in have:
            chosen.append(M)
            have = {A.tobytes() for A in matrix_closure(F, chosen)}
    return chosen


# -- PSp_4(q) ------------------------------------------------------------------

def symplectic_form(F):
    """Alternating form pairing e0 with e3 and e1 with e2."""
    J = np.zeros((4, 4), dtype=np.int64)
    J[0, 3] = J[1, 2] = 1
    J[3, 0] = J[2, 1] = F.neg[1]
    return J


def symplectic_transvection(F, v, lam, J):
    # x -> x + lam * B(x, v) v ; as a matrix acting on row vectors
    v = np.asarray(v)
    Jv = F.vecmat(v[None, :], J.T)[0]  # column of B(e_i, v)
    M = identity(4)
    for i in range(4):
        c = F.mul[lam, Jv[i]]
        for j in range(4):
            M[i, j] = F.add[M[i, j], F.mul[c, v[j]]]
    return M


def symplectic_unipotent(F):
    """The upper unitriangular symplectic matrices: a Sylow p-subgroup of Sp_4(q)."""
    J = symplectic_form(F)
    gens = []
    for a in F.additive_basis():
        for v in [(0, 0, 0, 1), (0, 0, 1, 0), (0, 0, 1, 1)]:
            gens.append(symplectic_transvection(F, v, a, J))
        M = identity(4)
        M[0, 1] = a
        M[2, 3] = F.neg[a]
        gens.append(M)
    assert all(preserves_form(F, M, J) for M in gens)
    mats = matrix_closure(F, gens)
    if len(mats) != F.q**4:
        raise RuntimeError("symplectic unipotent radical has the wrong order")
    return mats


def psp4(q):
    F = field(q)
    J = symplectic_form(F)
    vecs = [np.eye(4, dtype=np.int64)[i] for i in range(4)]
    vecs += [np.array(v) for v in [(1, 1, 0, 0), (0, 1, 0, 1), (1, 0, 1, 0), (0, 0, 1, 1)]]
    mats = [symplectic_transvection(F, v, a, J) for v in vecs for a in F.additive_basis()]
    for M in mats:
        assert preserves_form(F, M, J)
    act = ProjectiveAction(F, F.projective_points(4))
    order = q**4 * (q**2 - 1) * (q**4 - 1) // _gcd(2, q - 1)
    return act, mats, order


# -- PSU_3(q) ------------------------------------------------------------------

def hermitian_form():
    J = np.zeros((3, 3), dtype=np.int64)
    J[0, 2] = J[1, 1] = J[2, 0] = 1
    return J


def psu3(q):
    F = field(q * q)
    J = hermitian_form()
    upper = unitriangular(F, 3, J, frob=q)
    # reversing the basis fixes J and turns upper isometries into lower ones
    lower = [np.ascontiguousarray(M[::-1, ::-1]) for M in upper]
    pts = [p for p in F.projective_points(3) if _hermitian(F, p, p, J, q) == 0]
    act = ProjectiveAction(F, pts)
    mats = unitriangular_generators(F, upper) + unitriangular_generators(F, lower)
    order = q**3 * (q**3 + 1) * (q**2 - 1) // _gcd(3, q + 1)
    return act, mats, order, upper


def _hermitian(F, u, v, J, q):
    vb = [F.power(int(x), q) for x in v]
    uJ = F.vecmat(np.array([u]), J)[0]
    return F.dot(uJ, vb)


# -- Sz(q) ---------------------------------------------------------------------

def suzuki_ovoid(F, sigma):
    """The Tits ovoid {(0,0,0,1)} and (1, x, y, xy + x^(sigma+2) + y^sigma)."""
    pts = [(0, 0, 0, 1)]
    for x in range(F.q):
        for y in range(F.q):
            z = F.add[F.add[F.mul[x, y], F.power(x, sigma + 2)], F.power(y, sigma)]
            pts.append((1, x, y, int(z)))
    return sorted(pts)


def suzuki(q):
    m = {8: 1, 32: 2}.get(q)
    if m is None:
        raise ConfigError("Sz(q) supported for q = 8")
    F = field(q)
    sigma = 2 ** (m + 1)
    J = symplectic_form(F)
    pts = suzuki_ovoid(F, sigma)
    act = ProjectiveAction(F, pts)
    borel_u = symplectic_unipotent(F)
    ovoid = set(pts)
    sylow = []
    for M in borel_u:
        imgs = F.vecmat(np.array(pts), M)
        if all(tuple(int(x) for x in F.normalize(v)) in ovoid for v in imgs):
            sylow.append(M)
    if len(sylow) != q * q:
        raise RuntimeError("ovoid stabilizer in the unipotent radical has the wrong order")
    w = np.zeros((4, 4), dtype=np.int64)
    for i in range(4):
        w[i, 3 - i] = 1
    gens = unitriangular_generators(F, sylow)
    mats = gens + [w]
    order = q * q * (q * q + 1) * (q - 1)
    return act, mats, order, sylow
