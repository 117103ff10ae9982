"""Central extensions of finite groups by elementary abelian groups, via 2-cocycles over GF(p).

A normalized cocycle f: P x P -> GF(p) satisfies f(a, b) + f(ab, c) = f(b, c) + f(a, bc).
Taking c over a generating set g of P already forces the identity for all c
(the right nucleus of the extended multiplication is closed under products),
and along a spanning tree of the Cayley graph that identity reads

    f(a, bg) = f(a, b) + f(ab, g) - f(b, g).

So f is determined by the values f(x, g); the non-tree edges give the linear
constraints on those values.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ResourceError
from .group import EnumeratedGroup, SubgroupHandle, center, derived_subgroup, small_generating_set
from .isomorphism import fingerprint, isomorphism_test
from .pgroup import nilpotency_class

MAX_BASE_ORDER = 64
MAX_CENTER_RANK = 2
MAX_CLASSES = 2**12


# -- linear algebra over GF(p) --------------------------------------------------------

def row_reduce(M, p):
    """Reduced row echelon form over GF(p) and the pivot columns."""
    M = np.array(M, dtype=np.int64) % p
    rows, cols = M.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(M[r:, c])
        if not len(nz):
            continue
        k = r + int(nz[0])
        if k != r:
            M[[r, k]] = M[[k, r]]
        M[r] = (M[r] * pow(int(M[r, c]), -1, p)) % p
        col = M[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if len(hit):
            M[hit] = (M[hit] - col[hit, None] * M[r][None, :]) % p
        pivots.append(c)
        r += 1
    return M[:r], pivots


def nullspace(M, p, ncols=None):
    """A basis (rows) of {x : M x = 0} over GF(p)."""
    M = np.asarray(M, dtype=np.int64)
    n = M.shape[1] if M.size else (ncols or 0)
    if M.size == 0:
        return np.eye(n, dtype=np.int64)
    R, piv = row_reduce(M, p)
    free = [c for c in range(n) if c not in set(piv)]
    basis = np.zeros((len(free), n), dtype=np.int64)
    for i, fc in enumerate(free):
        basis[i, fc] = 1
        for r, pc in enumerate(piv):
            basis[i, pc] = (-R[r, fc]) % p
    return basis


def rank(M, p):
    M = np.asarray(M)
    if M.size == 0:
        return 0
    return len(row_reduce(M, p)[1])


# -- cocycle spaces -------------------------------------------------------------------

@dataclass
class CocycleSpace:
    base: EnumeratedGroup
    p: int
    rank_z: int                      # Z = (C_p)^rank_z
    cocycles: np.ndarray             # basis of Z^2(P, GF(p)), shape (d, |P|, |P|)
    coboundaries: np.ndarray         # basis of B^2(P, GF(p)), shape (b, |P|, |P|)
    h2_reps: np.ndarray              # cocycles spanning a complement of B^2, shape (h, |P|, |P|)
    generators: list = field(default_factory=list)

    @property
    def scalar_h2(self):
        return len(self.h2_reps)

    @property
    def h2_dimension(self):
        """dim H^2(P, Z) = dim Z^2 - dim B^2, with Z of rank rank_z."""
        return self.rank_z * self.scalar_h2

    @property
    def dimension(self):
        return self.rank_z * len(self.cocycles)

    def cocycle(self, vector, basis="cocycles"):
        """The Z-valued cocycle (|P| x |P| x rank_z) with the given coordinates."""
        B = getattr(self, basis)
        v = np.asarray(vector, dtype=np.int64).reshape(self.rank_z, len(B))
        f = np.tensordot(v, B, axes=(1, 0)) % self.p          # (rank_z, |P|, |P|)
        return np.moveaxis(f, 0, -1)


def _cayley_tree(P, gens):
    """BFS order of (b, g, bg) tree edges from the identity and the remaining edges."""
    T = P.table
    seen = np.zeros(P.n, dtype=bool)
    seen[0] = True
    tree, other = [], []
    frontier = [0]
    while frontier:
        nxt = []
        for b in frontier:
            for j, g in enumerate(gens):
                c = int(T[b, g])
                if not seen[c]:
                    seen[c] = True
                    tree.append((b, j, c))
                    nxt.append(c)
                else:
                    other.append((b, j, c))
        frontier = nxt
    if not seen.all():
        raise RuntimeError("generators do not generate")
    return tree, other


def cocycle_space(P: EnumeratedGroup, rank_z=1, p=2) -> CocycleSpace:
    """Normalized 2-cocycles P x P -> GF(p)^rank_z and the coboundaries among them."""
    if P.n > MAX_BASE_ORDER:
        raise ResourceError(f"cocycle spaces are bounded to |P| <= {MAX_BASE_ORDER}")
    if not 1 <= rank_z <= MAX_CENTER_RANK:
        raise ResourceError(f"the center rank is bounded to {MAX_CENTER_RANK}")
    n = P.n
    if n == 1:
        empty = np.zeros((0, 1, 1), dtype=np.int64)
        return CocycleSpace(P, p, rank_z, empty, empty, empty, [])
    gens = small_generating_set(P, np.arange(n))
    d = len(gens)
    T = P.table
    nu = n * d
    # f[a, b] as a vector over the unknowns u[x, j] = f(x, g_j); u[0, j] = 0
    M = np.zeros((n, n, nu), dtype=np.int64)

    def u(x, j):
        e = np.zeros(nu, dtype=np.int64)
        if x != 0:
            e[x * d + j] = 1
        return e

    U = np.zeros((n, d, nu), dtype=np.int64)
    for x in range(n):
        for j in range(d):
            U[x, j] = u(x, j)
    tree, other = _cayley_tree(P, gens)
    a = np.arange(n)
    for b, j, c in tree:
        # f(a, bg) = f(a, b) + f(ab, g) - f(b, g), for every a at once
        M[:, c] = (M[:, b] + U[T[a, b], j] - U[b, j][None, :]) % p
    rows = []
    for b, j, c in other:
        rows.append((M[:, c] - M[:, b] - U[T[a, b], j] + U[b, j][None, :]) % p)
    C = np.concatenate(rows) if rows else np.zeros((0, nu), dtype=np.int64)
    C = C[C.any(axis=1)]
    C = np.unique(C, axis=0) if len(C) else C
    # drop the pinned unknowns u[0, j]
    live = np.array([x != 0 for x in range(n) for _ in range(d)])
    sol = nullspace(C[:, live], p, ncols=int(live.sum()))
    full = np.zeros((len(sol), nu), dtype=np.int64)
    full[:, live] = sol
    Z2 = np.einsum("abk,ik->iab", M, full) % p
    # coboundaries of t: P -> GF(p), t(1) = 0
    B = []
    for x in range(1, n):
        t = np.zeros(n, dtype=np.int64)
        t[x] = 1
        B.append((t[:, None] + t[None, :] - t[T]) % p)
    B = np.array(B)
    # coordinates of a cocycle are its values f(x, g_j)
    coords = lambda F: F[:, :, gens].reshape(len(F), -1)[:, live]
    Bc = coords(B)
    Rb, _ = row_reduce(Bc, p)
    Bbasis = B[_independent(Bc, p)]
    reps = []
    cur = Rb
    for i, z in enumerate(coords(Z2)):
        trial = np.vstack([cur, z[None, :]]) if len(cur) else z[None, :]
        if rank(trial, p) > len(cur):
            reps.append(i)
            cur = row_reduce(trial, p)[0]
    space = CocycleSpace(P, p, rank_z, Z2, Bbasis, Z2[reps], gens)
    return space


def _independent(rows, p):
    keep = []
    cur = np.zeros((0, rows.shape[1]), dtype=np.int64)
    for i, r in enumerate(rows):
        trial = np.vstack([cur, r[None, :]])
        if rank(trial, p) > len(cur):
            keep.append(i)
            cur = row_reduce(trial, p)[0]
    return keep


def is_cocycle(P: EnumeratedGroup, f, p):
    """The cocycle identity over all triples, and normalization."""
    T = P.table
    f = np.asarray(f) % p
    if f.ndim == 2:
        f = f[:, :, None]
    if f[0].any() or f[:, 0].any():
        return False
    a = np.arange(P.n)
    lhs = f[a[:, None, None], a[None, :, None]] + f[T[:, :, None], a[None, None, :]]
    rhs = f[a[None, :, None], a[None, None, :]] + f[a[:, None, None], T[None, :, :]]
    return bool(np.all((lhs - rhs) % p == 0))


# -- extensions -------------------------------------------------------------------

@dataclass
class ExtensionGroup:
    table: np.ndarray
    group: EnumeratedGroup           # index a * p^k + z  <->  (a, z)
    center_subgroup: SubgroupHandle  # the copy of Z
    cocycle: np.ndarray
    base: EnumeratedGroup
    vector: tuple = ()

    def quotient_label(self):
        zsize = self.group.n // self.base.n
        return np.arange(self.group.n) // zsize


def _z_digits(k, p):
    return np.array(list(itertools.product(range(p), repeat=k))[::1], dtype=np.int64)[:, ::-1] \
        if k else np.zeros((1, 0), dtype=np.int64)


def extension_from_cocycle(P: EnumeratedGroup, f, p, vector=()):
    f = np.asarray(f, dtype=np.int64) % p
    if f.ndim == 2:
        f = f[:, :, None]
    k = f.shape[2]
    zs = p**k
    digits = _z_digits(k, p)                      # digits[i] = vector of z-index i
    weights = p ** np.arange(k)
    n = P.n * zs
    a = np.repeat(np.arange(P.n), zs)
    z = np.tile(np.arange(zs), P.n)
    prod_a = P.table[a[:, None], a[None, :]]
    zsum = (digits[z][:, None, :] + digits[z][None, :, :] + f[a[:, None], a[None, :]]) % p
    table = prod_a * zs + zsum @ weights
    if n <= 256:
        lhs = table[table[:, :, None], np.arange(n)[None, None, :]]
        rhs = table[np.arange(n)[:, None, None], table[None, :, :]]
        if not np.array_equal(lhs, rhs):
            raise RuntimeError("the extension table is not associative")
    G = EnumeratedGroup.from_table(table, name="extension")
    Z = SubgroupHandle(G, np.arange(zs))
    ext = ExtensionGroup(table, G, Z, f, P, tuple(vector))
    _audit_extension(ext)
    return ext


def _audit_extension(ext):
    G, Z = ext.group, ext.center_subgroup
    T = G.table
    if not np.array_equal(T[Z.members][:, :], T[:, Z.members].T):
        raise RuntimeError("Z is not central in the extension")
    lab = ext.quotient_label()
    # (a, x)(b, y) lies over ab
    if not np.array_equal(lab[T], ext.base.table[lab[:, None], lab[None, :]]):
        raise RuntimeError("the projection onto P is not a homomorphism")


def build_extension(space: CocycleSpace, vector) -> ExtensionGroup:
    """The extension for the cocycle with the given coordinates in the cocycle basis."""
    vector = np.asarray(vector, dtype=np.int64)
    if len(vector) != space.dimension:
        raise ConfigError(f"vector length {len(vector)} differs from the space dimension {space.dimension}")
    f = space.cocycle(vector) if space.dimension else np.zeros((space.base.n, space.base.n, space.rank_z),
                                                                dtype=np.int64)
    return extension_from_cocycle(space.base, f, space.p, vector)


def _h2_vectors(space):
    h = space.scalar_h2
    total = space.p ** (h * space.rank_z)
    if total > MAX_CLASSES:
        raise ResourceError(f"{total} cohomology classes exceed the enumeration bound {MAX_CLASSES}")
    return itertools.product(range(space.p), repeat=h * space.rank_z)


def enumerate_extensions(P: EnumeratedGroup, rank_z=1, p=2, predicate=None, space=None):
    """One extension per isomorphism type of the extension group, over all classes in H^2.

    Classes are taken in lexicographic order of their coordinates; the first
    extension of each isomorphism type is kept.
    """
    space = space or cocycle_space(P, rank_z, p)
    kept, prints = [], []
    for vec in _h2_vectors(space):
        v = np.array(vec, dtype=np.int64)
        f = space.cocycle(v, basis="h2_reps") if len(v) else \
            np.zeros((P.n, P.n, rank_z), dtype=np.int64)
        ext = extension_from_cocycle(P, f, p, vec)
        if predicate is not None and not predicate(ext):
            continue
        fp = fingerprint(ext.group)
        if any(fp == q and isomorphism_test(ext.group, e.group) is not None
               for q, e in zip(prints, kept)):
            continue
        kept.append(ext)
        prints.append(fp)
    return kept


# -- predicates and the catalog-side count --------------------------------------------

def class_two_center_is_derived(order=4):
    """Nilpotency class two with Z(X) = X' of the given order."""
    def pred(ext):
        G = ext.group if isinstance(ext, ExtensionGroup) else ext
        if G.whole().is_abelian() or nilpotency_class(G) != 2:
            return False
        Z, D = center(G), derived_subgroup(G)
        return Z == D and Z.order == order
    return pred


def central_quotients(G: EnumeratedGroup, p=2):
    """G/<z> for each central element z of order p."""
    from .fusion.system import quotient_group
    Z = center(G)
    out = []
    for z in Z.members[1:]:
        if G.element_orders[z] != p:
            continue
        N = SubgroupHandle.generated(G, [int(z)])
        out.append((int(z), quotient_group(G, N)[0]))
    return out


def has_central_quotient(G: EnumeratedGroup, P: EnumeratedGroup, p=2):
    """Some central subgroup of order p has quotient isomorphic to P."""
    if G.n != p * P.n:
        return False
    fpP = fingerprint(P)
    for _, Q in central_quotients(G, p):
        if fingerprint(Q) == fpP and isomorphism_test(Q, P) is not None:
            return True
    return False


def catalog_extension_count(entries, P: EnumeratedGroup, p=2):
    """Catalog groups of order p|P| with a central C_p and quotient isomorphic to P."""
    from .catalog import catalog_search
    return catalog_search(entries, lambda e: e.order == p * P.n and has_central_quotient(e.group, P, p))


def l34_search_by_extensions(p=2):
    """Order-16 groups of class two with Z = X' of order 4, as central C2-extensions of Dih(8)."""
    from .pgroup import reference_dihedral8
    D8 = reference_dihedral8()
    return enumerate_extensions(D8, 1, p, predicate=class_two_center_is_derived(4))


def l34_search_by_catalog(entries, p=2):
    """The same search over the order-16 catalog entries."""
    from .catalog import catalog_search
    from .pgroup import reference_dihedral8
    D8 = reference_dihedral8()
    pred = class_two_center_is_derived(4)
    return catalog_search(entries, lambda e: e.order == 16 and pred(e.group)
                          and has_central_quotient(e.group, D8, p))
