"""Constructors for the named groups and the small 2-groups data set."""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import classical
from .errors import ConfigError, ResourceError
from .fields import field as gf
from .group import EnumeratedGroup, SubgroupHandle, small_generating_set
from .perm import MAX_ORDER, Permutation, PermGroup, load_group_file

DATA_DIR = Path(__file__).with_name("data")
CATALOG_FILE = "smallgroups.txt"
EXPECTED_COUNTS = {16: 14, 32: 51, 64: 267}

SUPPORTED = {
    "psl3": {2, 3, 4, 5, 7, 8},
    "psp4": {2, 3, 4},
    "psl2": {4, 5, 7, 8, 9, 16},
    "sl2": {2, 3, 4, 5, 7, 8, 9},
    "psu3": {2, 3, 4},
    "sz": {8},
}
EXTRASPECIAL = {"8+", "8-", "32+", "32-", "27+", "27-", "125+", "125-"}


def fixture_dir():
    return Path(os.environ.get("FUSIONKIT_FIXTURES", DATA_DIR))


@dataclass(frozen=True)
class GroupSpec:
    family: str
    parameter: object

    def __str__(self):
        if self.family == "file":
            return f"file:{self.parameter}"
        if self.family == "catalog-id":
            return "builtin:catalog-id:{}.{}".format(*self.parameter)
        return f"builtin:{self.family}:{self.parameter}"

    @property
    def label(self):
        names = {"psl3": "PSL3({})", "psp4": "PSp4({})", "psl2": "PSL2({})", "sl2": "SL2({})",
                 "psu3": "PSU3({})", "sz": "Sz({})", "alt": "Alt({})", "sym": "Sym({})",
                 "dihedral": "Dih({})", "quaternion": "Q({})", "extraspecial": "{}",
                 "product": "{}"}
        if self.family == "catalog-id":
            return "SmallGroup({},{})".format(*self.parameter)
        if self.family == "file":
            return Path(self.parameter).name
        return names[self.family].format(self.parameter)


def parse_spec(text):
    """Parse ``builtin:<family>:<param>`` or ``file:<path>`` (a bare path also works)."""
    text = text.strip()
    if text.startswith("file:"):
        return GroupSpec("file", text[5:])
    if not text.startswith("builtin:"):
        if Path(text).suffix in (".perm", ".txt") or os.sep in text:
            return GroupSpec("file", text)
        raise ConfigError(f"group spec {text!r} is neither builtin:<family>:<param> nor a file")
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"malformed builtin spec {text!r}")
    _, family, param = parts
    if family in SUPPORTED:
        if not param.isdigit() or int(param) not in SUPPORTED[family]:
            raise ConfigError(f"{family} supported for q in {sorted(SUPPORTED[family])}, not {param!r}")
        return GroupSpec(family, int(param))
    if family in ("alt", "sym"):
        if not param.isdigit() or not 2 <= int(param) <= 10:
            raise ConfigError(f"{family} supported for degrees 2..10, not {param!r}")
        return GroupSpec(family, int(param))
    if family == "dihedral":
        if not param.isdigit() or int(param) < 4 or int(param) % 2:
            raise ConfigError("dihedral takes an even group order >= 4")
        return GroupSpec(family, int(param))
    if family == "quaternion":
        if not param.isdigit() or int(param) < 8 or int(param) & (int(param) - 1):
            raise ConfigError("quaternion takes a 2-power group order >= 8")
        return GroupSpec(family, int(param))
    if family == "extraspecial":
        if param not in EXTRASPECIAL:
            raise ConfigError(f"extraspecial supported for {sorted(EXTRASPECIAL)}")
        return GroupSpec(family, param)
    if family in ("catalog-id", "catalog"):
        m = re.fullmatch(r"(\d+)\.(\d+)", param)
        if not m:
            raise ConfigError("catalog-id takes <order>.<index>")
        return GroupSpec("catalog-id", (int(m.group(1)), int(m.group(2))))
    raise ConfigError(f"unknown group family {family!r}")


# -- small permutation groups --------------------------------------------------

def symmetric_gens(n):
    if n < 2:
        return []
    cyc = Permutation.from_cycles(n, list(range(n)))
    return [cyc.images, Permutation.from_cycles(n, [0, 1]).images]


def alternating_gens(n):
    if n < 3:
        return []
    return [Permutation.from_cycles(n, [0, 1, i]).images for i in range(2, n)]


def dihedral_gens(order):
    n = order // 2
    if n == 2:
        return [(1, 0, 3, 2), (2, 3, 0, 1)], 4
    rot = Permutation.from_cycles(n, list(range(n))).images
    ref = tuple((-i) % n for i in range(n))
    return [rot, ref], n


def table_from_function(elements, mul):
    index = {e: i for i, e in enumerate(elements)}
    n = len(elements)
    T = np.empty((n, n), dtype=np.int64)
    for i, a in enumerate(elements):
        for j, b in enumerate(elements):
            T[i, j] = index[mul(a, b)]
    return T


def regular_generators(table):
    """Generators of the right regular representation of a table group."""
    G = EnumeratedGroup.from_table(table)
    gens = small_generating_set(G, np.arange(G.n))
    return [tuple(int(x) for x in G.elements[g]) for g in gens], G.n


def quaternion_table(order):
    n = order // 2  # <a, b | a^n = 1, b^2 = a^(n/2), b^-1 a b = a^-1>
    elements = [(i, j) for j in range(2) for i in range(n)]

    def mul(x, y):
        (i, j), (k, l) = x, y
        if j == 0:
            return ((i + k) % n, l)
        # a^i b a^k b^l = a^(i-k) b^(1+l)
        i2 = (i - k) % n
        if l == 1:
            return ((i2 + n // 2) % n, 0)
        return (i2, 1)

    return table_from_function(elements, mul)


def central_product_table(tables):
    """Central product of 2-groups each with centre of order 2, identifying the centres."""
    from .group import center
    groups = [EnumeratedGroup.from_table(t) for t in tables]
    zs = []
    for G in groups:
        Z = center(G)
        if Z.order != 2:
            raise ValueError("central product needs centres of order 2")
        zs.append(int(Z.members[1]))
    Ts = [np.asarray(G.table) for G in groups]
    elements = []
    import itertools
    for combo in itertools.product(*[range(G.n) for G in groups]):
        elements.append(combo)
    # quotient of the direct product by the diagonal pairs of central involutions
    def canon(x):
        best = x
        for mask in itertools.product((0, 1), repeat=len(x)):
            if sum(mask) % 2:
                continue
            y = tuple(int(Ts[i][x[i], zs[i]]) if m else x[i] for i, m in enumerate(mask))
            best = min(best, y)
        return best
    reps = sorted({canon(x) for x in elements})
    return table_from_function(reps, lambda a, b: canon(tuple(int(Ts[i][a[i], b[i]]) for i in range(len(a)))))


def heisenberg_table(p, exponent_p2=False):
    """Extraspecial group of order p^3: exponent p (Heisenberg) or exponent p^2."""
    elements = [(a, b, c) for a in range(p) for b in range(p) for c in range(p)]
    if not exponent_p2:
        def mul(x, y):
            return ((x[0] + y[0]) % p, (x[1] + y[1]) % p, (x[2] + y[2] + x[0] * y[1]) % p)
    else:
        # <x, y | x^(p^2) = y^p = 1, y^-1 x y = x^(1+p)>, elements x^(a + p c) y^b
        elements = [(e, b) for e in range(p * p) for b in range(p)]

        def mul(u, v):
            (e1, b1), (e2, b2) = u, v
            return ((e1 + e2 * pow(1 + p, b1, p * p)) % (p * p), (b1 + b2) % p)
    return table_from_function(elements, mul)


def extraspecial_table(param):
    sign = param[-1]
    order = int(param[:-1])
    d8 = table_from_function(*_dihedral_elements(8))
    q8 = quaternion_table(8)
    if order == 8:
        return d8 if sign == "+" else q8
    if order in (32, 128):
        k = {32: 2, 128: 3}[order]
        parts = [d8] * k if sign == "+" else [d8] * (k - 1) + [q8]
        return central_product_table(parts)
    p = round(order ** (1 / 3))
    return heisenberg_table(p, exponent_p2=(sign == "-"))


def _dihedral_elements(order):
    n = order // 2
    elements = [(i, j) for j in range(2) for i in range(n)]

    def mul(x, y):
        (i, j), (k, l) = x, y
        return (((i + k) if j == 0 else (i - k)) % n, j ^ l)

    return elements, mul


def direct_product(G: PermGroup, H: PermGroup):
    """G x H acting on the disjoint union of the two point sets."""
    n, m = G.degree, H.degree
    gens = [tuple(g.images) + tuple(range(n, n + m)) for g in G.generators]
    gens += [tuple(range(n)) + tuple(n + x for x in h.images) for h in H.generators]
    return PermGroup(gens, degree=n + m)


def wreath_product_c2(G: PermGroup):
    """G wr C2 acting on two copies of G's points."""
    n = G.degree
    gens = [tuple(g.images) + tuple(range(n, 2 * n)) for g in G.generators]
    swap = tuple(range(n, 2 * n)) + tuple(range(n))
    return PermGroup(gens + [swap], degree=2 * n)


# -- the main constructor ------------------------------------------------------

def _classical(spec):
    fam, q = spec.family, spec.parameter
    if fam == "psl3":
        act, mats, order = classical.psl3(q)
    elif fam == "psl2":
        act, mats, order = classical.psl2(q)
    elif fam == "sl2":
        act, mats, order = classical.sl2(q)
    elif fam == "psp4":
        act, mats, order = classical.psp4(q)
    elif fam == "psu3":
        act, mats, order, _ = classical.psu3(q)
    else:
        act, mats, order, _ = classical.suzuki(q)
    return act, mats, order


def build_group(spec, max_order=MAX_ORDER):
    """A faithful permutation representation; classical orders are checked against their formulas."""
    if isinstance(spec, str):
        spec = parse_spec(spec)
    fam, param = spec.family, spec.parameter
    if fam in SUPPORTED:
        act, mats, order = _classical(spec)
        if order > max_order:
            raise ResourceError(f"{spec.label} has order {order}, beyond the bound {max_order}")
        G = PermGroup([act.perm(M) for M in mats], degree=act.degree, max_order=max_order)
        if G.order != order:
            raise RuntimeError(f"construction of {spec.label} gave order {G.order}, expected {order}")
    elif fam == "sym":
        G = PermGroup(symmetric_gens(param), degree=param)
    elif fam == "alt":
        G = PermGroup(alternating_gens(param), degree=param)
    elif fam == "dihedral":
        gens, n = dihedral_gens(param)
        G = PermGroup(gens, degree=n)
    elif fam == "quaternion":
        G = PermGroup(*regular_generators(quaternion_table(param)))
    elif fam == "extraspecial":
        G = PermGroup(*regular_generators(extraspecial_table(param)))
    elif fam == "catalog-id":
        entry = catalog_entry(*param)
        G = PermGroup(*regular_generators(entry.table))
    elif fam == "file":
        path = Path(param)
        if not path.is_absolute() and not path.exists():
            path = fixture_dir() / path
        if not path.exists():
            raise ConfigError(f"missing fixture {param}")
        G = load_group_file(path, max_order=max_order)
    else:
        raise ConfigError(f"unknown family {fam}")
    G.name = spec.label
    return G


@lru_cache(maxsize=32)
def enumerated(spec_text):
    """Enumerated form of a builtin group (memoized: construction is pure)."""
    spec = parse_spec(spec_text)
    G = build_group(spec)
    return EnumeratedGroup.from_perm_group(G, name=spec.label)


# -- Sylow subgroups from matrix forms -----------------------------------------

def _direct_sylow_perms(spec):
    fam, q = spec.family, spec.parameter
    if fam == "psl3":
        F = gf(q)
        act, _, _ = classical.psl3(q)
        mats = classical.unitriangular(F, 3)
    elif fam == "psp4":
        F = gf(q)
        act, _, _ = classical.psp4(q)
        mats = classical.symplectic_unipotent(F)
    elif fam in ("psl2", "sl2"):
        F = gf(q)
        act = classical.psl2(q)[0] if fam == "psl2" else classical.sl2(q)[0]
        mats = classical.unitriangular(F, 2)
    elif fam == "psu3":
        act, _, _, mats = classical.psu3(q)
    elif fam == "sz":
        act, _, _, mats = classical.suzuki(q)
    else:
        raise ConfigError(f"no unipotent Sylow form for family {fam}")
    if q % 2:
        raise ConfigError("the unipotent form gives a Sylow 2-subgroup only in characteristic 2")
    return np.array([act.perm(M) for M in mats])


def direct_sylow_group(spec):
    """The unipotent Sylow 2-subgroup as a group in its own right (no ambient needed)."""
    if isinstance(spec, str):
        spec = parse_spec(spec)
    return EnumeratedGroup(_direct_sylow_perms(spec), name=f"Syl2({spec.label})")


def build_sylow_2_direct(spec, G: EnumeratedGroup = None):
    """The unipotent Sylow 2-subgroup as a subgroup of the enumerated ambient group."""
    if isinstance(spec, str):
        spec = parse_spec(spec)
    G = G if G is not None else enumerated(str(spec))
    idx = G.lookup(_direct_sylow_perms(spec))
    return SubgroupHandle(G, idx, name=f"Syl2({spec.label})")


# -- the small 2-groups catalog ------------------------------------------------

@dataclass
class CatalogEntry:
    id: tuple
    table: np.ndarray
    provenance: str = ""
    _group: object = field(default=None, repr=False, compare=False)

    @property
    def order(self):
        return self.id[0]

    @property
    def group(self) -> EnumeratedGroup:
        if self._group is None:
            self._group = EnumeratedGroup.from_table(self.table, name="SmallGroup({},{})".format(*self.id))
        return self._group


def check_table(table, full_associativity=True, rng=None):
    T = np.asarray(table)
    n = len(T)
    ref = np.arange(n)
    if not (np.all(np.sort(T, axis=0) == ref[:, None]) and np.all(np.sort(T, axis=1) == ref[None, :])):
        return "not a Latin square"
    if not (np.array_equal(T[0], ref) and np.array_equal(T[:, 0], ref)):
        return "element 0 is not the identity"
    if full_associativity:
        lhs = T[T[:, :, None], ref[None, None, :]]
        rhs = T[ref[:, None, None], T[None, :, :]]
        if not np.array_equal(lhs, rhs):
            return "associativity fails"
    else:
        rng = rng or np.random.default_rng(0)
        a, b, c = rng.integers(0, n, size=(3, 10**4))
        if not np.array_equal(T[T[a, b], c], T[a, T[b, c]]):
            return "associativity fails"
    return None


def load_catalog(path=None, orders=None):
    """Load and verify the small-groups table file."""
    path = Path(path) if path is not None else fixture_dir() / CATALOG_FILE
    if not path.exists():
        raise ConfigError(f"missing catalog file {path}")
    text = path.read_text()
    lines = text.splitlines()
    if not lines or lines[0].strip() != "smallgroups v1":
        raise ConfigError("missing header 'smallgroups v1'")
    provenance = []
    counts = None
    body_start = 1
    for i, line in enumerate(lines[1:], start=1):
        if line.startswith("#"):
            provenance.append(line[1:].strip())
        elif line.startswith("counts"):
            counts = {int(a): int(b) for a, b in (tok.split(":") for tok in line.split()[1:])}
        else:
            body_start = i
            break
    tokens = " ".join(lines[body_start:]).split()
    entries = []
    pos = 0
    note = "; ".join(provenance)
    while pos < len(tokens):
        if tokens[pos] != "group":
            raise ConfigError(f"malformed catalog near token {pos}: expected 'group'")
        order, index = int(tokens[pos + 1]), int(tokens[pos + 2])
        pos += 3
        cells = order * order
        if pos + cells > len(tokens):
            raise ConfigError(f"truncated table for group {order}.{index}")
        if orders is None or order in orders:
            table = np.array(tokens[pos:pos + cells], dtype=np.int64).reshape(order, order)
            problem = check_table(table, full_associativity=order <= 64)
            if problem:
                raise ConfigError(f"group {order}.{index}: {problem}")
            entries.append(CatalogEntry((order, index), table, note))
        pos += cells
    found = {}
    for e in entries:
        found[e.order] = found.get(e.order, 0) + 1
    if counts is not None:
        for order, expected in counts.items():
            if (orders is None or order in orders) and found.get(order, 0) != expected:
                raise ConfigError(f"order {order}: header says {expected} groups, file has {found.get(order, 0)}")
    for order, expected in EXPECTED_COUNTS.items():
        if (orders is None or order in orders) and found.get(order, 0) != expected:
            raise ConfigError(f"order {order}: expected {expected} groups, found {found.get(order, 0)}")
    return sorted(entries, key=lambda e: e.id)


@lru_cache(maxsize=4)
def default_catalog():
    return tuple(load_catalog())


def catalog_entry(order, index):
    for e in default_catalog():
        if e.id == (order, index):
            return e
    raise ConfigError(f"no catalog group {order}.{index}")


def write_catalog(entries, path, provenance=()):
    counts = {}
    for e in entries:
        counts[e.order] = counts.get(e.order, 0) + 1
    out = ["smallgroups v1"]
    out += [f"# {p}" for p in provenance]
    out.append("counts " + " ".join(f"{k}:{v}" for k, v in sorted(counts.items())))
    for e in entries:
        out.append(f"group {e.id[0]} {e.id[1]}")
        out.extend(" ".join(map(str, row)) for row in np.asarray(e.table))
    Path(path).write_text("\n".join(out) + "\n")


def catalog_search(entries, predicate):
    """All and only the entries satisfying ``predicate``, in catalog order."""
    return [e for e in sorted(entries, key=lambda e: e.id) if predicate(e)]
