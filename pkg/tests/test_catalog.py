import numpy as np
import pytest

from fusionkit.catalog import (build_group, build_sylow_2_direct, catalog_search, check_table,
                               default_catalog, direct_sylow_group, enumerated, load_catalog,
                               parse_spec, write_catalog)
from fusionkit.errors import ConfigError
from fusionkit.group import sylow_subgroup, transporter
from fusionkit.isomorphism import isomorphism_test
from fusionkit.pgroup import nilpotency_class, profile


def psl3_order(q):
    d = 3 if q % 3 == 1 else 1
    return q**3 * (q**3 - 1) * (q**2 - 1) // d


def psp4_order(q):
    d = 2 if q % 2 else 1
    return q**4 * (q**2 - 1) * (q**4 - 1) // d


def psu3_order(q):
    d = 3 if q % 3 == 2 else 1
    return q**3 * (q**3 + 1) * (q**2 - 1) // d


def psl2_order(q):
    d = 2 if q % 2 else 1
    return q * (q**2 - 1) // d


@pytest.mark.parametrize("spec,degree,order", [
    ("builtin:psl3:2", 7, psl3_order(2)),
    ("builtin:psl3:3", 13, psl3_order(3)),
    ("builtin:psl3:4", 21, psl3_order(4)),
    ("builtin:psp4:2", 15, psp4_order(2)),
    ("builtin:psp4:3", 40, psp4_order(3)),
    ("builtin:psl2:8", 9, psl2_order(8)),
    ("builtin:psl2:7", 8, psl2_order(7)),
    ("builtin:psu3:3", 28, psu3_order(3)),
    ("builtin:psu3:4", 65, psu3_order(4)),
    ("builtin:sz:8", 65, 8**2 * (8**2 + 1) * (8 - 1)),
    ("builtin:alt:6", 6, 360),
    ("builtin:sym:6", 6, 720),
    ("builtin:dihedral:8", 4, 8),
])
def test_classical_orders_match_formula(spec, degree, order):
    G = build_group(spec)
    assert (G.degree, G.order) == (degree, order)


def test_dihedral8_has_class_two():
    assert nilpotency_class(enumerated("builtin:dihedral:8")) == 2


def test_direct_sylow_psl34_is_special():
    P = profile(direct_sylow_group("builtin:psl3:4"))
    assert P.order == 64 and P.is_special
    assert P.center.order == P.derived.order == P.frattini.order == 4


def test_direct_sylow_psp44():
    P = profile(direct_sylow_group("builtin:psp4:4"))
    assert P.order == 2**8 and P.center.order == 16


def test_direct_sylow_psl28_elementary_abelian():
    P = profile(direct_sylow_group("builtin:psl2:8"))
    assert P.order == 8 and P.omega1.order == 8 and P.nilpotency_class == 1


@pytest.mark.parametrize("spec", ["builtin:psl3:2", "builtin:psl3:4", "builtin:psl2:8", "builtin:psu3:4"])
def test_direct_sylow_conjugate_to_computed(spec):
    G = enumerated(spec)
    D = build_sylow_2_direct(spec, G)
    S = sylow_subgroup(G, 2)
    assert D.order == S.order
    _, reps = transporter(G, D, S)
    assert len(reps) > 0


def test_direct_sylow_rejects_odd_characteristic():
    with pytest.raises(ConfigError):
        direct_sylow_group("builtin:psl3:3")
    with pytest.raises(ConfigError):
        direct_sylow_group("builtin:sym:4")


def test_psp42_isomorphic_to_sym6():
    phi = isomorphism_test(enumerated("builtin:psp4:2"), enumerated("builtin:sym:6"), bound=1024)
    assert phi is not None


# -- parsing ----------------------------------------------------------------------

@pytest.mark.parametrize("bad", ["builtin:psl3:6", "builtin:psl3:x", "builtin:nope:2", "builtin:psl3",
                                 "builtin:dihedral:7", "builtin:quaternion:12", "builtin:sym:40",
                                 "builtin:extraspecial:9+", "builtin:catalog-id:16", "psl3:4"])
def test_unsupported_specs_rejected(bad):
    with pytest.raises(ConfigError):
        parse_spec(bad)


def test_spec_round_trip():
    for text in ["builtin:psl3:4", "builtin:catalog-id:16.3", "builtin:extraspecial:8+"]:
        assert str(parse_spec(text)) == text
    assert parse_spec("file:2x2.psl3_4.perm").family == "file"


def test_missing_fixture_is_config_error():
    with pytest.raises(ConfigError):
        build_group("file:does-not-exist.perm")


# -- the small-groups catalog -------------------------------------------------------

def test_catalog_counts():
    counts = {}
    for e in default_catalog():
        counts[e.order] = counts.get(e.order, 0) + 1
    assert (counts[16], counts[32], counts[64]) == (14, 51, 267)


def test_catalog_abelian_order16():
    # abelian groups of order 2^4 correspond to the 5 partitions of 4
    hits = catalog_search(default_catalog(), lambda e: e.order == 16 and e.group.whole().is_abelian())
    assert len(hits) == 5


def test_catalog_search_false_predicate_empty():
    assert catalog_search(default_catalog(), lambda e: False) == []


def test_catalog_search_sorted():
    hits = catalog_search(list(reversed(default_catalog())), lambda e: e.order == 8)
    assert [e.id for e in hits] == [(8, i) for i in range(1, 6)]


def test_catalog_round_trip(tmp_path):
    entries = [e for e in default_catalog() if e.order <= 16]
    path = tmp_path / "small.txt"
    write_catalog(entries, path, provenance=["copy"])
    again = load_catalog(path, orders={1, 2, 4, 8, 16})
    assert [e.id for e in again] == [e.id for e in entries]
    assert all(np.array_equal(a.table, b.table) for a, b in zip(again, entries))


def test_empty_catalog_missing_header(tmp_path):
    path = tmp_path / "empty.txt"
    path.write_text("")
    with pytest.raises(ConfigError, match="missing header"):
        load_catalog(path)


def test_catalog_count_mismatch(tmp_path):
    path = tmp_path / "short.txt"
    write_catalog([e for e in default_catalog() if e.order == 16][:13], path)
    with pytest.raises(ConfigError):
        load_catalog(path)


def test_catalog_rejects_bad_tables(tmp_path):
    T = np.array([[0, 1, 2], [1, 2, 0], [2, 1, 0]])
    assert check_table(T) == "not a Latin square"
    path = tmp_path / "bad.txt"
    path.write_text("smallgroups v1\ncounts 3:1\ngroup 3 1\n0 1 2\n1 2 0\n2 1 0\n")
    with pytest.raises(ConfigError):
        load_catalog(path)


def test_catalog_tables_are_groups():
    for e in default_catalog():
        if e.order <= 32:
            assert check_table(e.table) is None
