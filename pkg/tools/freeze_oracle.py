"""Print brute-force reference data for the small corpus, as a Python literal.

Run from the repository root:  python tools/freeze_oracle.py > tests/frozen_oracle.py
The generators below are written out by hand, independently of fusionkit.
"""

import sys
from itertools import permutations
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

import oracle as O  # noqa: E402


def cycle(n, *cycles):
    img = list(range(n))
    for c in cycles:
        for a, b in zip(c, c[1:] + c[:1]):
            img[a] = b
    return tuple(img)


def fano():
    """Collineations of the plane with lines {i, i+1, i+3} mod 7, by filtering Sym(7)."""
    lines = {frozenset({i % 7, (i + 1) % 7, (i + 3) % 7}) for i in range(7)}
    return frozenset(g for g in permutations(range(7))
                     if all(frozenset(g[x] for x in L) in lines for L in lines))


GROUPS = {
    "builtin:sym:3": lambda: O.generate([cycle(3, (0, 1)), cycle(3, (0, 1, 2))]),
    "builtin:sym:4": lambda: O.generate([cycle(4, (0, 1)), cycle(4, (0, 1, 2, 3))]),
    "builtin:dihedral:8": lambda: O.generate([cycle(4, (0, 1, 2, 3)), cycle(4, (1, 3))]),
    "builtin:psl3:2": fano,
    "builtin:alt:6": lambda: O.generate([cycle(6, (0, 1, 2)), cycle(6, (1, 2, 3, 4, 5))]),
    "builtin:sym:6": lambda: O.generate([cycle(6, (0, 1)), cycle(6, (0, 1, 2, 3, 4, 5))]),
}


def profile(G, p=2):
    S = O.sylow(G, p)
    rows = []
    for P in O.subgroups(S):
        rows.append((len(P), O.aut_F_order(G, P), len(O.induced_maps(G, P, S)),
                     O.is_centric(G, S, P), O.strongly_closed(G, S, P)))
    return {
        "order": len(G),
        "sylow": len(S),
        "subgroups": len(rows),
        "rows": sorted(rows),
        "essentials": O.essentials(G, S, p),
        "focal": len(O.focal(G, S)),
        "involution_class_sizes": sorted({len(O.conjugacy_class(G, x)) for x in G
                                          if O.order_of(x) == 2}),
    }


def main():
    out = {name: profile(build()) for name, build in GROUPS.items()}
    print('"""Brute-force reference data from tools/freeze_oracle.py (do not edit by hand)."""')
    print()
    print("FROZEN = {")
    for name, d in out.items():
        print(f"    {name!r}: {{")
        for k, v in d.items():
            print(f"        {k!r}: {v!r},")
        print("    },")
    print("}")


if __name__ == "__main__":
    main()
