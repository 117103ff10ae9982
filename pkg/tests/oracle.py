"""Brute-force reference computations on permutation tuples.

Nothing here imports fusionkit: groups are Python sets of tuples, products use
the right action (g*h)[x] = h[g[x]], and every answer comes from exhaustive
enumeration.  Slow by design; only used on groups of a few hundred elements.
"""

from itertools import combinations


def mul(a, b):
    return tuple(b[i] for i in a)


def inv(a):
    out = [0] * len(a)
    for i, j in enumerate(a):
        out[j] = i
    return tuple(out)


def conj(x, g):
    return mul(mul(inv(g), x), g)


def identity(n):
    return tuple(range(n))


def generate(gens, n=None):
    n = n if n is not None else len(gens[0])
    e = identity(n)
    seen, frontier = {e}, [e]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = mul(a, g)
                if b not in seen:
                    seen.add(b)
                    nxt.append(b)
        frontier = nxt
    return frozenset(seen)


def order_of(x):
    e, y, k = identity(len(x)), x, 1
    while y != e:
        y, k = mul(y, x), k + 1
    return k


def centralizer(G, X):
    return frozenset(g for g in G if all(mul(g, x) == mul(x, g) for x in X))


def normalizer(G, H):
    return frozenset(g for g in G if frozenset(conj(h, g) for h in H) == H)


def conjugacy_class(G, x):
    return frozenset(conj(x, g) for g in G)


def sylow(G, p):
    """A Sylow p-subgroup, grown one element at a time inside normalizers."""
    n, target = len(G), 1
    while n % p == 0:
        n //= p
        target *= p
    P = frozenset([identity(len(next(iter(G))))])
    while len(P) < target:
        N = normalizer(G, P)
        for g in sorted(N):
            if g in P or not _p_power(order_of(g), p):
                continue
            Q = generate(list(P) + [g])
            if _p_power(len(Q), p):
                P = Q
                break
    return P


def _p_power(n, p):
    while n % p == 0:
        n //= p
    return n == 1


def subgroups(G):
    """All subgroups, by closing joins of cyclic subgroups."""
    cyclic = {generate([g]) for g in G}
    subs = set(cyclic)
    frontier = set(cyclic)
    while frontier:
        nxt = set()
        for H in frontier:
            for C in cyclic:
                if not C <= H:
                    K = generate(list(H) + list(C))
                    if K not in subs:
                        subs.add(K)
                        nxt.add(K)
        frontier = nxt
    return sorted(subs, key=lambda H: (len(H), sorted(H)))


def induced_maps(G, P, Q):
    """{x -> x^g : g in G, P^g <= Q}, each map as a frozenset of pairs."""
    out = set()
    for g in G:
        img = {x: conj(x, g) for x in P}
        if all(y in Q for y in img.values()):
            out.add(frozenset(img.items()))
    return out


def aut_F_order(G, P):
    return len(normalizer(G, P)) // len(centralizer(G, P))


def f_class(G, S, P):
    """S-subgroups G-conjugate to P."""
    out = set()
    for g in G:
        Q = frozenset(conj(x, g) for x in P)
        if Q <= S:
            out.add(Q)
    return out


def is_centric(G, S, P):
    return all(centralizer(S, Q) <= Q for Q in f_class(G, S, P))


def has_strongly_embedded(X, p):
    """X given as a set of permutations; brute force over subgroups H < X."""
    if len(X) % p:
        return False
    for H in subgroups(X):
        if len(H) == len(X) or len(H) % p:
            continue
        if all(_coprime(len(H & frozenset(conj(h, x) for h in H)), p) for x in X if x not in H):
            return True
    return False


def _coprime(n, p):
    return n % p != 0


def out_as_perm_group(G, S, P):
    """Out_F(P) realised as permutations of the Inn(P)-cosets of Aut_F(P)."""
    members = sorted(P)
    idx = {x: i for i, x in enumerate(members)}
    auts = set()
    for g in normalizer(G, P):
        auts.add(tuple(idx[conj(x, g)] for x in members))
    inner = {tuple(idx[conj(x, h)] for x in members) for h in P}
    cosets = {}
    for a in auts:
        key = frozenset(mul(i, a) for i in inner)
        cosets[key] = a
    keys = sorted(cosets, key=lambda k: min(k))
    kidx = {k: i for i, k in enumerate(keys)}
    perms = []
    for k in keys:
        a = cosets[k]
        perms.append(tuple(kidx[frozenset(mul(b, a) for b in kk)] for kk in keys))
    return frozenset(perms)


def is_radical(G, S, P, p):
    X = out_as_perm_group(G, S, P)
    # O_p(X): intersection of Sylow p-subgroups = largest normal p-subgroup
    normal_p = [H for H in subgroups(X) if _p_power(len(H), p) and normalizer(X, H) == X]
    return max(len(H) for H in normal_p) == 1


def essentials(G, S, p):
    """(order, class size) for each F-class of essential subgroups, by brute force."""
    seen, out = set(), []
    for P in subgroups(S):
        if P == S or P in seen:
            continue
        cls = f_class(G, S, P)
        seen |= cls
        if not is_centric(G, S, P):
            continue
        X = out_as_perm_group(G, S, P)
        if has_strongly_embedded(X, p):
            out.append((len(P), len(cls)))
    return sorted(out)


def strongly_closed(G, S, Q):
    return all(conj(x, g) in Q for x in Q for g in G if conj(x, g) in S)


def derived(G):
    return generate([mul(mul(inv(a), inv(b)), mul(a, b)) for a, b in combinations(sorted(G), 2)]
                    or [identity(len(next(iter(G))))])


def focal(G, S):
    """S intersected with the derived subgroup of G."""
    return S & derived(G)
