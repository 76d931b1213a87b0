"""Brute-force reference computations used to check the package.

Everything here works from plain adjacency lists with Fractions and
itertools, sharing no code with mixcert beyond reading ``g.edges()``.
"""

import itertools
from fractions import Fraction


def adjacency(g):
    adj = [set() for _ in range(g.n)]
    for u, v in g.edges():
        adj[u].add(v)
        adj[v].add(u)
    return adj


def walk_distribution(g, v, t):
    adj = adjacency(g)
    d = {v: Fraction(1)}
    for _ in range(t):
        nxt = {}
        for u, p in d.items():
            share = p / len(adj[u])
            for w in adj[u]:
                nxt[w] = nxt.get(w, 0) + share
        d = nxt
    return [d.get(u, Fraction(0)) for u in range(g.n)]


def tv_uniform(dist):
    n = len(dist)
    return sum(abs(p - Fraction(1, n)) for p in dist) / 2


def mixing_time(g, v, threshold, t_max):
    for t in range(t_max + 1):
        if tv_uniform(walk_distribution(g, v, t)) < threshold:
            return t
    return None


def boundary(g, X):
    X = set(X)
    return sum((u in X) != (v in X) for u, v in g.edges())


def subsets(n, lo=1, hi=None):
    hi = n if hi is None else hi
    for s in range(lo, hi + 1):
        yield from itertools.combinations(range(n), s)


def conductance(g):
    n, D = g.n, g.degree(0)
    return min(Fraction(n * boundary(g, X), D * len(X) * (n - len(X)))
               for X in subsets(n, 1, n - 1))


def min_expansion_ratio(g, lo, hi):
    return min(Fraction(boundary(g, X), len(X)) for X in subsets(g.n, lo, hi))


def external_neighbourhood(g, W):
    adj = adjacency(g)
    W = set(W)
    return {u for w in W for u in adj[w]} - W


def largest_component_after(g, S):
    adj = adjacency(g)
    left = set(range(g.n)) - set(S)
    best = 0
    while left:
        stack = [left.pop()]
        size = 1
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w in left:
                    left.remove(w)
                    stack.append(w)
                    size += 1
        best = max(best, size)
    return best


def min_separator_size(g):
    limit = 2 * g.n // 3
    for s in range(g.n + 1):
        for S in itertools.combinations(range(g.n), s):
            if largest_component_after(g, S) <= limit:
                return s


def longest_cycle(g):
    """Longest cycle length by extending simple paths from their minimum vertex."""
    adj = adjacency(g)
    best = 0

    def extend(path, used):
        nonlocal best
        u = path[-1]
        for w in adj[u]:
            if w == path[0] and len(path) >= 3:
                best = max(best, len(path))
            elif w not in used and w > path[0]:
                used.add(w)
                path.append(w)
                extend(path, used)
                path.pop()
                used.remove(w)

    for s in range(g.n):
        extend([s], {s})
    return best or None


def walk_count(g, k, subset=None):
    """Number of k-walks in the induced subgraph, by repeated matrix-vector products."""
    vs = sorted(range(g.n) if subset is None else subset)
    index = {v: i for i, v in enumerate(vs)}
    adj = adjacency(g)
    local = [[index[w] for w in adj[v] if w in index] for v in vs]
    counts = [1] * len(vs)
    for _ in range(k):
        counts = [sum(counts[j] for j in local[i]) for i in range(len(vs))]
    return sum(counts)
