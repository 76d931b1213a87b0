"""Bitmask enumeration kernels (numba).

Vertex sets are int64 bitmasks, so every kernel here requires n <= 62.
"""

import numpy as np
from numba import njit

BIG = np.int64(1) << 62


@njit(cache=True, inline="always")
def popcount(x):
    x = x - ((x >> 1) & 0x5555555555555555)
    x = (x & 0x3333333333333333) + ((x >> 2) & 0x3333333333333333)
    x = (x + (x >> 4)) & 0x0F0F0F0F0F0F0F0F
    return ((x * 0x0101010101010101) >> 56) & 0xFF


@njit(cache=True, inline="always")
def lowest_bit_index(x):
    i = 0
    while (x & 1) == 0:
        x >>= 1
        i += 1
    return i


@njit(cache=True, inline="always")
def lex_smaller(x, y):
    """True when set ``x`` precedes set ``y`` (sorted-tuple lexicographic order, equal sizes)."""
    d = x ^ y
    low = d & -d
    return (x & low) != 0


@njit(cache=True)
def min_boundary_by_size(adj, deg, n):
    """For each size s, the least edge boundary over all s-subsets and a lex-first minimiser.

    Walks all 2**n subsets in Gray-code order, updating the boundary by the
    flipped vertex's degree and its neighbours inside the set.
    """
    best = np.full(n + 1, BIG, dtype=np.int64)
    arg = np.zeros(n + 1, dtype=np.int64)
    mask = np.int64(0)
    e = np.int64(0)
    size = 0
    best[0] = 0
    total = np.int64(1) << n
    for i in range(1, total):
        v = lowest_bit_index(i)
        bit = np.int64(1) << v
        inner = popcount(adj[v] & mask)
        if mask & bit:
            mask ^= bit
            e += 2 * inner - deg[v]
            size -= 1
        else:
            mask |= bit
            e += deg[v] - 2 * inner
            size += 1
        if e < best[size] or (e == best[size] and lex_smaller(mask, arg[size])):
            best[size] = e
            arg[size] = mask
    return best, arg


@njit(cache=True)
def _largest_component(adj, remaining, limit):
    """Largest component size of the subgraph on ``remaining``; stops early above ``limit``."""
    largest = 0
    while remaining:
        seed = remaining & -remaining
        comp = seed
        frontier = seed
        while frontier:
            low = frontier & -frontier
            v = lowest_bit_index(low)
            frontier ^= low
            nb = adj[v] & remaining & ~comp
            comp |= nb
            frontier |= nb
        c = popcount(comp)
        if c > largest:
            largest = c
            if largest > limit:
                return largest
        remaining &= ~comp
    return largest


@njit(cache=True)
def min_separator(adj, n, limit):
    """Smallest vertex set (colex-first within its size) leaving components of size <= limit.

    Returns the mask and the number of candidate sets examined.
    """
    full = (np.int64(1) << n) - 1
    checked = np.int64(0)
    for s in range(n + 1):
        comb = (np.int64(1) << s) - 1
        while comb <= full:
            checked += 1
            if _largest_component(adj, full & ~comb, limit) <= limit:
                return comb, checked
            if s == 0:
                break
            # Gosper's hack: next mask with the same popcount
            c = comb & -comb
            r = comb + c
            comb = (((r ^ comb) >> 2) // c) | r
    return full, checked


@njit(cache=True)
def min_neighborhood(adj, n, s_lo, s_hi):
    """Least external-neighbourhood size over subsets W with s_lo <= |W| <= s_hi.

    Returns (minimum, first minimiser in size-then-colex order, subsets examined).
    """
    full = (np.int64(1) << n) - 1
    best = BIG
    arg = np.int64(0)
    checked = np.int64(0)
    for s in range(s_lo, s_hi + 1):
        comb = (np.int64(1) << s) - 1
        while comb <= full:
            checked += 1
            nb = np.int64(0)
            rest = comb
            while rest:
                low = rest & -rest
                nb |= adj[lowest_bit_index(low)]
                rest ^= low
            c = popcount(nb & ~comb)
            if c < best:
                best = c
                arg = comb
            c2 = comb & -comb
            r = comb + c2
            comb = (((r ^ comb) >> 2) // c2) | r
    return best, arg, checked


@njit(cache=True)
def longest_cycle_dp(adj, n):
    """Longest cycle by dynamic programming over (vertex set, endpoint) pairs.

    ``ends[mask]`` holds the endpoints v such that a path from the lowest
    vertex of ``mask`` to v uses exactly ``mask``.  Returns the best mask and
    the end vertex closing the cycle, or (0, -1) for forests.
    """
    total = np.int64(1) << n
    ends = np.zeros(total, dtype=np.int64)
    for s in range(n):
        ends[np.int64(1) << s] = np.int64(1) << s
    best_len = 0
    best_mask = np.int64(0)
    best_end = -1
    for mask in range(1, total):
        e = ends[mask]
        if e == 0:
            continue
        low = mask & -mask
        s = lowest_bit_index(low)
        size = popcount(mask)
        if size >= 3 and (e & adj[s]) and size > best_len:
            best_len = size
            best_mask = mask
            best_end = lowest_bit_index((e & adj[s]) & -(e & adj[s]))
        rest = e
        while rest:
            lb = rest & -rest
            v = lowest_bit_index(lb)
            rest ^= lb
            ext = adj[v] & ~mask & ~((low << 1) - 1)
            while ext:
                ub = ext & -ext
                ext ^= ub
                ends[mask | ub] |= ub
    return best_mask, best_end, ends
