"""Long cycles from local vertex expansion, and an exhaustive longest-cycle oracle.

The search runs a depth-first search (roots and neighbours in ascending label
order) and closes back edges into cycles.  In the DFS forest every edge joins
an ancestor to a descendant, so a union ``W`` of child subtrees of one vertex
``x`` can only have external neighbours on the root path of ``x``.  If
``|N(W)| >= ell``, the highest such neighbour ``a`` lies at least ``ell - 1``
levels above ``x`` and the back edge from ``W`` to ``a`` closes a cycle of
length at least ``ell + 1``.  Choosing ``x`` so that ``W`` can have size in
``[k/2, k]`` makes the neighbourhood condition applicable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import CycleNotFoundError, GraphError, HypothesisError, InfeasibleError
from .graph import Graph, components, induced, mask_to_set, neighborhood
from .walks import as_fraction, well_mixing_set

EXACT_BUDGET = 10 ** 8
SAMPLES = 100_000
ORACLE_MAX_N = 16


@dataclass(frozen=True)
class CycleWitness:
    vertices: tuple

    @property
    def length(self) -> int:
        return len(self.vertices)


def validate_cycle(g: Graph, vertices: Sequence[int]) -> CycleWitness:
    """Check distinctness and every consecutive adjacency (including the closing edge)."""
    vs = tuple(int(v) for v in vertices)
    if len(vs) < 3:
        raise GraphError("a cycle needs at least 3 vertices")
    if len(set(vs)) != len(vs):
        raise GraphError("cycle repeats a vertex")
    adj = [set(int(w) for w in g.neighbors(v)) for v in range(g.n)]
    for a, b in zip(vs, vs[1:] + vs[:1]):
        if b not in adj[a]:
            raise GraphError(f"cycle uses a non-edge ({a}, {b})")
    return CycleWitness(vs)


@dataclass(frozen=True)
class NeighborhoodCondition:
    k: int
    ell: int
    mode: str
    verdict: str
    witness: frozenset | None = None
    min_neighborhood: int | None = None
    checked: int = 0

    @property
    def holds(self) -> bool:
        return self.verdict == "holds"


def _size_range(k: int) -> tuple[int, int]:
    return (k + 1) // 2, k


def exact_subset_count(n: int, k: int) -> int:
    lo, hi = _size_range(k)
    return sum(math.comb(n, s) for s in range(lo, hi + 1))


def verify_neighborhood_condition(g: Graph, k: int, ell: int, mode: str = "exact",
                                  seed: int = 0, samples: int = SAMPLES) -> NeighborhoodCondition:
    """Check |N(W)| >= ell for every W with k/2 <= |W| <= k."""
    n = g.n
    if not 0 < k < n or ell < 2:
        raise InfeasibleError(f"need 0 < k < n and ell >= 2 (k={k}, ell={ell}, n={n})")
    lo, hi = _size_range(k)
    if mode == "exact":
        if n > 62 or exact_subset_count(n, k) > EXACT_BUDGET:
            raise InfeasibleError("exact neighbourhood check exceeds the enumeration budget")
        best, arg, checked = _kernels.min_neighborhood(g.adjacency_masks(), n, lo, hi)
        best, W = int(best), mask_to_set(arg)
        checked = int(checked)
    elif mode == "sampled":
        rng = np.random.Generator(np.random.PCG64(seed))
        best, W = None, None
        adj = [frozenset(int(w) for w in g.neighbors(v)) for v in range(n)]
        for _ in range(samples):
            s = int(rng.integers(lo, hi + 1))
            cand = frozenset(int(v) for v in rng.choice(n, size=s, replace=False))
            size = len(frozenset().union(*(adj[v] for v in cand)) - cand)
            if best is None or size < best:
                best, W = size, cand
        checked = samples
    else:
        raise InfeasibleError(f"unknown mode {mode!r}")
    if best >= ell:
        return NeighborhoodCondition(k, ell, mode, "holds", None, best, checked)
    if len(neighborhood(g, W)) != best or not lo <= len(W) <= hi:
        raise AssertionError("neighbourhood witness failed recomputation")
    return NeighborhoodCondition(k, ell, mode, "fails", W, best, checked)


# -- depth-first search forest ---------------------------------------------------

@dataclass
class _Forest:
    parent: list
    depth: list
    preorder: list
    children: list
    size: list


def _dfs_forest(g: Graph) -> _Forest:
    n = g.n
    parent = [-1] * n
    depth = [0] * n
    seen = [False] * n
    preorder = []
    children = [[] for _ in range(n)]
    for root in range(n):
        if seen[root]:
            continue
        seen[root] = True
        preorder.append(root)
        stack = [(root, iter(g.neighbors(root).tolist()))]
        while stack:
            u, it = stack[-1]
            for w in it:
                if not seen[w]:
                    seen[w] = True
                    parent[w] = u
                    depth[w] = depth[u] + 1
                    children[u].append(w)
                    preorder.append(w)
                    stack.append((w, iter(g.neighbors(w).tolist())))
                    break
            else:
                stack.pop()
    size = [1] * n
    for v in reversed(preorder):
        if parent[v] >= 0:
            size[parent[v]] += size[v]
    return _Forest(parent, depth, preorder, children, size)


def _subtree(forest: _Forest, root: int) -> list[int]:
    out, stack = [], [root]
    while stack:
        v = stack.pop()
        out.append(v)
        stack.extend(forest.children[v])
    return out


def _candidate_sets(forest: _Forest, x: int, k: int):
    """Unions of child subtrees of ``x`` whose size lies in [k/2, k]."""
    lo, hi = _size_range(k)
    kids = forest.children[x]
    for c in kids:
        if lo <= forest.size[c] <= hi:
            yield [c]
    if kids and all(forest.size[c] < lo for c in kids):
        group, total = [], 0
        for c in kids:
            group.append(c)
            total += forest.size[c]
            if total >= lo:
                yield group
                return


def _back_edge_scan(g: Graph, ell: int):
    """DFS in label order; every back edge closes the stack segment above it.

    Returns (first segment of length >= ell + 1 or None, longest segment seen).
    """
    n = g.n
    on_stack = [False] * n
    seen = [False] * n
    best = None
    for root in range(n):
        if seen[root]:
            continue
        seen[root] = on_stack[root] = True
        path = [root]
        pos = {root: 0}
        stack = [iter(g.neighbors(root).tolist())]
        while stack:
            u = path[-1]
            for w in stack[-1]:
                if not seen[w]:
                    seen[w] = on_stack[w] = True
                    pos[w] = len(path)
                    path.append(w)
                    stack.append(iter(g.neighbors(w).tolist()))
                    break
                if on_stack[w] and len(path) >= 2 and w != path[-2]:
                    seg = path[pos[w]:]
                    if len(seg) >= ell + 1:
                        return seg, seg
                    if best is None or len(seg) > len(best):
                        best = list(seg)
            else:
                stack.pop()
                on_stack[path.pop()] = False
                del pos[u]
    return None, best


def _small_neighbourhood_witness(g: Graph, k: int, ell: int):
    """A union of DFS child subtrees W with k/2 <= |W| <= k and |N(W)| < ell, if any."""
    forest = _dfs_forest(g)
    for x in forest.preorder:
        for group in _candidate_sets(forest, x, k):
            W = set()
            for c in group:
                W.update(_subtree(forest, c))
            if len(neighborhood(g, W)) < ell:
                return frozenset(W)
    return None


def find_long_cycle(g: Graph, k: int, ell: int) -> CycleWitness:
    """Deterministically find a cycle of length >= ell + 1.

    Returns the first back-edge segment of the label-ordered DFS that is long
    enough.  This succeeds whenever every W with k/2 <= |W| <= k has at least
    ``ell`` external neighbours: some union W of child subtrees of one DFS
    vertex has size in that range, its neighbours all lie on one root path, and
    the back edge to the highest of them spans at least ``ell`` tree levels.
    Raises :class:`CycleNotFoundError` otherwise, carrying the longest cycle
    seen and such a W with too few neighbours.
    """
    if not 0 < k < g.n or ell < 2:
        raise InfeasibleError(f"need 0 < k < n and ell >= 2 (k={k}, ell={ell}, n={g.n})")
    found, best = _back_edge_scan(g, ell)
    if found is not None:
        return validate_cycle(g, found)
    best_w = validate_cycle(g, best) if best is not None else None
    raise CycleNotFoundError(
        f"no cycle of length >= {ell + 1} found; the neighbourhood condition "
        f"(k={k}, ell={ell}) should be re-examined", best=best_w,
        witness=_small_neighbourhood_witness(g, k, ell))


def longest_cycle_oracle(g: Graph) -> CycleWitness | None:
    """Exact longest cycle for n <= 16; ``None`` for forests."""
    if g.n > ORACLE_MAX_N:
        raise InfeasibleError(f"oracle limited to n <= {ORACLE_MAX_N}")
    if g.n < 3:
        return None
    adj = g.adjacency_masks()
    mask, end, ends = _kernels.longest_cycle_dp(adj, g.n)
    mask, end = int(mask), int(end)
    if mask == 0:
        return None
    start = (mask & -mask).bit_length() - 1
    # walk the path back from ``end`` to ``start`` through the table
    path = [end]
    cur, v = mask, end
    while cur != 1 << start:
        prev = cur ^ (1 << v)
        cand = int(ends[prev]) & int(adj[v])
        u = (cand & -cand).bit_length() - 1
        path.append(u)
        cur, v = prev, u
    return validate_cycle(g, path[::-1])


# -- end-to-end pipeline -----------------------------------------------------

@dataclass(frozen=True)
class CycleTrace:
    n: int
    giant_size: int
    k: int
    ell: int
    bound: Fraction
    verification: str
    well_mixing_count: int
    condition: NeighborhoodCondition | None = None


def mixing_to_cycle(g: Graph, eps, tau: int, delta=Fraction(1, 30), backend: str = "auto"):
    """Long cycle of length > eps*n/(40*tau) in a graph with many well-mixing vertices.

    Returns ``(CycleWitness, CycleTrace)``; labels refer to ``g``.
    """
    eps = as_fraction(eps)
    A = well_mixing_set(g, tau, delta, backend)
    if len(A) < eps * g.n:
        raise HypothesisError(
            f"only {len(A)} vertices are within {delta} of uniform at tau={tau}; "
            f"need {eps} * {g.n}", count=len(A), required=eps * g.n)
    giant = sorted(components(g).giant_members)
    h, labels = induced(g, giant)
    bound = eps * g.n / (40 * tau)
    k = h.n // 2
    ell = math.ceil(bound) + 1
    condition = None
    if h.n <= 62 and exact_subset_count(h.n, k) <= EXACT_BUDGET:
        condition = verify_neighborhood_condition(h, k, ell, "exact")
        verification = "exact" if condition.holds else "exact (fails)"
    else:
        verification = "theorem-implied"
    cyc = find_long_cycle(h, k, ell)
    mapped = validate_cycle(g, [labels[v] for v in cyc.vertices])
    trace = CycleTrace(g.n, h.n, k, ell, bound, verification, len(A), condition)
    return mapped, trace
