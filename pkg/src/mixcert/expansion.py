"""Edge-expansion certificates and conductance, with separators and expander extraction.

Exact modes enumerate every vertex subset with the bitmask kernels (n <= 26,
or n <= 22 for separators).  Sweep modes search spectral and random
orderings; they can only refute expansion, so a clean sweep is reported as
``"certified (sampled)"`` and never as ``"certified"``.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np
import scipy.sparse as sp

from . import _kernels
from .errors import ExtractionError, GraphError, HypothesisError, InfeasibleError
from .graph import Graph, components, edge_boundary, induced, mask_to_set, vertex_set
from .walks import (DEFAULT_THRESHOLD, Capped, as_fraction, default_t_max, mixing_profile,
                    require_regular, well_mixing_set)

EXACT_MAX_N = 26
SEPARATOR_EXACT_MAX_N = 22
EIG_TOL = 1e-8
EIG_MAX_ITER = 100_000
RESTARTS = 32
RANDOM_SETS = 10_000

CERTIFIED = "certified"
CERTIFIED_SAMPLED = "certified (sampled)"
VIOLATED = "violated"


# -- helpers -----------------------------------------------------------------

def _size_minima(g: Graph):
    """Least boundary and lex-first minimiser for every subset size (exhaustive)."""
    if g.n > EXACT_MAX_N:
        raise InfeasibleError(f"exact enumeration needs n <= {EXACT_MAX_N}, got {g.n}")
    best, arg = _kernels.min_boundary_by_size(g.adjacency_masks(), g.degrees, g.n)
    return [int(b) for b in best], [int(a) for a in arg]


def _lex_key(s: Iterable[int]):
    return tuple(sorted(s))


def spectral_vector(g: Graph, tol: float = EIG_TOL, max_iter: int = EIG_MAX_ITER,
                    seed: int = 0) -> tuple[np.ndarray, int]:
    """Second eigenvector of the normalised adjacency by deflated power iteration.

    Iterates the lazy operator (I + N)/2 with the top eigenvector
    ``sqrt(deg)`` projected out; stops when the residual drops below ``tol``.
    Returned entries are rescaled by ``deg**-1/2`` so that the ordering matches
    the walk matrix's eigenvector.
    """
    n = g.n
    deg = np.maximum(g.degrees.astype(float), 1.0)
    inv = 1.0 / np.sqrt(deg)
    rows = np.repeat(np.arange(n), g.degrees)
    N = sp.csr_matrix((inv[rows] * inv[g.indices], (rows, g.indices)), shape=(n, n))
    top = np.sqrt(deg)
    top /= np.linalg.norm(top)
    rng = np.random.Generator(np.random.PCG64(seed))
    x = rng.standard_normal(n)
    x -= (x @ top) * top
    x /= np.linalg.norm(x) or 1.0
    it = 0
    for it in range(1, max_iter + 1):
        y = 0.5 * (x + N @ x)
        y -= (y @ top) * top
        lam = float(x @ y)
        resid = np.linalg.norm(y - lam * x)
        norm = np.linalg.norm(y)
        if norm == 0:
            break
        x = y / norm
        if resid < tol:
            break
    return x * inv, it


def _orders(g: Graph, seed: int, restarts: int, tol: float, max_iter: int):
    vec, _ = spectral_vector(g, tol, max_iter, seed)
    orders = [np.argsort(vec, kind="stable")]
    rng = np.random.Generator(np.random.PCG64(seed + 1))
    orders.extend(rng.permutation(g.n) for _ in range(restarts))
    return orders


def _prefix_boundaries(g: Graph, order) -> list[int]:
    """Boundary of each prefix ``order[:k]`` for k = 1..n."""
    inside = np.zeros(g.n, dtype=bool)
    e = 0
    out = []
    for v in order:
        nb = g.neighbors(v)
        e += len(nb) - 2 * int(np.count_nonzero(inside[nb]))
        inside[v] = True
        out.append(e)
    return out


def _greedy_growth(g: Graph, start: int, max_size: int):
    """Grow from ``start`` by the outside vertex with most edges into the set.

    Yields ``(size, boundary, members)`` after every addition.
    """
    inside = np.zeros(g.n, dtype=bool)
    cnt = np.zeros(g.n, dtype=np.int64)
    members = []
    e = 0
    v = start
    while True:
        e += g.degree(v) - 2 * int(cnt[v])
        inside[v] = True
        members.append(int(v))
        cnt[g.neighbors(v)] += 1
        yield len(members), e, members
        if len(members) >= max_size:
            return
        score = np.where(inside, -1, cnt)
        v = int(np.argmax(score))
        if inside[v]:
            return


def _boundary_fast(e_arr, inside):
    return int(np.count_nonzero(inside[e_arr[:, 0]] != inside[e_arr[:, 1]]))


class _Best:
    """Keeps the minimum-ratio candidate; ties go to the smaller, then lex-first set."""

    def __init__(self):
        self.key = None
        self.members = None
        self.boundary = None

    def offer(self, boundary: int, members, ratio: Fraction):
        size = len(members)
        key = (ratio, size)
        if self.key is not None and key > self.key:
            return
        mem = frozenset(int(v) for v in members)
        if self.key is not None and key == self.key and _lex_key(mem) >= _lex_key(self.members):
            return
        self.key, self.members, self.boundary = key, mem, boundary


# -- conductance ---------------------------------------------------------------

@dataclass(frozen=True)
class ConductanceResult:
    value: Fraction
    argmin: frozenset
    mode: str
    candidate_count: int


def _phi_ratio(n, D, e, s) -> Fraction:
    return Fraction(n * e, D * s * (n - s))


def conductance(g: Graph, mode: str = "exact", seed: int = 0, restarts: int = RESTARTS,
                tol: float = EIG_TOL, max_iter: int = EIG_MAX_ITER) -> ConductanceResult:
    """Minimum of n*e(A, A^c) / (D*|A|*|A^c|) over nonempty proper subsets A."""
    D = require_regular(g)
    n = g.n
    if n < 2:
        raise GraphError("conductance needs n >= 2")
    best = _Best()
    if mode == "exact":
        mins, args = _size_minima(g)
        for s in range(1, n):
            best.offer(mins[s], mask_to_set(args[s]), _phi_ratio(n, D, mins[s], s))
        count = 2 ** (n - 1) - 1
    elif mode == "sweep":
        count = 0
        for order in _orders(g, seed, restarts, tol, max_iter):
            pref = _prefix_boundaries(g, order)
            for s in range(1, n):
                count += 1
                best.offer(pref[s - 1], order[:s], _phi_ratio(n, D, pref[s - 1], s))
    else:
        raise InfeasibleError(f"unknown conductance mode {mode!r}")
    # recompute through the independent boundary routine
    e = edge_boundary(g, best.members)
    value = _phi_ratio(n, D, e, len(best.members))
    assert value == best.key[0], "conductance witness failed recomputation"
    return ConductanceResult(value, best.members, mode, count)


@dataclass(frozen=True)
class SandwichReport:
    phi: Fraction | None
    mix: int | Capped | None
    lower: float | None
    upper: float | None
    holds: bool
    applicable: bool
    reason: str = ""


def sandwich_check(g: Graph, t_max: int | None = None, backend: str = "auto",
                   threshold=DEFAULT_THRESHOLD) -> SandwichReport:
    """Check 1/phi < mix < 16*log2(n)/phi**2 with exact phi and the scanned mixing time."""
    require_regular(g)
    if t_max is None:
        t_max = default_t_max(g.n)
    prof = mixing_profile(g, 0, threshold, t_max, backend)
    mix = prof.mix
    if isinstance(mix, Capped):
        reason = "bipartite graph" if g.is_bipartite() else "mixing time capped at t_max"
        if not g.is_connected():
            reason = "disconnected graph"
        return SandwichReport(None, mix, None, None, False, False, reason)
    phi = conductance(g, "exact").value
    lower = 1 / phi
    upper = 16 * math.log2(g.n) / float(phi) ** 2
    holds = lower < mix < upper
    return SandwichReport(phi, mix, float(lower), upper, holds, True)


# -- edge expansion certificates -------------------------------------------------

@dataclass(frozen=True)
class ExpansionCertificate:
    bound: Fraction
    size_lo: int
    size_hi: int
    mode: str
    verdict: str
    witness: frozenset | None = None
    witness_boundary: int | None = None
    min_ratio: Fraction | None = None
    candidates: int = 0

    @property
    def certified(self) -> bool:
        return self.verdict != VIOLATED


def check_edge_expansion(g: Graph, c, size_lo: int, size_hi: int, mode: str = "exact",
                         seed: int = 0, restarts: int = RESTARTS, tol: float = EIG_TOL,
                         max_iter: int = EIG_MAX_ITER,
                         random_sets: int = RANDOM_SETS) -> ExpansionCertificate:
    """Test e(X, V \\ X) >= c*|X| for all X with size_lo <= |X| <= size_hi."""
    c = as_fraction(c)
    n = g.n
    if not 1 <= size_lo <= size_hi <= n // 2:
        raise InfeasibleError(f"invalid size range [{size_lo}, {size_hi}] for n={n}")
    best = _Best()
    count = 0
    if mode == "exact":
        mins, args = _size_minima(g)
        for s in range(size_lo, size_hi + 1):
            best.offer(mins[s], mask_to_set(args[s]), Fraction(mins[s], s))
            count += math.comb(n, s)
    elif mode in ("sweep", "sampled"):
        e_arr = g.edge_array()
        rng = np.random.Generator(np.random.PCG64(seed + 2))
        for _ in range(random_sets):
            s = int(rng.integers(size_lo, size_hi + 1))
            members = rng.choice(n, size=s, replace=False)
            inside = np.zeros(n, dtype=bool)
            inside[members] = True
            e = _boundary_fast(e_arr, inside)
            best.offer(e, members, Fraction(e, s))
            count += 1
        if mode == "sweep":
            for order in _orders(g, seed, restarts, tol, max_iter):
                pref = _prefix_boundaries(g, order)
                for s in range(size_lo, size_hi + 1):
                    best.offer(pref[s - 1], order[:s], Fraction(pref[s - 1], s))
                    # the complement of a prefix is a suffix of the same boundary
                    best.offer(pref[n - s - 1], order[n - s:], Fraction(pref[n - s - 1], s))
                    count += 2
            for v in range(n):
                for s, e, members in _greedy_growth(g, v, size_hi):
                    if s >= size_lo:
                        best.offer(e, members, Fraction(e, s))
                        count += 1
    else:
        raise InfeasibleError(f"unknown expansion mode {mode!r}")

    min_ratio = best.key[0] if best.key else None
    if best.key is not None and best.key[0] < c:
        witness = best.members
        e = edge_boundary(g, witness)
        if not (e < c * len(witness) and size_lo <= len(witness) <= size_hi):
            raise AssertionError("expansion witness failed recomputation")
        return ExpansionCertificate(c, size_lo, size_hi, mode, VIOLATED, witness, e,
                                    min_ratio, count)
    verdict = CERTIFIED if mode == "exact" else CERTIFIED_SAMPLED
    return ExpansionCertificate(c, size_lo, size_hi, mode, verdict, None, None, min_ratio, count)


# -- expander extraction ---------------------------------------------------------

@dataclass(frozen=True)
class PeelStep:
    members: frozenset
    boundary: int
    ratio: Fraction
    mode: str


@dataclass(frozen=True)
class ExtractionResult:
    deleted: frozenset
    kept_graph: Graph
    kept_labels: tuple
    peel_trace: tuple
    certificate: ExpansionCertificate | None
    constant: Fraction
    budget: Fraction
    within_budget: bool
    well_mixing_count: int
    giant_size: int


def _find_sparse_set(h: Graph, c: Fraction, seed, restarts, tol, max_iter):
    """Minimum-ratio set P with |P| <= |H|/2 and e(P, H - P) < c|P|, or None."""
    half = h.n // 2
    if half < 1:
        return None
    best = _Best()
    if h.n <= EXACT_MAX_N:
        mode = "exact"
        mins, args = _size_minima(h)
        for s in range(1, half + 1):
            best.offer(mins[s], mask_to_set(args[s]), Fraction(mins[s], s))
    else:
        mode = "sweep"
        comp = components(h)
        for cid, size in enumerate(comp.sizes):
            if size <= half:
                best.offer(0, comp.members(cid), Fraction(0))
        for order in _orders(h, seed, restarts, tol, max_iter):
            pref = _prefix_boundaries(h, order)
            for s in range(1, half + 1):
                best.offer(pref[s - 1], order[:s], Fraction(pref[s - 1], s))
                best.offer(pref[h.n - s - 1], order[h.n - s:], Fraction(pref[h.n - s - 1], s))
        for v in range(h.n):
            for s, e, members in _greedy_growth(h, v, half):
                best.offer(e, members, Fraction(e, s))
    if best.key is None or best.key[0] >= c:
        return None
    return best.members, best.boundary, best.key[0], mode


def extract_expander(g: Graph, eps, delta, tau: int, backend: str = "auto", seed: int = 0,
                     restarts: int = RESTARTS, tol: float = EIG_TOL,
                     max_iter: int = EIG_MAX_ITER) -> ExtractionResult:
    """Delete a small vertex set so that the rest expands at rate eps*D/(16*tau).

    Works on the giant component, repeatedly peeling the sparsest set of at
    most half the remaining vertices until none violates the rate.
    """
    D = require_regular(g)
    eps, delta = as_fraction(eps), as_fraction(delta)
    A = well_mixing_set(g, tau, delta, backend)
    if len(A) < eps * g.n:
        raise HypothesisError(
            f"only {len(A)} vertices are within {delta} of uniform at tau={tau}; "
            f"need {eps} * {g.n}", count=len(A), required=eps * g.n)
    c = eps * D / (16 * tau)
    comp = components(g)
    giant = sorted(comp.giant_members)
    remaining = list(giant)
    trace = []
    while True:
        h, labels = induced(g, remaining)
        found = _find_sparse_set(h, c, seed, restarts, tol, max_iter)
        if found is None:
            break
        members, e, ratio, mode = found
        # independent recomputation on the current graph
        if edge_boundary(h, members) != e or not e < c * len(members):
            raise AssertionError("peeled set failed recomputation")
        peeled = frozenset(labels[i] for i in members)
        trace.append(PeelStep(peeled, e, ratio, mode))
        remaining = [v for v in remaining if v not in peeled]
        if len(remaining) < 2:
            raise ExtractionError("no expander core found at this constant")
    kept, labels = induced(g, remaining)
    deleted = frozenset(range(g.n)) - frozenset(remaining)
    cert = None
    if kept.n >= 2:
        cmode = "exact" if kept.n <= EXACT_MAX_N else "sweep"
        cert = check_edge_expansion(kept, c, 1, kept.n // 2, cmode, seed, restarts, tol, max_iter)
    budget = 5 * delta * g.n
    return ExtractionResult(deleted, kept, labels, tuple(trace), cert, c, budget,
                            len(deleted) <= budget, len(A), len(giant))


# -- separators ---------------------------------------------------------------

@dataclass(frozen=True)
class SeparatorResult:
    separator: frozenset
    largest_remaining: int
    largest_remaining_fraction: Fraction
    mode: str
    candidates: int = 0

    @property
    def size(self) -> int:
        return len(self.separator)


def separator_limit(n: int) -> int:
    """Largest component size allowed after removing a separator: floor(2n/3)."""
    return (2 * n) // 3


def _largest_after_removal(g: Graph, S) -> int:
    rest = [v for v in range(g.n) if v not in S]
    if not rest:
        return 0
    return max(components(induced(g, rest)[0]).sizes)


def _bfs_order(g: Graph, root: int):
    seen = [False] * g.n
    order = []
    for r in [root] + list(range(g.n)):
        if seen[r]:
            continue
        seen[r] = True
        q = deque([r])
        while q:
            u = q.popleft()
            order.append(u)
            for w in g.neighbors(u):
                w = int(w)
                if not seen[w]:
                    seen[w] = True
                    q.append(w)
    return np.array(order)


def _largest_component_bool(g: Graph, removed: np.ndarray, limit: int) -> int:
    seen = removed.copy()
    largest = 0
    for s in range(g.n):
        if seen[s]:
            continue
        seen[s] = True
        q = [s]
        size = 0
        while q:
            u = q.pop()
            size += 1
            for w in g.neighbors(u):
                if not seen[w]:
                    seen[w] = True
                    q.append(int(w))
        largest = max(largest, size)
        if largest > limit:
            break
    return largest


def find_separator(g: Graph, mode: str = "exact", seed: int = 0, restarts: int = RESTARTS,
                   tol: float = EIG_TOL, max_iter: int = EIG_MAX_ITER) -> SeparatorResult:
    """Vertex set whose removal leaves components of at most 2n/3 vertices.

    Exact mode returns a minimum one; heuristic mode converts sweep and BFS
    cuts into separators (boundary vertices of the smaller side).
    """
    n = g.n
    if n < 3:
        raise GraphError("separator search needs n >= 3")
    limit = separator_limit(n)
    if mode == "exact":
        if n > SEPARATOR_EXACT_MAX_N:
            raise InfeasibleError(f"exact separator search needs n <= {SEPARATOR_EXACT_MAX_N}")
        mask, checked = _kernels.min_separator(g.adjacency_masks(), n, limit)
        best = mask_to_set(mask)
        count = int(checked)
    elif mode == "heuristic":
        order0 = np.arange(n)
        best = frozenset(int(v) for v in order0[limit:])
        count = 1
        orders = _orders(g, seed, 0, tol, max_iter)
        rng = np.random.Generator(np.random.PCG64(seed + 3))
        orders.extend(_bfs_order(g, int(r)) for r in rng.integers(0, n, size=restarts))
        for order in orders:
            pos = np.empty(n, dtype=np.int64)
            pos[order] = np.arange(n)
            for k in range(1, n):
                small = order[:k] if k <= n - k else order[k:]
                in_small = np.zeros(n, dtype=bool)
                in_small[small] = True
                S = [int(v) for v in small if np.any(~in_small[g.neighbors(v)])]
                count += 1
                if len(S) >= len(best):
                    continue
                removed = np.zeros(n, dtype=bool)
                removed[S] = True
                if _largest_component_bool(g, removed, limit) <= limit:
                    best = frozenset(S)
    else:
        raise InfeasibleError(f"unknown separator mode {mode!r}")
    largest = _largest_after_removal(g, best)
    if largest > limit:
        raise AssertionError("separator failed recomputation")
    return SeparatorResult(best, largest, Fraction(largest, n), mode, count)


def separator_lower_bound(eps, tau: int, n: int) -> Fraction:
    """Size below which no separator exists when the well-mixing hypothesis holds."""
    return as_fraction(eps) * n / (48 * tau)
