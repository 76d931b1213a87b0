"""Deterministic generators for the regular-graph constructions used in testing.

Random kinds draw from numpy's ``PCG64`` bit generator seeded with the descriptor's
seed, so a descriptor string fully determines the edge list.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import GenerationError, GraphError, InfeasibleError
from .graph import Graph, disjoint_union

GENERATOR_NAME = "numpy-PCG64"
GENERATOR_VERSION = 1
DEFAULT_ATTEMPTS = 10_000

KINDS = {
    "hypercube": ("D",),
    "complete": ("n",),
    "cycle": ("n",),
    "random_regular": ("n", "D", "seed"),
    "expander_plus_clique": ("n", "D", "seed"),
    "matched_expanders": ("n", "D", "seed"),
    "merged_expanders": ("n", "D", "m", "seed"),
}


@dataclass(frozen=True)
class ConstructionSpec:
    kind: str
    parameters: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InfeasibleError(f"unknown construction {self.kind!r}")
        missing = [p for p in KINDS[self.kind] if p not in self.parameters]
        if missing:
            raise InfeasibleError(f"{self.kind} needs parameters {', '.join(missing)}")
        extra = set(self.parameters) - set(KINDS[self.kind]) - {"attempts"}
        if extra:
            raise InfeasibleError(f"{self.kind} does not take {', '.join(sorted(extra))}")

    @property
    def descriptor(self) -> str:
        args = ",".join(f"{k}={self.parameters[k]}" for k in KINDS[self.kind])
        return f"{self.kind}:{args}"

    def __getitem__(self, key):
        return self.parameters[key]


def parse_descriptor(text: str) -> ConstructionSpec:
    """Parse ``"kind:key=value,..."`` (e.g. ``"hypercube:D=3"``)."""
    kind, _, rest = text.strip().partition(":")
    params = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, sep, value = item.partition("=")
        if not sep:
            raise InfeasibleError(f"malformed parameter {item!r} in {text!r}")
        try:
            params[key.strip()] = int(value)
        except ValueError:
            raise InfeasibleError(f"parameter {key} must be an integer, got {value!r}") from None
    return ConstructionSpec(kind, params)


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


# -- elementary families ----------------------------------------------------

def hypercube(D: int) -> Graph:
    if D < 1:
        raise InfeasibleError("hypercube dimension must be >= 1")
    n = 1 << D
    return Graph.from_edges(n, ((v, v ^ (1 << i)) for v in range(n) for i in range(D)
                                if v < v ^ (1 << i)))


def complete(n: int) -> Graph:
    if n < 1:
        raise InfeasibleError("complete graph needs n >= 1")
    return Graph.from_edges(n, combinations(range(n), 2))


def cycle(n: int) -> Graph:
    if n < 3:
        raise InfeasibleError("cycle needs n >= 3")
    return Graph.from_edges(n, ((i, (i + 1) % n) for i in range(n)))


def path(n: int) -> Graph:
    return Graph.from_edges(n, ((i, i + 1) for i in range(n - 1)))


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(10, outer + spokes + inner)


def _pairing_edges(n: int, D: int, rng: np.random.Generator, attempts: int):
    if D == 0:
        return np.empty((0, 2), dtype=np.int64)
    stubs = np.repeat(np.arange(n, dtype=np.int64), D)
    for attempt in range(1, attempts + 1):
        pairs = rng.permutation(stubs).reshape(-1, 2)
        lo = pairs.min(axis=1)
        hi = pairs.max(axis=1)
        if np.any(lo == hi):
            continue
        keys = lo * n + hi
        if len(np.unique(keys)) != len(keys):
            continue
        return np.column_stack([lo, hi])
    raise GenerationError(
        f"pairing model found no simple {D}-regular graph on {n} vertices "
        f"in {attempts} attempts", attempts=attempts)


def random_regular(n: int, D: int, seed: int, attempts: int = DEFAULT_ATTEMPTS,
                   rng: np.random.Generator | None = None) -> Graph:
    """Uniform simple ``D``-regular graph by pairing-model rejection sampling."""
    if not 0 <= D < n or (n * D) % 2:
        raise InfeasibleError(f"no {D}-regular graph on {n} vertices")
    rng = rng if rng is not None else _rng(seed)
    return Graph.from_edges(n, _pairing_edges(n, D, rng, attempts))


def expander_plus_clique(n: int, D: int, seed: int, attempts: int = DEFAULT_ATTEMPTS) -> Graph:
    """Random ``D``-regular graph on ``n - D - 1`` vertices plus a disjoint ``K_{D+1}``."""
    big = n - D - 1
    if big <= D or (big * D) % 2:
        raise InfeasibleError(f"expander_plus_clique infeasible for n={n}, D={D}")
    return disjoint_union(random_regular(big, D, seed, attempts), complete(D + 1))


def matched_expanders(n: int, D: int, seed: int, attempts: int = DEFAULT_ATTEMPTS) -> Graph:
    """Two random ``(D-1)``-regular graphs on ``n`` vertices joined by the matching ``i -- n+i``."""
    if D < 2 or not D - 1 < n or (n * (D - 1)) % 2:
        raise InfeasibleError(f"matched_expanders infeasible for n={n}, D={D}")
    rng = _rng(seed)
    left = random_regular(n, D - 1, seed, attempts, rng=rng)
    right = random_regular(n, D - 1, seed, attempts, rng=rng)
    edges = list(disjoint_union(left, right).edges())
    edges.extend((i, n + i) for i in range(n))
    return Graph.from_edges(2 * n, edges)


def merged_expanders(n: int, D: int, m: int, seed: int,
                     attempts: int = DEFAULT_ATTEMPTS) -> Graph:
    """Two ``D/2``-regular random graphs glued along ``n/m`` vertices, then completed to ``D``-regular.

    Vertex ``i < n/m`` is the merger of vertex ``i`` of both halves.  Vertices
    ``n/m..n-1`` come from the first half and ``n..2n-n/m-1`` from the second.
    Missing degree is restored by edges inside each half only, so the halves
    communicate through the merged vertices alone.
    """
    if D % 2 or D < 2 or m < 1 or n % m:
        raise InfeasibleError(f"merged_expanders needs even D and m | n (n={n}, D={D}, m={m})")
    k = n // m
    h = D // 2
    if (n * h) % 2 or not h < n:
        raise InfeasibleError(f"no {h}-regular graph on {n} vertices")
    rng = _rng(seed)
    g1 = random_regular(n, h, seed, attempts, rng=rng)
    g2 = random_regular(n, h, seed, attempts, rng=rng)

    def relabel2(v):
        return v if v < k else n + v - k

    total = 2 * n - k
    adj = [set() for _ in range(total)]
    for u, v in g1.edges():
        adj[u].add(v)
        adj[v].add(u)
    for u, v in g2.edges():
        a, b = relabel2(u), relabel2(v)
        adj[a].add(b)
        adj[b].add(a)

    sides = [list(range(n)), list(range(k)) + list(range(n, total))]
    for side in sides:
        _repair_degrees(adj, side, D)
    # merged vertices may still lack degree when both halves joined the same pair
    if any(len(a) != D for a in adj):
        _repair_degrees(adj, list(range(total)), D)
    if any(len(a) != D for a in adj):
        raise GenerationError("degree repair failed to reach a regular graph")
    return Graph.from_edges(total, ((u, v) for u in range(total) for v in adj[u] if u < v))


def _repair_degrees(adj, pool, D):
    """Add edges inside ``pool`` until every member has degree ``D`` (when possible).

    Greedy matching rounds in label order; when those stall, an edge switch
    (drop ``x--y``, add ``v--x`` and ``w--y``) takes over.
    """
    pool = sorted(pool)
    in_pool = set(pool)

    def deficient():
        return [v for v in pool if len(adj[v]) < D]

    while True:
        need = deficient()
        if not need:
            return
        progress = False
        used = set()
        for i, v in enumerate(need):
            if v in used or len(adj[v]) >= D:
                continue
            for w in need[i + 1:]:
                if w not in used and w not in adj[v] and len(adj[w]) < D:
                    adj[v].add(w)
                    adj[w].add(v)
                    used.update((v, w))
                    progress = True
                    break
        if progress:
            continue
        # stalled: every pair of deficient vertices is already adjacent
        v = need[0]
        w = need[1] if len(need) > 1 else v
        if v == w and D - len(adj[v]) < 2:
            raise GenerationError("odd total degree deficit; cannot complete to regular")
        if not _switch(adj, pool, in_pool, v, w):
            raise GenerationError("degree repair stalled")


def _switch(adj, pool, in_pool, v, w):
    """Replace some edge ``x--y`` by ``v--x`` and ``w--y`` (``v == w`` allowed)."""
    for x in pool:
        if x in (v, w) or x in adj[v]:
            continue
        for y in sorted(adj[x]):
            if y not in in_pool or y in (v, w) or y in adj[w]:
                continue
            adj[x].discard(y)
            adj[y].discard(x)
            adj[v].add(x)
            adj[x].add(v)
            adj[w].add(y)
            adj[y].add(w)
            return True
    return False


def generate(spec: ConstructionSpec | str) -> Graph:
    """Build the graph described by ``spec``; identical specs give identical graphs."""
    if isinstance(spec, str):
        spec = parse_descriptor(spec)
    p = dict(spec.parameters)
    kind = spec.kind
    if kind == "hypercube":
        return hypercube(p["D"])
    if kind == "complete":
        return complete(p["n"])
    if kind == "cycle":
        return cycle(p["n"])
    attempts = p.pop("attempts", DEFAULT_ATTEMPTS)
    if kind == "random_regular":
        return random_regular(p["n"], p["D"], p["seed"], attempts)
    if kind == "expander_plus_clique":
        return expander_plus_clique(p["n"], p["D"], p["seed"], attempts)
    if kind == "matched_expanders":
        return matched_expanders(p["n"], p["D"], p["seed"], attempts)
    if kind == "merged_expanders":
        return merged_expanders(p["n"], p["D"], p["m"], p["seed"], attempts)
    raise GraphError(f"unhandled construction {kind}")  # pragma: no cover
