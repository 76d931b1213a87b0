"""Immutable simple graphs in compressed sparse row form and elementary set operations."""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .errors import GraphError, ParseError


def _frozen(arr):
    arr = np.ascontiguousarray(arr, dtype=np.int64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected simple graph on vertices ``0..n-1``.

    Neighbours of ``v`` are ``indices[indptr[v]:indptr[v+1]]``, strictly
    increasing.  Build instances with :meth:`from_edges`; the constructor
    validates but does not sort.
    """

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    degrees: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        indptr = _frozen(self.indptr)
        indices = _frozen(self.indices)
        object.__setattr__(self, "indptr", indptr)
        object.__setattr__(self, "indices", indices)
        if indptr.shape != (self.n + 1,) or indptr[0] != 0 or indptr[-1] != len(indices):
            raise GraphError("malformed CSR arrays")
        object.__setattr__(self, "degrees", _frozen(np.diff(indptr)))
        self._validate()

    def _validate(self):
        n = self.n
        for v in range(n):
            nb = self.indices[self.indptr[v]:self.indptr[v + 1]]
            if len(nb) and (nb[0] < 0 or nb[-1] >= n):
                raise GraphError(f"neighbour of {v} out of range")
            if np.any(np.diff(nb) <= 0):
                raise GraphError(f"neighbour list of {v} not strictly increasing")
            if np.any(nb == v):
                raise GraphError(f"self-loop at {v}")
        # symmetry: the multiset of (u, v) pairs equals that of (v, u)
        rows = np.repeat(np.arange(n, dtype=np.int64), self.degrees)
        fwd = np.sort(rows * n + self.indices)
        bwd = np.sort(self.indices * n + rows)
        if not np.array_equal(fwd, bwd):
            raise GraphError("adjacency is not symmetric")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        """Build a graph from an edge iterable; rejects loops and duplicates."""
        if n < 0:
            raise GraphError("vertex count must be nonnegative")
        adj: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise GraphError(f"self-loop at {u}")
            if v in adj[u]:
                raise GraphError(f"duplicate edge ({u}, {v})")
            adj[u].add(v)
            adj[v].add(u)
        indptr = np.zeros(n + 1, dtype=np.int64)
        indptr[1:] = np.cumsum([len(a) for a in adj])
        indices = np.fromiter((w for a in adj for w in sorted(a)), dtype=np.int64,
                              count=int(indptr[-1]))
        return cls(n, indptr, indices)

    # -- structure -----------------------------------------------------

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def degree(self, v: int) -> int:
        return int(self.degrees[v])

    @property
    def degree_min(self) -> int:
        return int(self.degrees.min()) if self.n else 0

    @property
    def degree_max(self) -> int:
        return int(self.degrees.max()) if self.n else 0

    @property
    def is_regular(self) -> bool:
        return self.n > 0 and self.degree_min == self.degree_max

    @property
    def D(self) -> int | None:
        """Common degree, or ``None`` for non-regular graphs."""
        return self.degree_min if self.is_regular else None

    @property
    def num_edges(self) -> int:
        return len(self.indices) // 2

    def edges(self) -> Iterator[tuple[int, int]]:
        """Edges ``(u, v)`` with ``u < v`` in lexicographic order."""
        for u in range(self.n):
            for v in self.neighbors(u):
                if v > u:
                    yield u, int(v)

    def edge_array(self) -> np.ndarray:
        rows = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)
        keep = rows < self.indices
        return np.column_stack([rows[keep], self.indices[keep]])

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        i = np.searchsorted(nb, v)
        return bool(i < len(nb) and nb[i] == v)

    def adjacency_matrix(self, dtype=np.int64) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=dtype)
        rows = np.repeat(np.arange(self.n), self.degrees)
        a[rows, self.indices] = 1
        return a

    def adjacency_masks(self) -> np.ndarray:
        """Per-vertex neighbour bitmasks (requires n <= 62)."""
        if self.n > 62:
            raise GraphError("bitmask representation needs n <= 62")
        masks = np.zeros(self.n, dtype=np.int64)
        for v in range(self.n):
            m = 0
            for w in self.neighbors(v):
                m |= 1 << int(w)
            masks[v] = m
        return masks

    def is_bipartite(self) -> bool:
        color = [-1] * self.n
        for s in range(self.n):
            if color[s] >= 0:
                continue
            color[s] = 0
            queue = deque([s])
            while queue:
                u = queue.popleft()
                for w in self.neighbors(u):
                    w = int(w)
                    if color[w] < 0:
                        color[w] = 1 - color[u]
                        queue.append(w)
                    elif color[w] == color[u]:
                        return False
        return True

    def is_connected(self) -> bool:
        return self.n > 0 and len(components(self).sizes) == 1

    def to_edge_list(self) -> str:
        lines = []
        labelled = max((max(e) for e in self.edges()), default=-1) + 1
        if labelled != self.n:
            lines.append(f"n={self.n}")
        lines.extend(f"{u} {v}" for u, v in self.edges())
        return "\n".join(lines) + "\n"

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.n == other.n and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices))

    def __hash__(self):
        return hash((self.n, self.indices.tobytes()))

    def __repr__(self):
        reg = f"D={self.D}" if self.is_regular else f"deg={self.degree_min}..{self.degree_max}"
        return f"Graph(n={self.n}, m={self.num_edges}, {reg})"


def vertex_set(g: Graph, members: Iterable[int]) -> frozenset[int]:
    """Validate ``members`` against ``g`` and return them as a frozenset."""
    s = frozenset(int(v) for v in members)
    for v in s:
        if not 0 <= v < g.n:
            raise GraphError(f"vertex {v} not in graph of order {g.n}")
    return s


def mask_to_set(mask: int) -> frozenset[int]:
    mask = int(mask)
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return frozenset(out)


def set_to_mask(s: Iterable[int]) -> int:
    m = 0
    for v in s:
        m |= 1 << int(v)
    return m


# -- parsing -----------------------------------------------------------

_HEADER = re.compile(r"^n\s*=\s*(\d+)$")


def parse_edge_list(text: str) -> Graph:
    """Parse the whitespace-separated ``u v`` edge-list format.

    Blank lines and ``#`` comments are skipped.  A line ``n=<count>`` fixes
    the vertex count; otherwise it is one more than the largest label.
    """
    edges: list[tuple[int, int, int]] = []
    header_n = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _HEADER.match(line)
        if m:
            if header_n is not None:
                raise ParseError(lineno, "repeated n= header")
            header_n = int(m.group(1))
            continue
        parts = line.split()
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise ParseError(lineno, f"expected 'u v', got {raw!r}")
        edges.append((lineno, int(parts[0]), int(parts[1])))

    n = max((max(u, v) for _, u, v in edges), default=-1) + 1
    if header_n is not None:
        if header_n < n:
            raise ParseError(0, f"header n={header_n} smaller than largest label {n - 1}")
        n = header_n

    seen: set[tuple[int, int]] = set()
    for lineno, u, v in edges:
        if u == v:
            raise ParseError(lineno, f"self-loop at vertex {u}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise ParseError(lineno, f"duplicate edge {key[0]} {key[1]}")
        seen.add(key)
    return Graph.from_edges(n, seen)


# -- components, induced subgraphs, boundaries ---------------------------

@dataclass(frozen=True)
class ComponentDecomposition:
    component_id: tuple[int, ...]
    sizes: tuple[int, ...]
    giant: int

    def members(self, cid: int) -> frozenset[int]:
        return frozenset(v for v, c in enumerate(self.component_id) if c == cid)

    @property
    def giant_members(self) -> frozenset[int]:
        return self.members(self.giant)


def components(g: Graph) -> ComponentDecomposition:
    """Connected components, numbered by their lowest vertex."""
    label = [-1] * g.n
    sizes = []
    for s in range(g.n):
        if label[s] >= 0:
            continue
        cid = len(sizes)
        label[s] = cid
        count = 1
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in g.neighbors(u):
                w = int(w)
                if label[w] < 0:
                    label[w] = cid
                    count += 1
                    queue.append(w)
        sizes.append(count)
    # max() returns the first maximal entry, i.e. the lowest id on ties
    giant = max(range(len(sizes)), key=lambda c: sizes[c]) if sizes else -1
    return ComponentDecomposition(tuple(label), tuple(sizes), giant)


def induced(g: Graph, X: Iterable[int]) -> tuple[Graph, tuple[int, ...]]:
    """Induced subgraph on ``X``; the second value maps new labels to old ones."""
    keep = sorted(vertex_set(g, X))
    if not keep:
        raise GraphError("induced subgraph of an empty set")
    new = {old: i for i, old in enumerate(keep)}
    edges = [(new[u], new[v]) for u in keep for v in map(int, g.neighbors(u))
             if v in new and u < v]
    return Graph.from_edges(len(keep), edges), tuple(keep)


def _membership(g: Graph, X) -> np.ndarray:
    inside = np.zeros(g.n, dtype=bool)
    inside[list(vertex_set(g, X))] = True
    return inside


def edge_boundary(g: Graph, X: Iterable[int]) -> int:
    """Number of edges with exactly one endpoint in ``X``."""
    X = vertex_set(g, X)
    if not X or len(X) == g.n:
        raise GraphError("edge boundary needs a nonempty proper subset")
    inside = _membership(g, X)
    e = g.edge_array()
    return int(np.count_nonzero(inside[e[:, 0]] != inside[e[:, 1]]))


def neighborhood(g: Graph, W: Iterable[int]) -> frozenset[int]:
    """External neighbourhood: vertices outside ``W`` adjacent to ``W``."""
    W = vertex_set(g, W)
    if not W:
        raise GraphError("neighbourhood of an empty set")
    out = set()
    for w in W:
        out.update(int(x) for x in g.neighbors(w))
    return frozenset(out - W)


def disjoint_union(*graphs: Graph) -> Graph:
    """Disjoint union with the vertices of each graph shifted past the previous ones."""
    edges = []
    offset = 0
    for h in graphs:
        edges.extend((u + offset, v + offset) for u, v in h.edges())
        offset += h.n
    return Graph.from_edges(offset, edges)
