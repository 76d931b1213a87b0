"""Exact and floating-point distributions of the nearest-neighbour random walk.

The exact backend never forms fractions during propagation: for a ``D``-regular
graph ``D**t * Q_v^t(u)`` is the integer number of ``t``-walks from ``v`` to
``u``, so rows are propagated as Python integers and divided only when a
probability is reported.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import GraphError, InfeasibleError, NotRegularError
from .graph import Graph, vertex_set

EXACT = "exact"
FLOAT = "float"
FLOAT_TOL = 1e-10
EXACT_MAX_N = 64
EXACT_MAX_T = 64
DEFAULT_THRESHOLD = Fraction(1, 4)


def as_fraction(x) -> Fraction:
    """Exact value of a user-supplied number; floats are read as their decimal repr."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(repr(float(x)))


def resolve_backend(backend: str, n: int, t: int = 0) -> str:
    if backend in (EXACT, FLOAT):
        return backend
    if backend != "auto":
        raise InfeasibleError(f"unknown backend {backend!r}")
    return EXACT if n <= EXACT_MAX_N and t <= EXACT_MAX_T else FLOAT


def _scan_backend(backend: str, n: int) -> str:
    # scans may run far past t = 64; integer rows stay cheap for n <= 64
    if backend == "auto":
        return EXACT if n <= EXACT_MAX_N else FLOAT
    return resolve_backend(backend, n)


def default_t_max(n: int) -> int:
    return 64 * max(1, math.ceil(math.log2(max(n, 2))))


def require_regular(g: Graph) -> int:
    if not g.is_regular or g.D < 1:
        raise NotRegularError("the walk matrix A/D needs a regular graph of degree >= 1")
    return g.D


class Capped:
    """Marker for a mixing time that was not reached within ``t_max`` steps."""

    __slots__ = ("t_max",)

    def __init__(self, t_max: int):
        self.t_max = t_max

    def __eq__(self, other):
        return isinstance(other, Capped) and other.t_max == self.t_max

    def __hash__(self):
        return hash(("CAP", self.t_max))

    def __bool__(self):
        return False

    def __repr__(self):
        return f"CAP({self.t_max})"


# -- row propagation ------------------------------------------------------

class WalkRows:
    """Walk distributions from a fixed list of start vertices, advanced in lockstep.

    ``rows[i, u]`` equals ``D**t * Pr[Q_{s_i}^t = u]`` in the exact backend and
    the probability itself in the float backend.
    """

    def __init__(self, g: Graph, sources: Sequence[int] | None = None, backend: str = "auto",
                 rows=None):
        self.D = require_regular(g)
        self.g = g
        self.n = g.n
        self.backend = backend if backend in (EXACT, FLOAT) else _scan_backend(backend, g.n)
        self.sources = list(range(g.n)) if sources is None else [int(s) for s in sources]
        self.t = 0
        if rows is not None:
            self.rows = rows
        elif self.backend == EXACT:
            self.rows = np.zeros((len(self.sources), self.n), dtype=object)
            self.rows[:] = 0
            self.rows[np.arange(len(self.sources)), self.sources] = 1
        else:
            self.rows = np.zeros((len(self.sources), self.n))
            self.rows[np.arange(len(self.sources)), self.sources] = 1.0

    @property
    def scale(self):
        return self.D ** self.t if self.backend == EXACT else 1.0

    def step(self, times: int = 1) -> "WalkRows":
        k, n, D = self.rows.shape[0], self.n, self.D
        for _ in range(times):
            nxt = self.rows[:, self.g.indices].reshape(k, n, D).sum(axis=2)
            self.rows = nxt if self.backend == EXACT else nxt / D
            self.t += 1
        return self

    def advance_to(self, t: int) -> "WalkRows":
        if t < self.t:
            raise ValueError("cannot move rows back in time")
        return self.step(t - self.t)

    def copy(self) -> "WalkRows":
        out = WalkRows.__new__(WalkRows)
        out.__dict__.update(self.__dict__)
        out.rows = self.rows.copy()
        return out

    def tv_to_uniform(self):
        """Total variation distance of every row to the uniform distribution."""
        n = self.n
        if self.backend == EXACT:
            scale = self.scale
            sums = np.abs(self.rows * n - scale).sum(axis=1)
            return [Fraction(int(s), 2 * n * scale) for s in sums]
        return list(0.5 * np.abs(self.rows - 1.0 / n).sum(axis=1))

    def mass_in(self, members: Iterable[int]):
        """Probability that each row's walk currently lies in ``members``."""
        cols = sorted(members)
        if self.backend == EXACT:
            scale = self.scale
            if not cols:
                return [Fraction(0)] * len(self.sources)
            return [Fraction(int(s), scale) for s in self.rows[:, cols].sum(axis=1)]
        if not cols:
            return [0.0] * len(self.sources)
        return list(self.rows[:, cols].sum(axis=1))

    def probabilities(self, i: int):
        if self.backend == EXACT:
            scale = self.scale
            return np.array([Fraction(int(c), scale) for c in self.rows[i]], dtype=object)
        return self.rows[i].copy()


def below(value, threshold, backend) -> tuple[bool, bool]:
    """Strict ``value < threshold`` plus a borderline flag for the float backend."""
    if backend == EXACT:
        return value < threshold, False
    thr = float(threshold)
    return value < thr, abs(value - thr) <= FLOAT_TOL


# -- distributions ---------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Distribution:
    mass: np.ndarray
    time: int = 0
    origin: int | str = "mixture"
    backend: str = EXACT

    def __post_init__(self):
        total = sum(self.mass) if self.backend == EXACT else float(np.sum(self.mass))
        if any(m < 0 for m in self.mass):
            raise ValueError("negative probability mass")
        if self.backend == EXACT and total != 1:
            raise ValueError(f"masses sum to {total}, not 1")
        if self.backend == FLOAT and abs(total - 1.0) > 1e-12:
            raise ValueError(f"masses sum to {total}, not 1")

    @property
    def n(self) -> int:
        return len(self.mass)

    def __getitem__(self, u):
        return self.mass[u]


def point_mass(n: int, v: int, backend: str = EXACT) -> Distribution:
    if backend == EXACT:
        mass = np.array([Fraction(0)] * n, dtype=object)
        mass[v] = Fraction(1)
    else:
        mass = np.zeros(n)
        mass[v] = 1.0
    return Distribution(mass, 0, v, backend)


def uniform(n: int, backend: str = EXACT) -> Distribution:
    if backend == EXACT:
        return Distribution(np.array([Fraction(1, n)] * n, dtype=object), 0, "uniform", EXACT)
    return Distribution(np.full(n, 1.0 / n), 0, "uniform", FLOAT)


def step(g: Graph, d: Distribution) -> Distribution:
    """One step of the walk: ``mass'(u) = sum over neighbours v of mass(v) / D``."""
    D = require_regular(g)
    if d.n != g.n:
        raise GraphError("distribution and graph sizes differ")
    k = g.n
    nxt = d.mass[g.indices].reshape(k, D).sum(axis=1)
    nxt = nxt / D if d.backend == FLOAT else np.array([Fraction(x) / D for x in nxt], dtype=object)
    return Distribution(nxt, d.time + 1, d.origin, d.backend)


def distribution_at(g: Graph, v: int, t: int, backend: str = "auto") -> Distribution:
    if t < 0:
        raise ValueError("t must be nonnegative")
    require_regular(g)
    backend = resolve_backend(backend, g.n, t)
    rows = WalkRows(g, [v], backend).step(t)
    return Distribution(rows.probabilities(0), t, v, backend)


def tv_distance(p, q):
    """Half the L1 distance; accepts Distributions or plain sequences."""
    a = p.mass if isinstance(p, Distribution) else p
    b = q.mass if isinstance(q, Distribution) else q
    if len(a) != len(b):
        raise GraphError("distributions have different lengths")
    exact = all(isinstance(x, (int, Fraction)) for x in list(a) + list(b))
    if exact:
        return Fraction(sum(abs(Fraction(x) - Fraction(y)) for x, y in zip(a, b)), 2)
    return 0.5 * float(np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)).sum())


# -- mixing times ------------------------------------------------------------

@dataclass(frozen=True)
class VertexMixing:
    vertex: int
    tv_at_tau: Fraction | float
    mixing_time: int | Capped

    @property
    def capped(self) -> bool:
        return isinstance(self.mixing_time, Capped)


@dataclass(frozen=True)
class MixingProfile:
    records: tuple[VertexMixing, ...]
    tau: int
    threshold: Fraction
    t_max: int
    backend: str

    @property
    def mix(self) -> int | Capped:
        """Graph mixing time: the worst vertex, or ``CAP`` if any vertex is capped."""
        if any(r.capped for r in self.records):
            return Capped(self.t_max)
        return max(r.mixing_time for r in self.records)

    def finite_times(self) -> list[int]:
        return [r.mixing_time for r in self.records if not r.capped]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["vertex", "tv_at_tau", "mixing_time", "capped"])
        for r in self.records:
            mt = r.mixing_time.t_max if r.capped else r.mixing_time
            w.writerow([r.vertex, r.tv_at_tau, mt, int(r.capped)])
        return buf.getvalue()


def mixing_profile(g: Graph, tau: int, threshold=DEFAULT_THRESHOLD, t_max: int | None = None,
                   backend: str = "auto") -> MixingProfile:
    """Per-vertex TV distance at ``tau`` and first time below ``threshold`` (linear scan)."""
    if t_max is None:
        t_max = default_t_max(g.n)
    if t_max < 1:
        raise ValueError("t_max must be >= 1")
    threshold = as_fraction(threshold)
    rows = WalkRows(g, None, backend)
    n = g.n
    first: list[int | None] = [None] * n
    tv_tau = [None] * n
    horizon = max(tau, t_max)
    while True:
        tvs = rows.tv_to_uniform()
        for v, d in enumerate(tvs):
            if first[v] is None and rows.t >= 0 and below(d, threshold, rows.backend)[0]:
                first[v] = rows.t
        if rows.t == tau:
            tv_tau = tvs
        done = all(f is not None for f in first)
        if rows.t >= horizon or (done and rows.t >= tau):
            break
        rows.step()
    records = tuple(
        VertexMixing(v, tv_tau[v], first[v] if first[v] is not None and first[v] <= t_max
                     else Capped(t_max))
        for v in range(n))
    return MixingProfile(records, tau, threshold, t_max, rows.backend)


def vertex_mixing_time(g: Graph, v: int, threshold=DEFAULT_THRESHOLD, t_max: int | None = None,
                       backend: str = "auto") -> int | Capped:
    """Least ``t <= t_max`` with TV(Q_v^t, U) < threshold, else ``CAP(t_max)``."""
    if t_max is None:
        t_max = default_t_max(g.n)
    threshold = as_fraction(threshold)
    if not 0 < threshold < 1:
        raise ValueError("threshold must lie in (0, 1)")
    rows = WalkRows(g, [v], backend)
    while rows.t <= t_max:
        if below(rows.tv_to_uniform()[0], threshold, rows.backend)[0]:
            return rows.t
        if rows.t == t_max:
            break
        rows.step()
    return Capped(t_max)


def mixing_time(g: Graph, threshold=DEFAULT_THRESHOLD, t_max: int | None = None,
                backend: str = "auto") -> int | Capped:
    return mixing_profile(g, 0, threshold, t_max, backend).mix


def tv_at(g: Graph, tau: int, backend: str = "auto"):
    """TV(Q_v^tau, U) for every vertex, and the backend used."""
    rows = WalkRows(g, None, resolve_backend(backend, g.n, tau)).step(tau)
    return rows.tv_to_uniform(), rows.backend


def well_mixing_set(g: Graph, tau: int, delta, backend: str = "auto") -> frozenset[int]:
    """Vertices whose walk is strictly within ``delta`` of uniform after ``tau`` steps."""
    delta = as_fraction(delta)
    tvs, used = tv_at(g, tau, backend)
    return frozenset(v for v, d in enumerate(tvs) if below(d, delta, used)[0])


def smallest_tau(g: Graph, delta, eps, t_max: int | None = None, backend: str = "auto"):
    """Least ``t`` at which at least ``eps * n`` vertices are within ``delta`` of uniform."""
    delta, eps = as_fraction(delta), as_fraction(eps)
    if t_max is None:
        t_max = default_t_max(g.n)
    rows = WalkRows(g, None, backend)
    while True:
        count = sum(below(d, delta, rows.backend)[0] for d in rows.tv_to_uniform())
        if count >= eps * g.n:
            return rows.t
        if rows.t >= t_max:
            return None
        rows.step()


def is_mixing_vertex(g: Graph, v: int, tau: int, eps, delta, backend: str = "auto") -> bool:
    """(tau, eps, delta)-mixing: all but ``delta*n`` probabilities lie in [(1-eps)/n, (1+eps)/n]."""
    eps, delta = as_fraction(eps), as_fraction(delta)
    rows = WalkRows(g, [v], resolve_backend(backend, g.n, tau)).step(tau)
    n = g.n
    if rows.backend == EXACT:
        scale = rows.scale
        c = rows.rows[0] * n
        lo, hi = (1 - eps) * scale, (1 + eps) * scale
        bad = sum(1 for x in c if not lo <= x <= hi)
    else:
        p = rows.rows[0] * n
        lo, hi = float(1 - eps) - FLOAT_TOL, float(1 + eps) + FLOAT_TOL
        bad = int(np.count_nonzero((p < lo) | (p > hi)))
    return bad <= delta * n


def stay_probability(g: Graph, X: Iterable[int], k: int, backend: str = "auto"):
    """Average over start vertices in ``X`` of Pr[Q_v^k in X]."""
    X = vertex_set(g, X)
    if not X:
        raise GraphError("stay probability of an empty set")
    rows = WalkRows(g, sorted(X), resolve_backend(backend, g.n, k)).step(k)
    inside = rows.mass_in(X)
    if rows.backend == EXACT:
        return Fraction(sum(inside), len(X))
    return float(sum(inside)) / len(X)


# -- walk counts -----------------------------------------------------------

def walk_counts(g: Graph, k_max: int, subset: Iterable[int] | None = None) -> list[int]:
    """``[W_0, ..., W_k_max]`` where ``W_k`` counts walks of length ``k`` (ordered, start given).

    With ``subset``, walks are confined to the induced subgraph on it.
    """
    if k_max < 0:
        raise ValueError("k must be nonnegative")
    if subset is None:
        members = np.arange(g.n)
    else:
        members = np.array(sorted(vertex_set(g, subset)), dtype=np.int64)
    inside = np.zeros(g.n, dtype=bool)
    inside[members] = True
    rows = np.repeat(np.arange(g.n), g.degrees)
    keep = inside[rows] & inside[g.indices]
    src, dst = rows[keep], g.indices[keep]
    dmax = int(np.bincount(src, minlength=g.n).max()) if len(src) else 0
    # every entry is at most |subset| * dmax**k; fall back to Python ints past int64
    dtype = np.int64 if len(members) * max(dmax, 1) ** k_max < 2 ** 62 else object
    x = inside.astype(np.int64).astype(dtype)
    out = [int(len(members))]
    for _ in range(k_max):
        nxt = np.zeros(g.n, dtype=dtype)
        if dtype is object:
            nxt[:] = 0
        np.add.at(nxt, dst, x[src])
        x = nxt
        out.append(int(x.sum()))
    return out


def count_walks(g: Graph, k: int, subset: Iterable[int] | None = None) -> int:
    return walk_counts(g, k, subset)[k]


# -- reversibility -----------------------------------------------------------

def flow_symmetry_defect(g: Graph, A: Iterable[int], B: Iterable[int], k: int,
                         backend: str = "auto"):
    """|sum_{v in A} Pr[Q_v^k in B] - sum_{v in B} Pr[Q_v^k in A]|."""
    A, B = vertex_set(g, A), vertex_set(g, B)
    if not A or not B:
        raise GraphError("flow symmetry needs nonempty A and B")
    used = resolve_backend(backend, g.n, k)
    rows_a = WalkRows(g, sorted(A), used).step(k)
    rows_b = WalkRows(g, sorted(B), used).step(k)
    lhs = sum(rows_a.mass_in(B))
    rhs = sum(rows_b.mass_in(A))
    return abs(lhs - rhs)


def walk_count_matrix(g: Graph, k: int) -> np.ndarray:
    """Integer matrix ``A**k`` (entry (v, u) = number of k-walks v -> u)."""
    require_regular(g)
    fits = g.n * g.D ** k < 2 ** 62
    a = g.adjacency_matrix(np.int64 if fits else object)
    out = np.eye(g.n, dtype=np.int64 if fits else object)
    if not fits:
        out = np.array([[int(x) for x in row] for row in out], dtype=object)
    for _ in range(k):
        out = out @ a
    return out


def flow_table(g: Graph, indicators: np.ndarray, k: int) -> np.ndarray:
    """``F[i, j] = D**k * sum_{v in S_i} Pr[Q_v^k in S_j]`` for 0/1 indicator rows ``S``.

    Exact integer arithmetic; the reversibility identity says ``F`` is symmetric.
    """
    C = walk_count_matrix(g, k)
    S = indicators.astype(C.dtype)
    return S @ C @ S.T
