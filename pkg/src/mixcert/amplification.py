"""Bad-set ladder for amplifying a fraction of well-mixing vertices to almost all.

Given the well-mixing set ``A`` (TV below ``delta`` after ``tau`` steps), the
walk is watched only at times ``tau, 2*tau, ...``.  ``B_0`` collects vertices
that hit ``A`` after one chunk with probability below ``eps/2``; ``B_i``
collects vertices that land in the earlier layers with probability above
``eta_i``.  Every claimed inequality about these sets is evaluated on the
instance, never assumed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .errors import InfeasibleError
from .graph import Graph, components
from .walks import (EXACT, FLOAT_TOL, WalkRows, as_fraction, below, is_mixing_vertex,
                    require_regular, resolve_backend)

PRECISION = 60  # decimal digits for irrational thresholds
DECOMPOSITION_SAMPLES = 16
DECOMPOSITION_TOL = 1e-9


def _mpf(x):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def delta0(eps, M: int) -> Fraction:
    """eps * 3**(-M * 4**M) / 10**8, kept as an exact rational."""
    eps = as_fraction(eps)
    if not 0 < eps < Fraction(1, 4) or M < 1:
        raise InfeasibleError("delta0 needs 0 < eps < 1/4 and M >= 1")
    return eps / (10 ** 8 * 3 ** (M * 4 ** M))


@dataclass(frozen=True)
class EtaSchedule:
    eps: Fraction
    delta: Fraction
    M: int
    values: tuple

    def __getitem__(self, i):
        return self.values[i]


def eta_schedule(eps, delta, M: int) -> EtaSchedule:
    """eta_i = 2 * 3**(i+1) * (delta/eps)**(2**-i) for i = 0..M."""
    eps, delta = as_fraction(eps), as_fraction(delta)
    if eps <= 0 or delta <= 0 or M < 0:
        raise InfeasibleError("eta schedule needs eps, delta > 0 and M >= 0")
    with mpmath.workdps(PRECISION):
        ratio = _mpf(delta / eps)
        values = tuple(2 * mpmath.mpf(3) ** (i + 1) * ratio ** (mpmath.mpf(2) ** -i)
                       for i in range(M + 1))
        for i in range(M):
            if not values[i] <= values[i + 1] ** 2 / 9:
                raise AssertionError(f"eta recursion fails at i={i}")
    return EtaSchedule(eps, delta, M, values)


def _gt(value, thr, backend) -> tuple[bool, bool]:
    """Strict value > thr with an mpf threshold; flags float values near thr."""
    with mpmath.workdps(PRECISION):
        if backend == EXACT:
            return _mpf(value) > thr, False
        return value > float(thr), abs(value - float(thr)) <= FLOAT_TOL


@dataclass(frozen=True)
class BadSetLadder:
    A: frozenset
    B: tuple            # B_0 .. B_M
    cumulative: tuple   # B^0 .. B^M
    schedule: EtaSchedule
    tau: int
    M: int
    backend: str
    borderline: frozenset = frozenset()


def _ladder_from_rows(rows: WalkRows, A, tau, delta, eps, M) -> BadSetLadder:
    schedule = eta_schedule(eps, delta, M)
    borderline = set()
    half_eps = eps / 2
    B0 = set()
    for v, p in enumerate(rows.mass_in(A)):
        low, near = below(p, half_eps, rows.backend)
        if low:
            B0.add(v)
        if near:
            borderline.add(v)
    B = [frozenset(B0)]
    cum = [frozenset(B0)]
    for i in range(1, M + 1):
        Bi = set()
        for v, p in enumerate(rows.mass_in(cum[-1])):
            high, near = _gt(p, schedule[i], rows.backend)
            if high:
                Bi.add(v)
            if near:
                borderline.add(v)
        B.append(frozenset(Bi))
        cum.append(cum[-1] | Bi)
    for i in range(1, len(cum)):
        assert cum[i - 1] <= cum[i]
    return BadSetLadder(frozenset(A), tuple(B), tuple(cum), schedule, tau, M, rows.backend,
                        frozenset(borderline))


def _well_mixing_from_rows(rows: WalkRows, delta):
    A, near = set(), set()
    for v, d in enumerate(rows.tv_to_uniform()):
        ok, flag = below(d, delta, rows.backend)
        if ok:
            A.add(v)
        if flag:
            near.add(v)
    return frozenset(A), near


def bad_set_ladder(g: Graph, tau: int, delta, eps, M: int, backend: str = "auto") -> BadSetLadder:
    require_regular(g)
    delta, eps = as_fraction(delta), as_fraction(eps)
    rows = WalkRows(g, None, resolve_backend(backend, g.n, tau)).step(tau)
    A, near = _well_mixing_from_rows(rows, delta)
    ladder = _ladder_from_rows(rows, A, tau, delta, eps, M)
    if near:
        ladder = BadSetLadder(**{**ladder.__dict__, "borderline": ladder.borderline | near})
    return ladder


def _taboo_chain(g: Graph, sources, A, tau, M, backend):
    """Run the chunked walk with mass absorbed on ``A`` at times tau, 2tau, ..., M*tau.

    Returns the walk rows after the last round and the absorbed mass per round
    (``hits[i][j, u]`` = mass of source j first hitting ``A`` at chunk i+1, at u).
    """
    rows = WalkRows(g, sources, backend)
    cols = sorted(A)
    hits = []
    for _ in range(M):
        rows.step(tau)
        hit = np.zeros_like(rows.rows)
        if cols:
            hit[:, cols] = rows.rows[:, cols]
            rows.rows[:, cols] = 0
        hits.append((hit, rows.scale))
    return rows, hits


def no_visit_probability(g: Graph, v: int, A, tau: int, M: int, backend: str = "auto"):
    """Pr[Q_v^{i*tau} not in A for all 1 <= i <= M], computed exactly by absorption."""
    require_regular(g)
    backend = resolve_backend(backend, g.n, M * tau)
    rows, _ = _taboo_chain(g, [v], frozenset(A), tau, M, backend)
    total = rows.rows[0].sum()
    return Fraction(int(total), rows.scale) if backend == EXACT else float(total)


@dataclass(frozen=True)
class Verdict:
    claim_id: str
    holds: bool
    lhs: object
    rhs: object


@dataclass(frozen=True)
class AmplificationReport:
    n: int
    tau: int
    delta: Fraction
    eps: Fraction
    M: int
    backend: str
    hypothesis: bool
    ladder: BadSetLadder
    sizes: dict
    identity: tuple            # (lhs, rhs, defect)
    claim_b0: Verdict
    claim_bm: tuple
    bound: object              # 2 e^{-eps M / 2} + 6 delta
    final_tv: dict             # v -> TV(Q_v^{(M+1)tau}, U) for v outside B^M
    final_violators: tuple
    exceptional: tuple         # all v whose TV at (M+1)tau is >= bound
    exceptional_limit: object  # (delta/eps)^(1/4^M) * n
    no_visit: dict
    no_visit_bound: object
    visit_sum_defect: object
    decomposition_samples: tuple
    decomposition_error: object
    newnotion_ok: bool
    delta0: Fraction | None
    delta_feasible: bool
    component_sizes: tuple
    verdicts: tuple = field(default=())


def verify_amplification(g: Graph, tau: int, delta, eps, M: int,
                         backend: str = "auto") -> AmplificationReport:
    """Build the ladder and evaluate every claim about it on ``g``."""
    require_regular(g)
    delta, eps = as_fraction(delta), as_fraction(eps)
    if tau < 1 or M < 1:
        raise InfeasibleError("need tau >= 1 and M >= 1")
    n = g.n
    backend = resolve_backend(backend, n, (M + 1) * tau)
    exact = backend == EXACT

    # P^{j tau} for j = 1..M+1, all start vertices
    rows = WalkRows(g, None, backend)
    snaps = {}
    for j in range(1, M + 2):
        rows.step(tau)
        snaps[j] = (rows.rows.copy(), rows.scale)
    first = WalkRows(g, None, backend, rows=snaps[1][0])
    first.t = tau

    A, near = _well_mixing_from_rows(first, delta)
    ladder = _ladder_from_rows(first, A, tau, delta, eps, M)
    if near:
        ladder = BadSetLadder(**{**ladder.__dict__, "borderline": ladder.borderline | near})
    hypothesis = len(A) >= eps * n
    B0, BM = ladder.B[0], ladder.cumulative[-1]

    # reversibility cross-check behind the B_0 bound
    lhs = sum(first.mass_in(B0)[v] for v in A) if A and B0 else 0
    rhs = sum(first.mass_in(A)[v] for v in B0) if A and B0 else 0
    defect = abs(lhs - rhs)

    verdicts = []
    b0_rhs = 6 * delta * n / eps
    claim_b0 = Verdict("claim_B0", len(B0) < b0_rhs, len(B0), b0_rhs)
    verdicts.append(claim_b0)
    ident_ok = defect == 0 if exact else defect <= FLOAT_TOL
    verdicts.append(Verdict("reversibility_identity", ident_ok, lhs, rhs))

    claim_bm = []
    with mpmath.workdps(PRECISION):
        for i, Bi in enumerate(ladder.cumulative):
            limit = ladder.schedule[i] * n
            claim_bm.append(Verdict(f"claim_bm[{i}]", len(Bi) < limit, len(Bi), limit))
        bound = 2 * mpmath.exp(-_mpf(eps) * M / 2) + 6 * _mpf(delta)
        no_visit_bound = 2 * mpmath.exp(-_mpf(eps) * M / 2)
        exceptional_limit = _mpf(delta / eps) ** (mpmath.mpf(1) / 4 ** M) * n
    verdicts.extend(claim_bm)
    verdicts.append(Verdict("eta_recursion", True, "eta_i", "eta_{i+1}^2/9"))

    # final distance from uniform at (M+1) tau
    last = WalkRows(g, None, backend, rows=snaps[M + 1][0])
    last.t = (M + 1) * tau
    tvs = last.tv_to_uniform()
    with mpmath.workdps(PRECISION):
        violating = {v for v, d in enumerate(tvs) if not _mpf(d) < bound}
    outside = [v for v in range(n) if v not in BM]
    final_tv = {v: tvs[v] for v in outside}
    final_violators = tuple(sorted(v for v in outside if v in violating))
    verdicts.append(Verdict("conclusion_outside_BM", not final_violators,
                            len(final_violators), 0))
    with mpmath.workdps(PRECISION):
        verdicts.append(Verdict("exceptional_set", len(violating) <= exceptional_limit,
                                len(violating), exceptional_limit))

    # taboo chain for every vertex outside B^M
    no_visit, visit_defect = {}, 0
    decomposition_error = 0
    samples = tuple(outside[:DECOMPOSITION_SAMPLES])
    if outside:
        trows, hits = _taboo_chain(g, outside, A, tau, M, backend)
        survive = trows.rows.sum(axis=1)
        scale_M = trows.scale
        for j, v in enumerate(outside):
            if exact:
                stay = Fraction(int(survive[j]), scale_M)
                hit = sum(Fraction(int(h[j].sum()), s) for h, s in hits)
            else:
                stay = float(survive[j])
                hit = sum(float(h[j].sum()) for h, _ in hits)
            no_visit[v] = stay
            visit_defect = max(visit_defect, abs(stay + hit - 1))
        with mpmath.workdps(PRECISION):
            nv_bad = [v for v, p in no_visit.items() if not _mpf(p) <= no_visit_bound]
        verdicts.append(Verdict("no_visit_bound", not nv_bad, len(nv_bad), 0))
        verdicts.append(Verdict("visit_probability_sum", visit_defect == 0 if exact
                                else visit_defect <= FLOAT_TOL, visit_defect, 0))

        # first-visit decomposition of Q_v^{(M+1) tau}
        for j, v in enumerate(samples):
            recomposed = 0
            for i in range(1, M + 1):
                h, _ = hits[i - 1]
                recomposed = recomposed + h[j] @ snaps[M + 1 - i][0]
            recomposed = recomposed + trows.rows[j] @ snaps[1][0]
            direct = snaps[M + 1][0][v]
            if exact:
                err = Fraction(int(np.abs(recomposed - direct).max()), snaps[M + 1][1])
            else:
                err = float(np.abs(recomposed - direct).max())
            decomposition_error = max(decomposition_error, err)
        verdicts.append(Verdict("first_visit_decomposition",
                                decomposition_error == 0 if exact
                                else decomposition_error <= DECOMPOSITION_TOL,
                                decomposition_error, 0 if exact else DECOMPOSITION_TOL))

    newnotion_ok = all(is_mixing_vertex(g, v, tau, eps, 2 * delta / eps, backend) for v in A)
    verdicts.append(Verdict("newnotion_linkage", newnotion_ok, len(A), len(A)))

    d0 = delta0(eps, M) if 0 < eps < Fraction(1, 4) else None
    sizes = {"A": len(A), "B": [len(b) for b in ladder.B],
             "cumulative": [len(b) for b in ladder.cumulative]}
    return AmplificationReport(
        n, tau, delta, eps, M, backend, hypothesis, ladder, sizes, (lhs, rhs, defect),
        claim_b0, tuple(claim_bm), bound, final_tv, final_violators,
        tuple(sorted(violating)), exceptional_limit, no_visit, no_visit_bound, visit_defect,
        samples, decomposition_error, newnotion_ok, d0,
        d0 is not None and delta < d0, tuple(components(g).sizes), tuple(verdicts))
