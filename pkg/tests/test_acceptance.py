"""Acceptance suite: one test per criterion, each with its runtime budget.

Run ``pytest tests/test_acceptance.py -v``; the terminal summary prints one
PASS/FAIL line per criterion.
"""

import itertools
import json
import math
import os
import subprocess
import sys
import time
from fractions import Fraction as F

import mpmath
import numpy as np
import pytest

from mixcert.amplification import verify_amplification
from mixcert.cli import run as cli_run
from mixcert.cycles import (find_long_cycle, longest_cycle_oracle, mixing_to_cycle,
                            validate_cycle, verify_neighborhood_condition)
from mixcert.errors import HypothesisError
from mixcert.expansion import (check_edge_expansion, extract_expander, find_separator,
                               sandwich_check, separator_lower_bound)
from mixcert.generators import (complete, cycle, expander_plus_clique, hypercube, merged_expanders,
                                petersen, random_regular)
from mixcert.graph import Graph, components, disjoint_union, edge_boundary, induced
from mixcert.report import to_jsonable
from mixcert.walks import (EXACT, WalkRows, flow_symmetry_defect, flow_table, mixing_profile,
                           smallest_tau, walk_counts, well_mixing_set)


def _combos():
    out = []
    for n in range(4, 11):
        for D in (2, 3, 4):
            if D < n and (n * D) % 2 == 0:
                out.append((n, D))
    return out


def small_corpus():
    """200 seeded random regular graphs with n <= 10 and D in {2, 3, 4}."""
    combos = _combos()
    return [random_regular(*combos[i % len(combos)], seed=i) for i in range(200)]


# -- 1 ----------------------------------------------------------------------------

@pytest.mark.criterion(1)
def test_criterion_01_reversibility(detail):
    start = time.perf_counter()
    pairs = 0
    rng = np.random.Generator(np.random.PCG64(1))
    for i, g in enumerate(small_corpus()):
        n = g.n
        k = 1 + i % 8
        if n <= 8:
            # every pair (A, B) at once: F[a, b] = D^k * sum_{v in A} Pr[Q_v^k in B]
            S = np.array([[(m >> v) & 1 for v in range(n)] for m in range(1, 2 ** n)])
            table = flow_table(g, S, k)
            assert (table == table.T).all(), f"graph {i}: asymmetric flow table"
            pairs += len(S) ** 2
            # spot-check the table against the direct routine
            for _ in range(5):
                a, b = (int(x) for x in rng.integers(0, len(S), size=2))
                A = [v for v in range(n) if S[a, v]]
                B = [v for v in range(n) if S[b, v]]
                assert flow_symmetry_defect(g, A, B, k, EXACT) == 0
        else:
            for _ in range(100):
                A = [v for v in range(n) if rng.random() < 0.5] or [0]
                B = [v for v in range(n) if rng.random() < 0.5] or [n - 1]
                assert flow_symmetry_defect(g, A, B, k, EXACT) == 0
                pairs += 1
    elapsed = time.perf_counter() - start
    detail(f"{pairs} (A,B) pairs, defect 0, {elapsed:.1f}s")
    assert elapsed < 60


# -- 2 ----------------------------------------------------------------------------

@pytest.mark.criterion(2)
def test_criterion_02_tv_monotone(detail):
    start = time.perf_counter()
    checked = 0
    for g in small_corpus():
        if not g.is_connected():
            continue
        rows = WalkRows(g, None, EXACT)
        prev = rows.tv_to_uniform()
        for _ in range(40):
            rows.step()
            cur = rows.tv_to_uniform()
            assert all(c <= p for c, p in zip(cur, prev))
            prev = cur
        checked += 1
    elapsed = time.perf_counter() - start
    detail(f"{checked} connected graphs, t <= 40, zero tolerance, {elapsed:.1f}s")
    assert elapsed < 60


# -- 3 ----------------------------------------------------------------------------

def _walk_corpus():
    graphs = []
    rng = np.random.Generator(np.random.PCG64(3))
    combos = _combos()
    for i in range(50):
        graphs.append(random_regular(*combos[(7 * i) % len(combos)], seed=1000 + i))
    for _ in range(50):
        n = int(rng.integers(6, 11))
        p = float(rng.uniform(0.2, 0.7))
        edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
        graphs.append(Graph.from_edges(n, edges))
    return graphs


@pytest.mark.criterion(3)
def test_criterion_03_walk_count_bound(detail):
    start = time.perf_counter()
    checked = equal_regular = 0
    for g in _walk_corpus():
        for s in range(1, min(8, g.n) + 1):
            for X in itertools.combinations(range(g.n), s):
                h, _ = induced(g, X)
                d = F(2 * h.num_edges, s)
                W = walk_counts(g, 10, X)
                for k, w in enumerate(W):
                    bound = s * d ** k
                    assert w >= math.ceil(bound)
                    if h.is_regular or k <= 1:
                        assert w == bound
                    else:
                        assert w > bound
                    checked += 1
                equal_regular += h.is_regular
    elapsed = time.perf_counter() - start
    detail(f"{checked} (subgraph, k) checks, {equal_regular} regular subgraphs with equality, "
           f"{elapsed:.1f}s")
    assert elapsed < 120


# -- 4 ----------------------------------------------------------------------------

@pytest.mark.criterion(4)
def test_criterion_04_sandwich(detail):
    start = time.perf_counter()
    done = 0
    seed = 0
    shapes = [(n, D) for n in range(8, 15) for D in (3, 4, 5) if (n * D) % 2 == 0]
    while done < 50:
        n, D = shapes[seed % len(shapes)]
        g = random_regular(n, D, 400 + seed)
        seed += 1
        if not g.is_connected() or g.is_bipartite():
            continue
        rep = sandwich_check(g)
        assert rep.applicable
        assert rep.lower < rep.mix < rep.upper, (n, D, rep)
        done += 1
    elapsed = time.perf_counter() - start
    detail(f"50 graphs, exact phi and mix, {elapsed:.1f}s")
    assert elapsed < 600


# -- 5 ----------------------------------------------------------------------------

@pytest.mark.criterion(5)
def test_criterion_05_connected_expansion(detail):
    start = time.perf_counter()
    delta, eps = F(1, 20), F(2, 5)
    done, seed = 0, 0
    shapes = [(16, 3), (18, 4), (20, 3), (22, 4), (24, 3), (24, 5), (20, 5)]
    while done < 20:
        n, D = shapes[seed % len(shapes)]
        g = random_regular(n, D, 500 + seed)
        seed += 1
        if not g.is_connected():
            continue
        tau = smallest_tau(g, 2 * delta, eps)
        assert tau is not None
        assert len(well_mixing_set(g, tau, 2 * delta)) >= eps * n
        c = eps * D / (8 * tau)
        lo, hi = math.ceil(4 * delta * n), n // 2
        cert = check_edge_expansion(g, c, lo, hi, "exact")
        assert cert.verdict == "certified", (n, D, tau, cert)
        done += 1
    elapsed = time.perf_counter() - start
    detail(f"20 instances n <= 24, exact enumeration, zero violations, {elapsed:.1f}s")
    assert elapsed < 1800


# -- 6 / 7 ------------------------------------------------------------------------

DELTA6, EPS6 = F(1, 30), F(1, 2)


def extraction_corpus():
    """Instances with n <= 120 meeting the hypothesis at delta = 1/30, eps = 1/2.

    Another component of size s forces TV >= s/n at every vertex outside it,
    so with D >= 3 (s >= D + 1 >= 4) a union needs n > 120; unions here use a
    triangle next to a long odd cycle, plus connected random regular graphs.
    """
    out = []
    for n in (94, 106, 120):
        out.append((f"C{n - 3}+K3", disjoint_union(cycle(n - 3), cycle(3))))
    for n, D, seed in [(16, 3, 1), (18, 3, 2), (20, 4, 3), (22, 3, 4), (24, 4, 5),
                       (40, 3, 6), (64, 4, 7), (100, 4, 8), (120, 3, 9)]:
        out.append((f"rr({n},{D},{seed})", random_regular(n, D, seed)))
    return out


def _expander_clique_excluded():
    """Every expander_plus_clique instance with n <= 120 and D >= 3 misses the hypothesis."""
    missed = 0
    for n, D in [(60, 4), (100, 6), (120, 3), (110, 4)]:
        g = expander_plus_clique(n, D, 2)
        assert F(D + 1, n) >= DELTA6
        tau = smallest_tau(g, DELTA6, EPS6, 2000)
        assert tau is None
        missed += 1
    return missed


@pytest.mark.criterion(6)
def test_criterion_06_extraction(detail):
    start = time.perf_counter()
    excluded = _expander_clique_excluded()
    exact = 0
    for name, g in extraction_corpus():
        tau = smallest_tau(g, DELTA6, EPS6, 40000)
        assert tau is not None, name
        res = extract_expander(g, EPS6, DELTA6, tau)
        assert len(res.deleted) <= 5 * DELTA6 * g.n, name
        assert res.constant == EPS6 * g.D / (16 * tau)
        cert = res.certificate
        if res.kept_graph.n <= 26:
            assert cert.mode == "exact" and cert.verdict == "certified", name
            exact += 1
        else:
            assert cert.verdict == "certified (sampled)", name
        # the certificate is recomputed on the kept graph
        recheck = check_edge_expansion(res.kept_graph, res.constant, 1, res.kept_graph.n // 2,
                                       cert.mode)
        assert recheck.verdict == cert.verdict
    elapsed = time.perf_counter() - start
    detail(f"{len(extraction_corpus())} instances ({exact} exact certificates); "
           f"{excluded} expander_plus_clique instances cannot meet delta <= 1/30, {elapsed:.1f}s")
    assert elapsed < 600


@pytest.mark.criterion(7)
def test_criterion_07_separator_bound(detail):
    start = time.perf_counter()
    checked = []
    for name, g in extraction_corpus():
        if g.n > 22:
            continue
        tau = smallest_tau(g, DELTA6, EPS6)
        assert len(well_mixing_set(g, tau, DELTA6)) >= EPS6 * g.n
        sep = find_separator(g, "exact")
        bound = separator_lower_bound(EPS6, tau, g.n)
        assert sep.size >= bound, (name, sep.size, bound)
        checked.append(sep.size)
    elapsed = time.perf_counter() - start
    assert checked
    detail(f"{len(checked)} instances, separator sizes {checked}, {elapsed:.1f}s")
    assert elapsed < 1800


# -- 8 ----------------------------------------------------------------------------

def cycle_corpus():
    out = [(f"C{n}", cycle(n)) for n in (5, 6, 7, 8, 9, 10, 12)]
    out.append(("Petersen", petersen()))
    shapes = [(n, D) for n in (10, 12, 14, 16) for D in (3, 4)]
    i = 0
    while len(out) < 30:
        n, D = shapes[i % len(shapes)]
        out.append((f"rr({n},{D},{800 + i})", random_regular(n, D, 800 + i)))
        i += 1
    return out


@pytest.mark.criterion(8)
def test_criterion_08_cycle_contract(detail):
    start = time.perf_counter()
    lengths = []
    for name, g in cycle_corpus():
        k = g.n // 2
        # strongest ell for which the condition is exhaustively verified
        least = verify_neighborhood_condition(g, k, 2).min_neighborhood
        ell = max(2, least)
        cond = verify_neighborhood_condition(g, k, ell, "exact")
        if not cond.holds:
            continue
        c = find_long_cycle(g, k, ell)
        validate_cycle(g, c.vertices)
        best = longest_cycle_oracle(g).length
        assert ell + 1 <= c.length <= best, name
        lengths.append(c.length)
    elapsed = time.perf_counter() - start
    assert len(lengths) == 30
    detail(f"30 graphs, contract held and never above the oracle, {elapsed:.1f}s")
    assert elapsed < 600


# -- 9 ----------------------------------------------------------------------------

@pytest.mark.criterion(9)
def test_criterion_09_pipeline(detail):
    start = time.perf_counter()
    eps, delta = F(1, 2), F(1, 30)
    done = 0
    for n, D, seed in [(40, 3, 1), (50, 4, 2), (64, 3, 3), (80, 5, 4), (90, 4, 5),
                       (100, 3, 6), (120, 5, 7), (150, 4, 8), (180, 3, 9), (200, 5, 10)]:
        g = random_regular(n, D, seed)
        tau = smallest_tau(g, delta, eps)
        prof = mixing_profile(g, tau, delta)
        # profile verification: records at tau strictly below delta for >= eps n vertices
        assert sum(1 for r in prof.records if r.tv_at_tau < delta) >= eps * n
        cyc, trace = mixing_to_cycle(g, eps, tau, delta)
        validate_cycle(g, cyc.vertices)
        assert cyc.length > eps * n / (40 * tau)
        done += 1
    elapsed = time.perf_counter() - start
    detail(f"{done} instances, cycles validated above eps n / (40 tau), {elapsed:.1f}s")
    assert elapsed < 600


# -- 10 ---------------------------------------------------------------------------

def _recompute_verdicts(payload, n):
    """Re-derive the ladder verdicts from the serialized report alone."""
    eps, delta = F(payload["eps"]), F(payload["delta"])
    sizes = payload["sizes"]
    out = {"claim_B0": sizes["B"][0] < 6 * delta * n / eps}
    with mpmath.workdps(60):
        for i, size in enumerate(sizes["cumulative"]):
            eta = 2 * mpmath.mpf(3) ** (i + 1) * (mpmath.mpf(delta.numerator) / delta.denominator
                                                  / (mpmath.mpf(eps.numerator) / eps.denominator)
                                                  ) ** (mpmath.mpf(2) ** -i)
            out[f"claim_bm[{i}]"] = size < eta * n
    ladder = payload["ladder"]
    for i in range(1, len(ladder["cumulative"])):
        assert set(ladder["cumulative"][i - 1]) <= set(ladder["cumulative"][i])
    return out


def _check_schedule(schedule_values):
    with mpmath.workdps(60):
        vals = [mpmath.mpf(v) for v in schedule_values]
        for i in range(len(vals) - 1):
            assert vals[i] <= vals[i + 1] ** 2 / 9 * (1 + mpmath.mpf(10) ** -25)


def _ladder_instance(g, tau, delta, eps, M):
    rep = verify_amplification(g, tau, delta, eps, M)
    payload = json.loads(json.dumps(to_jsonable(rep)))
    recomputed = _recompute_verdicts(payload, g.n)
    by_id = {v.claim_id: v.holds for v in rep.verdicts}
    for cid, holds in recomputed.items():
        assert by_id[cid] == holds, cid
    _check_schedule(payload["ladder"]["schedule"]["values"])
    if rep.hypothesis:
        assert rep.claim_b0.holds
    tol = 0 if rep.backend == EXACT else 1e-9
    assert rep.decomposition_error <= tol
    return rep


@pytest.mark.criterion(10)
def test_criterion_10_ladder(detail):
    start = time.perf_counter()
    # A = V: everything trivial, exceptional set empty
    for i, (n, D) in enumerate([(6, 5), (8, 7), (12, 3), (14, 4), (16, 3), (20, 4), (24, 3),
                                (30, 4), (40, 3), (50, 4)]):
        g = complete(n) if D == n - 1 else random_regular(n, D, 40 + i)
        delta, eps = F(1, 10), F(1, 5)
        tau = smallest_tau(g, delta, 1)
        M = 1 + i % 3
        rep = _ladder_instance(g, tau, delta, eps, M)
        assert rep.sizes["A"] == n and rep.exceptional == ()
        assert all(not b for b in rep.ladder.cumulative)
        assert all(v.holds for v in rep.verdicts)
    # merged expanders: tau from the merged vertices' profile, delta observed there
    merged_reports = []
    for n, D, m, seed in [(128, 8, 16, 5), (128, 8, 8, 1), (128, 8, 32, 2), (96, 6, 12, 3),
                          (120, 8, 10, 4)]:
        g = merged_expanders(n, D, m, seed)
        assert g.n <= 256
        k = n // m
        prof = mixing_profile(g, 0, F(1, 4))
        times = sorted(prof.records[v].mixing_time for v in range(k))
        tau = times[len(times) // 2]
        tvs = mixing_profile(g, tau, F(1, 4)).records
        delta = F(repr(max(float(tvs[v].tv_at_tau) for v in range(k)) * (1 + 1e-6)))
        A = well_mixing_set(g, tau, delta)
        eps = F(len(A), g.n)
        rep = _ladder_instance(g, tau, delta, eps, 3)
        assert rep.hypothesis
        merged_reports.append((g.n, tau, len(A), rep.sizes["cumulative"][-1],
                               len(rep.exceptional)))
    elapsed = time.perf_counter() - start
    detail(f"10 A=V instances + merged (n, tau, |A|, |B^M|, exceptional) = {merged_reports}, "
           f"{elapsed:.1f}s")
    assert elapsed < 1200


# -- 11 ---------------------------------------------------------------------------

@pytest.mark.criterion(11)
def test_criterion_11_hypercube(detail):
    start = time.perf_counter()
    rows = []
    for D in range(6, 11):
        g = hypercube(D)
        X = [v for v in range(g.n) if not v & 1]
        e = edge_boundary(g, X)
        assert e == len(X)
        tau = mixing_profile(g, 0, F(1, 4)).mix
        rows.append((D, tau))
    elapsed = time.perf_counter() - start
    assert elapsed < 300
    failures = []
    for D, tau in rows:
        if not tau:
            failures.append(f"Q{D}: tau = {tau!r} (bipartite, the walk never mixes)")
        elif not len(X) <= D * math.log(tau) / tau * len(X):
            failures.append(f"Q{D}: tau = {tau}, D log(tau)/tau = {D * math.log(tau) / tau:.3f} < 1")
    detail("; ".join(failures) if failures else f"{rows}")
    assert not failures, "; ".join(failures)


# -- 12 ---------------------------------------------------------------------------

DETERMINISM_RUNS = [
    ["gen", "merged_expanders:n=64,D=4,m=8,seed=7"],
    ["profile", "random_regular:n=20,D=3,seed=1", "--tau", "auto"],
    ["conductance", "random_regular:n=30,D=4,seed=2", "--mode", "sweep", "--seed", "3"],
    ["certify", "random_regular:n=40,D=3,seed=4", "--c", "0.05", "--mode", "sampled"],
    ["extract", "random_regular:n=24,D=4,seed=5", "--eps", "0.5", "--delta", "1/30"],
    ["separator", "matched_expanders:n=20,D=4,seed=1", "--mode", "heuristic"],
    ["cycle", "random_regular:n=100,D=4,seed=3", "--eps", "0.5"],
    ["amplify", "merged_expanders:n=128,D=8,m=16,seed=5", "--tau", "5", "--delta", "0.2",
     "--eps", "1/31", "--M", "3"],
    ["sandwich", "random_regular:n=12,D=3,seed=1"],
]


@pytest.mark.criterion(12)
def test_criterion_12_determinism(detail, capsys):
    for argv in DETERMINISM_RUNS:
        full = argv + ["--threads", "1", "--no-timing"] if argv[0] != "gen" else argv
        outputs = []
        for _ in range(2):
            cli_run(full)
            outputs.append(capsys.readouterr().out)
        assert outputs[0] == outputs[1], argv[0]
        # a fresh interpreter with a different hash seed gives the same bytes
        env = dict(os.environ, PYTHONHASHSEED="12345")
        proc = subprocess.run([sys.executable, "-m", "mixcert", *full], capture_output=True,
                              text=True, env=env)
        assert proc.stdout == outputs[0], argv[0]
    # library-level rerun of a criterion computation
    g = merged_expanders(128, 8, 16, 5)
    a = json.dumps(to_jsonable(verify_amplification(g, 5, F(1, 5), F(1, 31), 3)))
    b = json.dumps(to_jsonable(verify_amplification(merged_expanders(128, 8, 16, 5), 5,
                                                    F(1, 5), F(1, 31), 3)))
    assert a == b
    detail(f"{len(DETERMINISM_RUNS)} CLI reports byte-identical in-process and across "
           f"interpreters at threads=1")
