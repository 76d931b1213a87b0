"""Command-line front end: ``mixcert <command> <input> [options]``.

Exit status is 0 when every verdict holds and 1 when some verdict fails;
usage or input errors exit with 2.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .amplification import verify_amplification
from .config import ConfigError, load_config
from .cycles import find_long_cycle, mixing_to_cycle, verify_neighborhood_condition
from .errors import CycleNotFoundError, HypothesisError, MixcertError
from .expansion import (EIG_TOL, RESTARTS, check_edge_expansion, conductance, extract_expander,
                        find_separator, sandwich_check, separator_lower_bound)
from .generators import KINDS, generate, parse_descriptor
from .graph import Graph, edge_boundary, parse_edge_list
from .report import RunReport, verdict
from .walks import DEFAULT_THRESHOLD, as_fraction, mixing_profile, smallest_tau

COMMANDS = ("gen", "profile", "conductance", "certify", "extract", "separator", "cycle",
            "amplify", "sandwich")


class UsageError(Exception):
    pass


def _number(text: str) -> Fraction:
    try:
        return as_fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _tau(text: str):
    if text == "auto":
        return text
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("tau must be 'auto' or an integer") from None
    if value < 0:
        raise argparse.ArgumentTypeError("tau must be >= 0")
    return value


def _range(text: str):
    try:
        lo, hi = (int(s) for s in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError("range must look like LO:HI") from None
    return lo, hi


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", help="edge-list file or construction descriptor, e.g. hypercube:D=3")
    common.add_argument("-o", "--output", help="write the report (or edge list for gen) here")
    common.add_argument("--mode")
    common.add_argument("--backend", choices=("auto", "exact", "float"))
    common.add_argument("--tau", type=_tau)
    common.add_argument("--delta", type=_number)
    common.add_argument("--eps", type=_number)
    common.add_argument("--M", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--threads", type=int)
    common.add_argument("--t-max", dest="t_max", type=int)
    common.add_argument("--c", type=_number, help="expansion constant for certify")
    common.add_argument("--range", dest="size_range", type=_range, help="size range LO:HI")
    common.add_argument("--k", type=int)
    common.add_argument("--ell", type=int)
    common.add_argument("--config")
    common.add_argument("--no-timing", action="store_true",
                        help="omit wall-clock time so reports are byte-reproducible")

    parser = argparse.ArgumentParser(prog="mixcert", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"mixcert {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def load_input(text: str) -> Graph:
    p = Path(text)
    if p.is_file():
        return parse_edge_list(p.read_text())
    kind = text.split(":", 1)[0]
    if kind in KINDS:
        return generate(parse_descriptor(text))
    raise UsageError(f"no such file and not a construction descriptor: {text!r}")


class _Settings:
    """Command-line flags layered over the configuration file over defaults."""

    def __init__(self, args, config: dict):
        self.args, self.config = args, config

    def get(self, name, default=None):
        value = getattr(self.args, name, None)
        if value is not None:
            return value
        return self.config.get(name, default)


def _threads(settings: _Settings) -> int:
    if settings.args.threads is not None:
        return settings.args.threads
    if "threads" in settings.config:
        return settings.config["threads"]
    env = os.environ.get("MIXCERT_THREADS")
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"MIXCERT_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def _require(settings, *names):
    for name in names:
        if settings.get(name) is None:
            raise UsageError(f"--{name.replace('_', '-')} is required for this command")


def _resolve_tau(g, settings, delta, eps, t_max):
    tau = settings.get("tau", "auto")
    if tau != "auto":
        return tau
    tau = smallest_tau(g, delta, eps, t_max, settings.get("backend", "auto"))
    if tau is None:
        raise HypothesisError(f"no tau <= t_max puts {eps} of the vertices within {delta} of uniform",
                              count=0, required=eps * g.n)
    return tau


# -- commands -------------------------------------------------------------------

def cmd_profile(g, s):
    threshold = as_fraction(s.get("delta") or s.config.get("threshold", DEFAULT_THRESHOLD))
    t_max = s.get("t_max")
    backend = s.get("backend", "auto")
    tau = s.get("tau", "auto")
    if tau == "auto":
        tau = smallest_tau(g, threshold, 1, t_max, backend)
        if tau is None:
            tau = mixing_profile(g, 0, threshold, t_max, backend).t_max
    prof = mixing_profile(g, tau, threshold, t_max, backend)
    params = {"tau": tau, "threshold": threshold, "t_max": prof.t_max}
    return params, prof.backend, {"profile": prof, "mix": prof.mix}, []


def cmd_conductance(g, s):
    mode = s.get("mode", "exact")
    res = conductance(g, mode, s.get("seed", 0), s.get("restarts", RESTARTS),
                      s.get("eig_tol", EIG_TOL))
    n, D = g.n, g.D
    k = len(res.argmin)
    recomputed = Fraction(n * edge_boundary(g, res.argmin), D * k * (n - k))
    return ({"mode": mode}, None, res,
            [verdict("conductance_witness", recomputed == res.value, recomputed, res.value)])


def cmd_certify(g, s):
    _require(s, "c")
    lo, hi = s.get("size_range") or (1, g.n // 2)
    mode = s.get("mode", "exact")
    cert = check_edge_expansion(g, s.get("c"), lo, hi, mode, s.get("seed", 0),
                                s.get("restarts", RESTARTS), s.get("eig_tol", EIG_TOL))
    params = {"c": cert.bound, "range": [lo, hi], "mode": mode}
    lhs = cert.min_ratio
    return params, None, cert, [verdict("edge_expansion", cert.certified, lhs, cert.bound)]


def cmd_extract(g, s):
    _require(s, "eps", "delta")
    eps, delta = s.get("eps"), s.get("delta")
    tau = _resolve_tau(g, s, delta, eps, s.get("t_max"))
    res = extract_expander(g, eps, delta, tau, s.get("backend", "auto"), s.get("seed", 0),
                           s.get("restarts", RESTARTS), s.get("eig_tol", EIG_TOL))
    verdicts = [verdict("hypothesis", True, res.well_mixing_count, eps * g.n),
                verdict("deleted_within_budget", res.within_budget, len(res.deleted), res.budget)]
    if res.certificate is not None:
        verdicts.append(verdict("kept_expansion", res.certificate.certified,
                                res.certificate.min_ratio, res.constant))
    return {"eps": eps, "delta": delta, "tau": tau}, None, res, verdicts


def cmd_separator(g, s):
    mode = s.get("mode", "exact")
    if mode in ("sweep", "sampled"):
        mode = "heuristic"
    res = find_separator(g, mode, s.get("seed", 0), s.get("restarts", RESTARTS),
                         s.get("eig_tol", EIG_TOL))
    limit = Fraction(2 * g.n, 3)
    verdicts = [verdict("separator_valid", res.largest_remaining <= limit,
                        res.largest_remaining, limit)]
    params = {"mode": mode}
    if s.get("eps") is not None and s.get("tau") not in (None, "auto"):
        bound = separator_lower_bound(s.get("eps"), s.get("tau"), g.n)
        params.update(eps=s.get("eps"), tau=s.get("tau"))
        verdicts.append(verdict("separator_lower_bound", res.size >= bound, res.size, bound))
    return params, None, res, verdicts


def cmd_cycle(g, s):
    if s.get("k") is not None and s.get("ell") is not None:
        k, ell = s.get("k"), s.get("ell")
        mode = s.get("mode")
        cond = None
        if mode in ("exact", "sampled"):
            cond = verify_neighborhood_condition(g, k, ell, mode, s.get("seed", 0))
        cyc = find_long_cycle(g, k, ell)
        verdicts = [verdict("cycle_length", cyc.length >= ell + 1, cyc.length, ell + 1)]
        if cond is not None:
            verdicts.insert(0, verdict("neighborhood_condition", cond.holds,
                                       cond.min_neighborhood, ell))
        return {"k": k, "ell": ell}, None, {"cycle": cyc, "condition": cond}, verdicts
    _require(s, "eps")
    eps = s.get("eps")
    delta = s.get("delta") or Fraction(1, 30)
    tau = _resolve_tau(g, s, delta, eps, s.get("t_max"))
    cyc, trace = mixing_to_cycle(g, eps, tau, delta, s.get("backend", "auto"))
    verdicts = [verdict("hypothesis", True, trace.well_mixing_count, eps * g.n),
                verdict("cycle_length", cyc.length > trace.bound, cyc.length, trace.bound)]
    return {"eps": eps, "delta": delta, "tau": tau}, None, {"cycle": cyc, "trace": trace}, verdicts


def cmd_amplify(g, s):
    _require(s, "eps", "delta", "M")
    eps, delta, M = s.get("eps"), s.get("delta"), s.get("M")
    tau = _resolve_tau(g, s, delta, eps, s.get("t_max"))
    rep = verify_amplification(g, tau, delta, eps, M, s.get("backend", "auto"))
    verdicts = [verdict(v.claim_id, v.holds, v.lhs, v.rhs) for v in rep.verdicts]
    verdicts.insert(0, verdict("hypothesis", rep.hypothesis, rep.sizes["A"], eps * g.n))
    payload = rep
    if g.n > 256:
        # sizes only for large graphs
        payload = {k: getattr(rep, k) for k in rep.__dataclass_fields__ if k != "ladder"}
        payload["final_tv"] = None
    return {"eps": eps, "delta": delta, "M": M, "tau": tau}, rep.backend, payload, verdicts


def cmd_sandwich(g, s):
    threshold = as_fraction(s.get("delta") or s.config.get("threshold", DEFAULT_THRESHOLD))
    rep = sandwich_check(g, s.get("t_max"), s.get("backend", "auto"), threshold)
    lhs = rep.mix
    return ({"threshold": threshold}, None, rep,
            [verdict("conductance_sandwich", rep.holds, lhs, [rep.lower, rep.upper])])


HANDLERS = {"profile": cmd_profile, "conductance": cmd_conductance, "certify": cmd_certify,
            "extract": cmd_extract, "separator": cmd_separator, "cycle": cmd_cycle,
            "amplify": cmd_amplify, "sandwich": cmd_sandwich}


def _emit(text: str, path):
    if path:
        Path(path).write_text(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = load_config(args.config) if args.config else {}
        settings = _Settings(args, config)
        threads = _threads(settings)
        timing = config.get("timing", True) and not args.no_timing
        start = time.perf_counter()
        g = load_input(args.input)
        if args.command == "gen":
            if not args.output:
                sys.stdout.write(g.to_edge_list())
                return 0
            Path(args.output).write_text(g.to_edge_list())
            params, backend, result, verdicts = {"output": args.output}, None, g, []
        else:
            try:
                params, backend, result, verdicts = HANDLERS[args.command](g, settings)
            except HypothesisError as exc:
                params, backend = {}, None
                result = {"error": str(exc), "count": exc.count, "required": exc.required}
                verdicts = [verdict("hypothesis", False, exc.count, exc.required)]
            except CycleNotFoundError as exc:
                params, backend = {}, None
                result = {"error": str(exc), "best": exc.best, "witness": exc.witness}
                verdicts = [verdict("cycle_length", False,
                                    exc.best.length if exc.best else 0, None)]
        elapsed = round((time.perf_counter() - start) * 1000) if timing else None
        report = RunReport(__version__, args.input, args.command, params,
                           backend or settings.get("backend", "auto"), threads, elapsed,
                           result, verdicts)
        text = report.to_json()
    except (ConfigError, UsageError, MixcertError, OSError, ValueError) as exc:
        print(f"mixcert: error: {exc}", file=sys.stderr)
        return 2
    _emit(text, args.output if args.command != "gen" else None)
    return 0 if report.ok else 1


def main():
    sys.exit(run())
