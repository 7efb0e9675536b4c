"""Batch experiment runner.

Subcommands: ``search``, ``curve``, ``count``, ``amplify``, ``lowerbound``.
Every report carries the tool version and master seed; identical arguments
give byte-identical output. Exit codes: 0 success, 1 usage error,
2 internal invariant violation.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from . import __version__, analytic, count, lowerbound, sv
from ._random import derived_seed, haar_unitary, trial_rng
from .amplify import amplify_known, amplify_unknown, make_amplifier
from .errors import InvariantViolation, NormDriftError
from .search import SearchParams, classical_baseline, grover_state, search_known, search_unknown

EXIT_OK, EXIT_USAGE, EXIT_INVARIANT = 0, 1, 2

COLUMNS = {
    "search": ["trial", "found", "totalQueries", "loops", "success"],
    "curve": ["k", "closedForm", "simulated", "absDiff"],
    "count": ["n", "a", "t", "y", "aTilde", "absErr"],
    "amplify": ["trial", "found", "success", "iterations", "invocations"],
    "lowerbound": ["n", "m", "k", "seed", "sumD", "bound", "minD", "avgAdv", "advBound", "allClaimsPass"],
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class Report:
    command: str
    seed: int
    config: dict
    rows: list[dict]
    summary: dict
    json_rows: list | None = None
    failed: bool = False
    columns: list[str] = field(default_factory=list)


def _k_range(text: str) -> list[int]:
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            ks = list(range(int(lo), int(hi) + 1))
        else:
            ks = [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad k range {text!r}; use 3, 1,2,5 or 1..8")
    if not ks or min(ks) < 0:
        raise argparse.ArgumentTypeError(f"bad k range {text!r}")
    return ks


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return value


def _pos_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _marked_set(args) -> list[int]:
    N = 1 << args.n
    if args.marked is not None:
        with open(args.marked) as fh:
            text = fh.read().strip()
        items = json.loads(text) if text.startswith("[") else text.split()
        marked = sorted({int(x) for x in items})
        if any(not 0 <= x < N for x in marked):
            raise UsageError(f"marked indices must lie in [0, {N})")
        return marked
    if args.a is None:
        raise UsageError("one of --a or --marked is required")
    if not 0 <= args.a <= N:
        raise UsageError(f"--a must lie in [0, {N}]")
    rng = trial_rng(args.seed)
    return sorted(int(x) for x in rng.choice(N, size=args.a, replace=False))


def _map_trials(fn, trials: int, workers: int) -> list:
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, range(trials), chunksize=max(1, trials // (4 * workers))))
    return [fn(i) for i in range(trials)]


def _search_trial(i: int, *, n: int, marked: list[int], mode: str, seed: int, lam: float, t: int) -> dict:
    oracle = sv.OracleSpec(n, marked)
    rng = trial_rng(seed, i)
    if mode == "known":
        out = search_known(oracle, len(marked), rng)
    elif mode == "unknown":
        out = search_unknown(oracle, SearchParams(lam=lam), rng)
    elif mode == "classical":
        out = classical_baseline(oracle, rng)
    else:
        out = count.search_via_counting(oracle, t, rng)
    return out.to_dict()


def cmd_search(args) -> Report:
    SearchParams(lam=args.lam)
    marked = _marked_set(args)
    a, N = len(marked), 1 << args.n
    if args.mode == "known" and a == 0:
        raise UsageError("--mode known needs at least one marked item")
    t = args.t if args.t is not None else math.ceil(args.n / 2) + 2
    fn = partial(_search_trial, n=args.n, marked=marked, mode=args.mode, seed=args.seed, lam=args.lam, t=t)
    outcomes = _map_trials(fn, args.trials, args.workers)
    rows = [
        {"trial": i, "found": "" if o["found"] is None else o["found"], "totalQueries": o["totalQueries"],
         "loops": len(o["loops"]), "success": o["found"] is not None}
        for i, o in enumerate(outcomes)
    ]
    queries = [o["totalQueries"] for o in outcomes]
    model = analytic.make_model(args.n, a)
    summary = {
        "trials": args.trials,
        "a": a,
        "successRate": sum(r["success"] for r in rows) / max(1, len(rows)),
        "meanQueries": statistics.fmean(queries) if queries else 0.0,
    }
    if args.mode == "known":
        summary["kStar"] = analytic.optimal_k(model)
        summary["successProb"] = analytic.success_prob(model, summary["kStar"])
    if 1 <= a and 2 * a <= N:
        summary["bound16mStar"] = 16 * analytic.critical_m(model)
    if args.mode == "classical":
        summary["expectedQueries"] = (N + 1) / (a + 1) if a else float(N)
    config = {"n": args.n, "marked": marked, "mode": args.mode, "lam": args.lam, "trials": args.trials}
    if args.mode == "counting":
        config["t"] = t
    return Report("search", args.seed, config, rows, summary, json_rows=outcomes)


def cmd_curve(args) -> Report:
    marked = _marked_set(args)
    model = analytic.make_model(args.n, len(marked))
    kmax = args.kmax
    if kmax is None:
        kmax = max(10, 3 * analytic.optimal_k(model)) if model.a else 10
    oracle = sv.OracleSpec(args.n, marked)
    state = sv.uniform_state(args.n)
    rows = []
    for k in range(kmax + 1):
        if k:
            state = sv.apply_grover_iteration(state, oracle)
        closed = analytic.success_prob(model, k)
        sim = sv.project_marked_mass(state, oracle)
        rows.append({"k": k, "closedForm": closed, "simulated": sim, "absDiff": abs(closed - sim)})
    max_diff = max(r["absDiff"] for r in rows)
    peak = max(rows, key=lambda r: r["closedForm"])["k"]
    if args.dump_state:
        with open(args.dump_state, "w") as fh:
            fh.write(sv.dump_state(state))
    summary = {"maxAbsDiff": max_diff, "peakK": peak, "tolerance": 1e-9}
    config = {"n": args.n, "marked": marked, "kmax": kmax}
    return Report("curve", args.seed, config, rows, summary, failed=max_diff > 1e-9)


def _count_trial(i: int, *, n: int, marked: list[int], t: int, seed: int, method: str) -> dict:
    oracle = sv.OracleSpec(n, marked)
    est = count.count_marked(oracle, t, trial_rng(seed, i), method=method)
    a = len(marked)
    return {"n": n, "a": a, "t": t, "y": est.y, "aTilde": est.a_tilde, "absErr": abs(est.a_tilde - a)}


def cmd_count(args) -> Report:
    marked = _marked_set(args)
    a, N = len(marked), 1 << args.n
    if args.method == "full" and args.n + args.t > sv.MAX_QUBITS:
        raise UsageError(f"full method needs n + t <= {sv.MAX_QUBITS}")
    fn = partial(_count_trial, n=args.n, marked=marked, t=args.t, seed=args.seed, method=args.method)
    rows = _map_trials(fn, args.trials, args.workers)
    errs = [r["absErr"] for r in rows]
    summary = {
        "trials": args.trials,
        "medianAbsErr": statistics.median(errs) if errs else 0.0,
        "meanAbsErr": statistics.fmean(errs) if errs else 0.0,
        "successFloor": count.SUCCESS_FLOOR,
    }
    if 0 < a < N:
        theta = math.asin(math.sqrt(a / N))
        probs = count.fast_distribution(theta, args.t)
        summary["exactConcentration"] = count.concentration_mass(probs, theta, args.t)
    config = {"n": args.n, "marked": marked, "t": args.t, "method": args.method, "trials": args.trials}
    return Report("count", args.seed, config, rows, summary)


def _amplify_trial(i: int, *, n: int, good: list[int], u_seed: int, mode: str, seed: int, lam: float) -> dict:
    amp = make_amplifier(haar_unitary(1 << n, u_seed), good)
    rng = trial_rng(seed, i)
    out = amplify_known(amp, rng) if mode == "known" else amplify_unknown(amp, SearchParams(lam=lam), rng)
    return {"trial": i, "found": "" if out.found is None else out.found, "success": out.success,
            "iterations": out.iterations, "invocations": out.invocations}


def cmd_amplify(args) -> Report:
    SearchParams(lam=args.lam)
    N = 1 << args.n
    if args.n > 10:
        raise UsageError("amplify uses explicit matrices: --n must be at most 10")
    try:
        good = sorted({int(x) for x in args.good.split(",") if x.strip()})
    except ValueError:
        raise UsageError("--good takes a comma-separated list of indices")
    if any(not 0 <= x < N for x in good):
        raise UsageError(f"--good indices must lie in [0, {N})")
    amp = make_amplifier(haar_unitary(N, args.u_seed), good)
    if args.mode == "known" and amp.p == 0:
        raise UsageError("good set has zero amplitude under U")
    fn = partial(_amplify_trial, n=args.n, good=good, u_seed=args.u_seed, mode=args.mode,
                 seed=args.seed, lam=args.lam)
    rows = _map_trials(fn, args.trials, args.workers)
    summary = {
        "p": amp.p,
        "successRate": sum(r["success"] for r in rows) / max(1, len(rows)),
        "meanIterations": statistics.fmean(r["iterations"] for r in rows) if rows else 0.0,
        "meanInvocations": statistics.fmean(r["invocations"] for r in rows) if rows else 0.0,
    }
    if args.mode == "known":
        summary["successBound"] = 1 - amp.p
    elif 0 < amp.p < 1:
        summary["bound16mStar"] = 16 / math.sin(2 * amp.theta)
    config = {"n": args.n, "good": good, "uSeed": args.u_seed, "mode": args.mode, "trials": args.trials}
    return Report("amplify", args.seed, config, rows, summary)


def _lowerbound_row(job: tuple[int, int], *, n: int, m: int, seed: int) -> dict:
    k, i = job
    alg_seed = derived_seed(seed, k, i)
    alg = lowerbound.random_algorithm(n, m, k, np.random.default_rng(alg_seed))
    rep = lowerbound.verify_algorithm(alg)
    return {"n": n, "m": m, "k": k, "seed": alg_seed, "sumD": rep.sum_bound.sum_d,
            "bound": rep.sum_bound.bound, "minD": rep.sum_bound.min_d,
            "avgAdv": rep.advantage.advantage, "advBound": rep.advantage.bound,
            "allClaimsPass": rep.ok}


def cmd_lowerbound(args) -> Report:
    m = args.m if args.m is not None else args.n + 1
    if not 1 <= args.n <= m <= lowerbound.MAX_QUBITS:
        raise UsageError(f"need 1 <= n <= m <= {lowerbound.MAX_QUBITS}")
    jobs = [(k, i) for k in args.k for i in range(args.algs)]
    fn = partial(_lowerbound_row, n=args.n, m=m, seed=args.seed)
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(fn, jobs))
    else:
        rows = [fn(job) for job in jobs]
    passed = all(r["allClaimsPass"] for r in rows)
    summary = {"rows": len(rows), "allClaimsPass": passed}
    config = {"n": args.n, "m": m, "k": args.k, "algs": args.algs}
    return Report("lowerbound", args.seed, config, rows, summary, failed=not passed)


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render(report: Report, fmt: str) -> str:
    columns = COLUMNS[report.command]
    if fmt == "json":
        doc = {
            "tool": "groverlab",
            "version": __version__,
            "command": report.command,
            "seed": report.seed,
            "config": report.config,
            "columns": columns,
            "rows": report.json_rows if report.json_rows is not None else report.rows,
            "summary": report.summary,
        }
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    buf.write(f"# groverlab {__version__} {report.command} seed={report.seed}\n")
    buf.write(f"# config {json.dumps(report.config, sort_keys=True)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in report.rows:
        writer.writerow([_fmt(row[c]) for c in columns])
    for key, value in report.summary.items():
        buf.write(f"# {key}={_fmt(value)}\n")
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=_nonneg_int, default=0, help="master seed")
    common.add_argument("--trials", type=_nonneg_int, default=100)
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--workers", type=_pos_int, default=1, help="worker processes")

    marked = _Parser(add_help=False)
    marked.add_argument("--n", type=_pos_int, required=True, help="oracle qubits")
    group = marked.add_mutually_exclusive_group()
    group.add_argument("--a", type=_nonneg_int, help="number of marked items (seeded random set)")
    group.add_argument("--marked", help="file with marked indices (JSON list or whitespace separated)")

    parser = _Parser(prog="groverlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"groverlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("search", parents=[common, marked], help="run search trials")
    p.add_argument("--mode", choices=["known", "unknown", "classical", "counting"], default="known")
    p.add_argument("--lam", type=float, default=6 / 5, help="schedule growth factor in (1, 4/3)")
    p.add_argument("--t", type=_pos_int, default=None, help="precision qubits for --mode counting")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("curve", parents=[common, marked], help="success probability vs iterations")
    p.add_argument("--kmax", type=_nonneg_int, default=None)
    p.add_argument("--dump-state", default=None, help="write the final state as JSON [re, im] pairs")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("count", parents=[common, marked], help="quantum counting sweep")
    p.add_argument("--t", type=_pos_int, required=True, help="precision qubits")
    p.add_argument("--method", choices=["fast", "full"], default="fast")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("amplify", parents=[common], help="amplitude amplification with a Haar-random U")
    p.add_argument("--n", type=_pos_int, required=True)
    p.add_argument("--good", required=True, help="comma-separated good indices")
    p.add_argument("--u-seed", type=_nonneg_int, default=0, help="seed of the random U")
    p.add_argument("--mode", choices=["known", "unknown"], default="known")
    p.add_argument("--lam", type=float, default=6 / 5)
    p.set_defaults(func=cmd_amplify)

    p = sub.add_parser("lowerbound", parents=[common], help="hybrid-argument verification suite")
    p.add_argument("--n", type=_pos_int, default=4)
    p.add_argument("--m", type=_pos_int, default=None, help="total qubits (default n + 1)")
    p.add_argument("--k", type=_k_range, default=_k_range("1..8"), help="query counts, e.g. 1..8")
    p.add_argument("--algs", type=_pos_int, default=20, help="random algorithms per k")
    p.set_defaults(func=cmd_lowerbound)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"groverlab {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InvariantViolation, NormDriftError) as exc:
        print(f"groverlab {args.command}: invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    text = render(report, args.format)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_INVARIANT if report.failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
