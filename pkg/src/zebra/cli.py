"""Command-line frontend.

Every subcommand prints one JSON report on stdout (``region trace`` prints
CSV unless ``--out`` is given). Exit codes: 0 success, 1 the query was
answered negatively, 2 bad input, 3 a size or search budget was exceeded.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import closed_form as cf
from . import verify
from .capacity import capacity_lower_bound
from .entropy_region import boundary_trace_2user, entropy_region, region_membership
from .errors import LimitExceeded, RetriesExhausted, ZebraError
from .graph import ConfusionGraph, clique_partition
from .graph_io import graph_to_dict, parse_graph
from .oracle import MessageVector, frontier, is_feasible
from .random_coder import build_scheme, decode

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3

RANDOMIZED = {"random-code", "verify-lemmas"}
CLOSED_FORM_CASES = (
    "two-edge",
    "crossed-edges",
    "edge-vs-empty",
    "perfect-receiver",
    "complement-receiver",
)


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"expected comma-separated integers, got {text!r}") from None


def _floats(text: str) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"expected comma-separated numbers, got {text!r}") from None
    if any(not math.isfinite(v) for v in vals):
        raise InputError("rates must be finite")
    return vals


def _budget() -> Optional[int]:
    env = os.environ.get("BR_BUDGET")
    if env is None:
        return None
    try:
        return int(env)
    except ValueError:
        raise InputError(f"BR_BUDGET must be an integer, got {env!r}") from None


class _Context:
    """Loads graph files and accumulates the input digest."""

    def __init__(self, args):
        self.zero_based = args.zero_based
        self.digest = hashlib.sha256()
        self.digest.update(json.dumps(args.argv).encode())

    def graph(self, path: str) -> ConfusionGraph:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc.strerror}") from None
        self.digest.update(text.encode())
        return parse_graph(text, self.zero_based)

    def graphs(self, paths: Sequence[str]) -> list[ConfusionGraph]:
        gs = [self.graph(p) for p in paths]
        if len({g.k for g in gs}) > 1:
            raise InputError("all graphs must share one alphabet")
        return gs


# -- subcommands ---------------------------------------------------------------


def cmd_capacity(args, ctx):
    g = ctx.graph(args.graph)
    cb = capacity_lower_bound(g, args.power, max_nodes=_budget())
    out = cb.to_dict()
    out["graph"] = graph_to_dict(g, ctx.zero_based)
    out["log2_lower_bound"] = math.log2(cb.lower_bound)
    return EXIT_OK, out


def cmd_region_check(args, ctx):
    gs = ctx.graphs(args.graphs)
    rates = _floats(args.rates)
    if len(rates) != len(gs):
        raise InputError(f"{len(rates)} rates for {len(gs)} users")
    parts = [clique_partition(g) for g in gs]
    cert = region_membership(parts, rates, restarts=args.restarts)
    return (EXIT_OK if cert.feasible else EXIT_NEGATIVE), cert.to_dict()


def _grid(stop: float, step: float) -> list[float]:
    if step <= 0:
        raise InputError("grid step must be positive")
    count = int(math.floor(stop / step + 1e-9))
    pts = [round(i * step, 12) for i in range(count + 1)]
    if stop - pts[-1] > 1e-12:
        pts.append(stop)
    return pts


def cmd_region_trace(args, ctx):
    g1, g2 = ctx.graphs([args.g1, args.g2])
    parts = [clique_partition(g1), clique_partition(g2)]
    r1_max, _ = entropy_region(tuple(parts)).max_rate(1, [0.0, 0.0])
    rows = boundary_trace_2user(parts, _grid(r1_max, args.grid))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["R1", "R2_max"])
    for r1, r2 in rows:
        writer.writerow([repr(r1), "" if r2 is None else repr(r2)])
    if args.out is None:
        return EXIT_OK, buf.getvalue()
    Path(args.out).write_text(buf.getvalue(), encoding="utf-8")
    return EXIT_OK, {"out": args.out, "rows": len(rows), "r1_max": r1_max}


# second receiver's single-user capacity as a function of (k, d)
RECEIVER_CASES = {
    "perfect-receiver": (cf.perfect_receiver_boundary, lambda k, d: k),
    "complement-receiver": (cf.complement_receiver_boundary, lambda k, d: k - d + 1),
}


def _closed_form_boundary(args, ctx):
    """(max R2 as a function of R1, largest R1, description)."""
    case = args.case
    if case in RECEIVER_CASES:
        if args.k is None or args.d is None:
            raise InputError(f"--case {case} needs --k and --d")
        k, d = args.k, args.d
        pair_fn, second_cap = RECEIVER_CASES[case]
        try:
            pair_fn(0.0, d, k)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        cap2 = second_cap(k, d)
        return (lambda r1: cf.time_sharing_bound(r1, d, cap2)), math.log2(d), {"k": k, "d": d}
    if case == "two-edge":
        if args.g2 is None:
            raise InputError("--case two-edge needs --g2")
        g2 = ctx.graph(args.g2)
        if g2.k != 3:
            raise InputError("the second graph must be on three letters")
        return (lambda r1: cf.two_edge_max_r2(r1, g2)), 1.0, {"g2": graph_to_dict(g2, ctx.zero_based)}
    fn = cf.crossed_edges_max_r2 if case == "crossed-edges" else cf.edge_vs_empty_max_r2
    return fn, 1.0, {}


def cmd_region_closed_form(args, ctx):
    fn, r1_max, params = _closed_form_boundary(args, ctx)
    out: dict = {"case": args.case, **params}
    if args.case in RECEIVER_CASES and args.alpha is not None:
        pair_fn, _ = RECEIVER_CASES[args.case]
        try:
            out["pair"] = list(pair_fn(args.alpha, args.d, args.k))
        except ValueError as exc:
            raise InputError(str(exc)) from None
        out["alpha"] = args.alpha
    if args.rates is not None:
        rates = _floats(args.rates)
        if len(rates) != 2:
            raise InputError("closed-form regions have two users")
        bound = fn(rates[0]) if rates[0] >= 0 else -math.inf
        member = rates[1] >= 0 and rates[1] <= bound + cf.TOL
        out.update(rates=rates, max_r2=None if bound == -math.inf else bound, member=member)
        return (EXIT_OK if member else EXIT_NEGATIVE), out
    if args.r1 is not None:
        bound = fn(args.r1)
        out.update(r1=args.r1, max_r2=None if bound == -math.inf else bound)
        return (EXIT_OK if bound != -math.inf else EXIT_NEGATIVE), out
    if "pair" not in out:
        out["boundary"] = [[r1, fn(r1)] for r1 in _grid(r1_max, args.grid)]
    return EXIT_OK, out


def cmd_scheme_search(args, ctx):
    gs = ctx.graphs(args.graphs)
    counts = _ints(args.counts)
    if len(counts) != len(gs):
        raise InputError(f"{len(counts)} counts for {len(gs)} users")
    res = is_feasible(gs, MessageVector(tuple(counts), args.n), max_nodes=_budget())
    return (EXIT_OK if res.feasible else EXIT_NEGATIVE), res.to_dict(ctx.zero_based)


def cmd_scheme_frontier(args, ctx):
    gs = ctx.graphs([args.g1, args.g2])
    pts = frontier(gs, args.n, max_nodes=_budget())
    return EXIT_OK, {
        "n": args.n,
        "frontier": [list(mv.counts) for mv in pts],
        "rates": [list(mv.rates()) for mv in pts],
    }


def cmd_random_code(args, ctx):
    gs = ctx.graphs(args.graphs)
    comp, counts = _ints(args.composition), _ints(args.counts)
    if len(counts) != len(gs):
        raise InputError(f"{len(counts)} counts for {len(gs)} users")
    parts = [clique_partition(g) for g in gs]
    try:
        code = build_scheme(parts, comp, counts, seed=args.seed, max_retries=args.retries)
    except RetriesExhausted as exc:
        failures = sorted(exc.failures.items(), key=lambda kv: (-kv[1], kv[0]))
        return EXIT_NEGATIVE, {
            "valid": False,
            "attempts": exc.attempts,
            "reason": str(exc),
            "unserved": [{"tuple": list(t), "failures": c} for t, c in failures],
        }
    # every tuple must survive a decode of what each user observes
    round_trip = all(
        decode(code.families, i + 1, cp.observe(w)) == t[i]
        for t, w in code.witnesses.items()
        for i, cp in enumerate(parts)
    )
    out = code.to_dict(ctx.zero_based)
    out.update(valid=True, round_trip=round_trip)
    return (EXIT_OK if round_trip else EXIT_NEGATIVE), out


def cmd_verify_lemmas(args, ctx):
    report = verify.run_all(trials=args.trials, seed=args.seed)
    return (EXIT_OK if report["passed"] else EXIT_NEGATIVE), report


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    # global options are accepted before or after the subcommand
    common = _Parser(add_help=False)
    common.add_argument("--zero-based", action="store_true", default=argparse.SUPPRESS,
                        help="letters are written 0..k-1 in graph files and reports")
    common.add_argument("--report", default=argparse.SUPPRESS,
                        help="also write the JSON report to this file")
    p = _Parser(prog="zebra", description="Zero-error broadcast rate regions.", parents=[common])
    p.set_defaults(zero_based=False, report=None)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, parent=sub, **kw):
        return parent.add_parser(name, parents=[common], **kw)

    c = add("capacity", help="independence number of a strong power")
    c.add_argument("graph")
    c.add_argument("--power", type=int, default=1)
    c.set_defaults(func=cmd_capacity)

    region = add("region", help="rate-region queries")
    rsub = region.add_subparsers(dest="action", required=True, parser_class=_Parser)
    r = add("check", rsub, help="membership of a rate vector")
    r.add_argument("graphs", nargs="+")
    r.add_argument("--rates", required=True)
    r.add_argument("--restarts", type=int, default=8)
    r.set_defaults(func=cmd_region_check)
    r = add("trace", rsub, help="two-user boundary as CSV")
    r.add_argument("g1")
    r.add_argument("g2")
    r.add_argument("--grid", type=float, default=0.01)
    r.add_argument("--out")
    r.set_defaults(func=cmd_region_trace)
    r = add("closed-form", rsub, help="evaluate a closed-form boundary")
    r.add_argument("--case", required=True, choices=CLOSED_FORM_CASES)
    r.add_argument("--rates")
    r.add_argument("--r1", type=float)
    r.add_argument("--alpha", type=float)
    r.add_argument("--k", type=int)
    r.add_argument("--d", type=int)
    r.add_argument("--g2")
    r.add_argument("--grid", type=float, default=0.05)
    r.set_defaults(func=cmd_region_closed_form)

    scheme = add("scheme", help="exhaustive scheme search")
    ssub = scheme.add_subparsers(dest="action", required=True, parser_class=_Parser)
    s = add("search", ssub, help="is a message-count vector achievable")
    s.add_argument("graphs", nargs="+")
    s.add_argument("--counts", required=True)
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(func=cmd_scheme_search)
    s = add("frontier", ssub, help="Pareto-maximal count pairs")
    s.add_argument("g1")
    s.add_argument("g2")
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(func=cmd_scheme_frontier)

    rc = add("random-code", help="random family code over a type class")
    rc.add_argument("graphs", nargs="+")
    rc.add_argument("--composition", required=True)
    rc.add_argument("--counts", required=True)
    rc.add_argument("--seed", type=int)
    rc.add_argument("--retries", type=int, default=50)
    rc.set_defaults(func=cmd_random_code)

    v = add("verify-lemmas", help="randomized inequality suites")
    v.add_argument("--trials", type=int, default=1000)
    v.add_argument("--seed", type=int)
    v.set_defaults(func=cmd_verify_lemmas)
    return p


def _command_name(args) -> str:
    action = getattr(args, "action", None)
    return args.command if action is None else f"{args.command} {action}"


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_json_default)


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, (tuple, frozenset, set)):
        return list(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> tuple[int, dict]:
    """Execute one command; returns ``(exit code, report)`` and prints it."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    start = time.perf_counter()
    report: dict = {"command": None, "seed": None}
    args = None
    try:
        args = build_parser().parse_args(argv)
        args.argv = argv
        report["command"] = _command_name(args)
        if args.command in RANDOMIZED:
            if args.seed is None:
                if os.environ.get("CI"):
                    raise InputError(f"--seed is required for {args.command} in CI mode")
                args.seed = 0
            report["seed"] = args.seed
        ctx = _Context(args)
        code, result = args.func(args, ctx)
        report["inputs_digest"] = ctx.digest.hexdigest()
        report["letters"] = "zero-based" if args.zero_based else "one-based"
    except InputError as exc:
        code, result = EXIT_INPUT, {"error": "InputError", "message": str(exc)}
    except LimitExceeded as exc:
        code, result = EXIT_BUDGET, {"error": type(exc).__name__, "message": str(exc)}
    except (ZebraError, ValueError) as exc:
        code, result = EXIT_INPUT, {"error": type(exc).__name__, "message": str(exc)}
    report["exit_code"] = code
    report["wall_time"] = time.perf_counter() - start
    if isinstance(result, str):
        stdout.write(result)
        report["result"] = {"csv": result}
        return code, report
    report["result"] = result
    text = _dumps(report)
    stdout.write(text + "\n")
    if "error" in result:
        stderr.write(f"zebra: {result['error']}: {result['message']}\n")
    if args is not None and args.report:
        Path(args.report).write_text(text + "\n", encoding="utf-8")
    return code, report


def payload_bytes(report: dict) -> bytes:
    """Serialized result payload; identical argv and seed give identical bytes."""
    return _dumps(report["result"]).encode()


def main(argv: Optional[Sequence[str]] = None) -> int:
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
