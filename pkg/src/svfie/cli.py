"""Command-line interface.

    svfie solve    --problem example1 --m 32 --seed 1
    svfie mc       --problem example2 --m 64 --paths 1000 --seed 7
    svfie converge --problem example2_det --m 8..128
    svfie compare  --problem example1 --m 32 --seed 1
    svfie bound    --C 1 --m 2

Exit status: 0 success, 1 usage error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict

import numpy as np

from svfie import __version__
from svfie.analysis import DEFAULT_PROBES, MonteCarloError, convergence_rate, gronwall_bound, l2_error, monte_carlo
from svfie.basis import Resolution
from svfie.problems import RegularityConstants, registry_get, registry_names
from svfie.solver import SingularSystemError, assemble, solve, solve_bpf
from svfie.stochastic import SeedPlan, brownian_path, zero_path

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2
DEFAULT_PROBLEM = "example1"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return f"{float(x):.10g}"


def _json_value(x):
    if isinstance(x, str) or x is None:
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    x = float(f"{float(x):.10g}")
    return x if np.isfinite(x) else str(x)


def parse_ms(text: str) -> list[int]:
    """``"32"``, ``"8,16,32"`` or a doubling range ``"8..128"``."""
    try:
        if ".." in text:
            lo, hi = (int(p) for p in text.split(".."))
            if lo > hi:
                raise UsageError(f"empty m range {text!r}")
            ms = []
            m = lo
            while m <= hi:
                ms.append(m)
                m *= 2
        else:
            ms = [int(p) for p in text.split(",")]
    except ValueError:
        raise UsageError(f"cannot parse --m {text!r}") from None
    for m in ms:
        try:
            Resolution(m)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    return ms


def parse_probes(text: str) -> tuple[float, ...]:
    try:
        probes = tuple(float(p) for p in text.split(","))
    except ValueError:
        raise UsageError(f"cannot parse --probes {text!r}") from None
    if not all(0.0 <= p < 1.0 for p in probes):
        raise UsageError("probes must lie in [0, 1)")
    return probes


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument(
        "--problem", default=None,
        help=f"one of: {', '.join(registry_names())} (default {DEFAULT_PROBLEM}; bound uses none)",
    )
    common.add_argument("--m", default="32", help="resolution (power of two); converge takes a range like 8..128")
    common.add_argument("--seed", type=int, default=0, help="path seed (solve, compare) or master seed (mc)")
    common.add_argument("--paths", type=int, default=1000, help="Monte Carlo path count")
    common.add_argument("--probes", default=",".join(str(p) for p in DEFAULT_PROBES))
    common.add_argument("--order", type=int, default=5, help="Gauss-Legendre order per cell")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", default="-", help="output file, '-' for stdout")

    parser = _Parser(prog="svfie", description="Walsh operational-matrix solver for linear SVFIEs")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("solve", parents=[common], help="solve for one seeded path")
    sub.add_parser("mc", parents=[common], help="Monte Carlo ensemble statistics")
    sub.add_parser("converge", parents=[common], help="L2 convergence against the exact solution")
    sub.add_parser("compare", parents=[common], help="Walsh vs block-pulse solutions on one path")
    bound = sub.add_parser("bound", parents=[common], help="Gronwall mean-square error bound")
    for name in ("C", "L", "L1", "L2", "rho", "rho1", "rho2", "sigma"):
        bound.add_argument(f"--{name}", type=float, default=None)
    bound.add_argument("--alpha", type=float, default=None)
    bound.add_argument("--beta", type=float, default=None)
    bound.add_argument("--h", type=float, default=None, help="cell width; defaults to 1/m")
    return parser


def _single_m(args) -> int:
    ms = parse_ms(args.m)
    if len(ms) != 1:
        raise UsageError(f"{args.command} takes a single --m, got {args.m!r}")
    return ms[0]


def _problem(args):
    try:
        return registry_get(args.problem or DEFAULT_PROBLEM)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None


def _path_for(problem, m, seed):
    return brownian_path(seed, m) if problem.is_stochastic else zero_path(m)


def cmd_solve(args):
    problem = _problem(args)
    m = _single_m(args)
    probes = parse_probes(args.probes)
    path = _path_for(problem, m, args.seed)
    result = solve(assemble(problem, m, path, args.order))
    grid = Resolution(m).midpoints()
    rows = [("grid", t, x) for t, x in zip(grid, result(grid))]
    rows += [("probe", t, result(t)) for t in probes]
    return ["kind", "t", "x"], rows


def cmd_mc(args):
    problem = _problem(args)
    m = _single_m(args)
    if args.paths < 1:
        raise UsageError("--paths must be >= 1")
    summary = monte_carlo(
        problem, m, args.paths, SeedPlan(args.seed), parse_probes(args.probes), args.order, args.workers
    )
    rows = [
        (t, mu, sd, se, summary.n_paths, summary.m, summary.master_seed)
        for t, mu, sd, se in zip(summary.probes, summary.mean, summary.std, summary.stderr)
    ]
    return ["t", "mean", "std", "stderr", "n_paths", "m", "seed"], rows


def cmd_converge(args):
    problem = _problem(args)
    if problem.exact_deterministic is None or problem.is_stochastic:
        raise UsageError(f"converge needs a deterministic problem with an exact solution, got {problem.name!r}")
    ms = parse_ms(args.m)
    if len(ms) < 3:
        raise UsageError("converge needs at least three resolutions")
    rows, pairs = [], []
    for m in ms:
        report = l2_error(solve(assemble(problem, m, None, args.order)), problem.exact_deterministic)
        pairs.append((m, report.l2_error))
        # least-squares rate over all resolutions so far
        rate = fmt(convergence_rate(pairs)) if len(pairs) >= 3 else ""
        rows.append((m, report.l2_error, report.max_error, rate))
    return ["m", "l2_error", "max_error", "rate"], rows


def cmd_compare(args):
    problem = _problem(args)
    m = _single_m(args)
    path = _path_for(problem, m, args.seed)
    wfm = solve(assemble(problem, m, path, args.order))
    bpf = solve_bpf(problem, m, path, args.order)
    max_disc = float(np.max(np.abs(wfm.cell_values() - bpf.cell_values())))
    rows = []
    for t in parse_probes(args.probes):
        a, b = wfm(t), bpf(t)
        rows.append((t, a, b, abs(a - b), max_disc))
    return ["t", "wfm", "bpf", "abs_diff", "max_discrepancy"], rows


def cmd_bound(args):
    base = RegularityConstants()
    alpha, beta = 0.0, 1.0
    if args.problem is not None:
        problem = _problem(args)
        if problem.constants is not None:
            base = problem.constants
        alpha, beta = problem.alpha, problem.beta
    values = asdict(base)
    for name in values:
        given = getattr(args, name)
        if given is not None:
            values[name] = given
    try:
        rc = RegularityConstants(**values)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    alpha = args.alpha if args.alpha is not None else alpha
    beta = args.beta if args.beta is not None else beta
    h = args.h if args.h is not None else 1.0 / _single_m(args)
    try:
        gb = gronwall_bound(rc, alpha, beta, h)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return ["R1", "R2", "bound", "h"], [(gb.R1, gb.R2, gb.bound, h)]


COMMANDS = {
    "solve": cmd_solve,
    "mc": cmd_mc,
    "converge": cmd_converge,
    "compare": cmd_compare,
    "bound": cmd_bound,
}


def render(args, header, rows) -> str:
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows([fmt(v) for v in row] for row in rows)
        return buf.getvalue()
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "format")}
    report = {
        "meta": {"version": __version__, "config": config},
        "columns": list(header),
        "rows": [{h: _json_value(v) for h, v in zip(header, row)} for row in rows],
    }
    return json.dumps(report, indent=2, sort_keys=False) + "\n"


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        header, rows = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"svfie: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SingularSystemError, np.linalg.LinAlgError) as exc:
        print(f"svfie: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except MonteCarloError as exc:
        if not isinstance(exc.__cause__, np.linalg.LinAlgError):
            raise
        print(f"svfie: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    text = render(args, header, rows)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
