"""Command-line front end: solve, benchmark, eval.

Exit codes: 0 success, 1 usage/argument error, 2 solver failure, 3 I/O
failure.  The seed falls back to the RPNN_SEED environment variable when
--seed is not given.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time

import numpy as np

from .errors import NumericError, StepUnderflowError
from .integrators import StepControl, dp45_solve, sdirk_solve
from .metrics import (
    METHODS,
    ErrorMetrics,
    RunReport,
    TimingSummary,
    report_to_dict,
    run_benchmark,
)
from .problems import BENCHMARK_NAMES, make_benchmark
from .serialize import SolutionFormatError, load_solution, save_solution
from .solver import SolverConfig, solve_adaptive

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_SOLVER = 2
EXIT_IO = 3


def _fmt(value: float) -> str:
    """Shortest decimal form that parses back to the same double."""
    return repr(float(value))


def _default_seed() -> int:
    return int(os.environ.get("RPNN_SEED", "0"))


def _parse_points(text: str) -> np.ndarray:
    try:
        pts = np.array([float(tok) for tok in text.split(",") if tok.strip() != ""])
    except ValueError as exc:
        raise ValueError(f"could not parse --points: {exc}") from exc
    if len(pts) == 0:
        raise ValueError("--points is empty")
    return pts


def _build_problem(args):
    params = {}
    if args.mu is not None:
        params["mu"] = args.mu
    if args.lam is not None:
        params["lam"] = args.lam
    return make_benchmark(args.problem, **params)


def _output_grid(args, x0: float, x_end: float) -> np.ndarray:
    if args.points is not None:
        pts = _parse_points(args.points)
        if pts.min() < x0 or pts.max() > x_end:
            raise ValueError(f"requested points leave the domain [{x0}, {x_end}]")
        return pts
    return np.linspace(x0, x_end, args.grid_size)


def _write_table(path, grid: np.ndarray, values: np.ndarray, fmt: str) -> None:
    m = values.shape[1]
    if fmt == "json":
        payload = {
            "schema_version": 1,
            "columns": ["t"] + [f"y{i + 1}" for i in range(m)],
            "rows": [[float(t)] + [float(v) for v in row] for t, row in zip(grid, values)],
        }
        text = json.dumps(payload) + "\n"
        if path is None:
            sys.stdout.write(text)
        else:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
        return
    rows = ([_fmt(t)] + [_fmt(v) for v in row] for t, row in zip(grid, values))
    if path is None:
        writer = csv.writer(sys.stdout)
        writer.writerow(["t"] + [f"y{i + 1}" for i in range(m)])
        writer.writerows(rows)
    else:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t"] + [f"y{i + 1}" for i in range(m)])
            writer.writerows(rows)


def _cmd_solve(args) -> int:
    problem = _build_problem(args)
    grid = _output_grid(args, problem.x0, problem.x_end)
    if args.save_solution and args.method != "rpnn":
        raise ValueError("--save-solution only applies to --method rpnn")

    times = []
    evaluable = n_points = n_segments = None
    failure = None
    for rep in range(max(1, args.repeats)):
        start = time.perf_counter()
        try:
            if args.method == "rpnn":
                sol = solve_adaptive(problem, SolverConfig(tol=args.tol, seed=args.seed))
                evaluable, n_points, n_segments = sol, sol.total_points, sol.n_segments
            else:
                ctrl = StepControl(abs_tol=args.tol, rel_tol=args.tol)
                traj = dp45_solve(problem, ctrl) if args.method == "dp45" else sdirk_solve(problem, ctrl)
                evaluable, n_points, n_segments = traj, len(traj.abscissae), traj.n_steps
        except (StepUnderflowError, NumericError) as exc:
            failure = exc
            break
        times.append(time.perf_counter() - start)

    if failure is not None:
        if args.report:
            report = RunReport(problem.name, dict(problem.params), args.method, args.tol,
                               args.seed, None, 0, 0, TimingSummary(0.0, 0.0, 0.0, 0),
                               "error", str(failure))
            _dump_json(args.report, report_to_dict(report))
        print(f"error: solver failed: {failure}", file=sys.stderr)
        return EXIT_SOLVER

    values = evaluable(grid)
    if args.out:
        _write_table(args.out, grid, values, args.format)
    if args.save_solution:
        save_solution(evaluable, args.save_solution)
    if args.report:
        metrics = None
        if problem.analytic is not None:
            diff = values - problem.analytic(grid)
            metrics = ErrorMetrics(
                l2=np.sqrt((diff**2).sum(axis=0)),
                linf=np.abs(diff).max(axis=0),
                mae=np.abs(diff).mean(axis=0),
                grid_size=len(grid),
            )
        report = RunReport(
            problem.name, dict(problem.params), args.method, args.tol, args.seed,
            metrics, n_points, n_segments,
            TimingSummary(float(np.median(times)), float(min(times)), float(max(times)), len(times)),
        )
        _dump_json(args.report, report_to_dict(report))
    return EXIT_OK


def _parse_suite(text: str) -> list[str]:
    names = [tok.strip() for tok in text.split(",") if tok.strip()]
    if not names:
        raise ValueError("empty --suite selection")
    if "all" in names:
        return list(BENCHMARK_NAMES)
    aliases = {"pr": "prothero_robinson", "vdp": "van_der_pol"}
    resolved = [aliases.get(name, name) for name in names]
    unknown = [name for name in resolved if name not in BENCHMARK_NAMES]
    if unknown:
        raise ValueError(f"unknown suite entries: {unknown}")
    return resolved


def _cmd_benchmark(args) -> int:
    suite = _parse_suite(args.suite)
    mu_values = [float(tok) for tok in str(args.mu).split(",")] if args.mu else [100.0]
    problems = []
    for name in suite:
        if name == "van_der_pol":
            problems.extend(make_benchmark(name, mu=mu) for mu in mu_values)
        elif name == "prothero_robinson":
            problems.append(make_benchmark(name, lam=args.lam if args.lam is not None else -1e5))
        else:
            problems.append(make_benchmark(name))
    grid_sizes = {name: args.grid_size for name in suite} if args.grid_size else None
    reports = run_benchmark(
        problems, tol=args.tol, seed=args.seed, repeats=args.repeats, grid_sizes=grid_sizes
    )
    os.makedirs(args.report_dir, exist_ok=True)
    for report in reports:
        mu_tag = ""
        if report.problem == "van_der_pol":
            mu_tag = f"_mu{report.params.get('mu'):g}"
        path = os.path.join(
            args.report_dir, f"report_{report.problem}{mu_tag}_{report.method}_{report.tol:g}.json"
        )
        _dump_json(path, report_to_dict(report))
    _write_summary_csv(args.out, reports)
    ok = sum(r.status == "ok" for r in reports)
    print(f"benchmark: {ok}/{len(reports)} cells succeeded; summary in {args.out}")
    return EXIT_OK if ok else EXIT_SOLVER


def _write_summary_csv(path, reports: list[RunReport]) -> None:
    max_m = max((len(r.metrics.l2) for r in reports if r.metrics is not None), default=0)
    header = ["problem", "params", "method", "tol", "seed", "status",
              "n_points", "n_segments", "time_median", "time_min", "time_max"]
    for i in range(max_m):
        header += [f"l2_y{i + 1}", f"linf_y{i + 1}", f"mae_y{i + 1}"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for r in reports:
            params = ";".join(f"{k}={v:g}" for k, v in sorted(r.params.items()))
            row = [r.problem, params, r.method, _fmt(r.tol), r.seed, r.status,
                   r.n_points, r.n_segments,
                   _fmt(r.times.median), _fmt(r.times.min), _fmt(r.times.max)]
            for i in range(max_m):
                if r.metrics is not None and i < len(r.metrics.l2):
                    row += [_fmt(r.metrics.l2[i]), _fmt(r.metrics.linf[i]), _fmt(r.metrics.mae[i])]
                else:
                    row += ["", "", ""]
            writer.writerow(row)


def _cmd_eval(args) -> int:
    sol = load_solution(args.solution)
    grid = _output_grid(args, sol.x0, sol.x_end)
    values = sol(grid)
    _write_table(args.out, grid, values, args.format)
    return EXIT_OK


def _dump_json(path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rpnn-ode",
        description="Random-projection RBF collocation solver for stiff ODE initial-value problems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve one problem and write trajectory/report files")
    solve.add_argument("--problem", required=True,
                       help="prothero_robinson|pr, van_der_pol|vdp, rober, hires")
    solve.add_argument("--mu", type=float, default=None, help="van der Pol stiffness parameter")
    solve.add_argument("--lambda", dest="lam", type=float, default=None,
                       help="Prothero-Robinson stiffness parameter (negative)")
    solve.add_argument("--tol", type=float, default=1e-6, help="residual tolerance")
    solve.add_argument("--seed", type=int, default=None, help="random seed (default: $RPNN_SEED or 0)")
    solve.add_argument("--method", choices=METHODS, default="rpnn")
    solve.add_argument("--repeats", type=int, default=1, help="timing repetitions")
    solve.add_argument("--grid-size", type=int, default=1000, help="output points (equidistant)")
    solve.add_argument("--points", default=None, help="explicit comma-separated output abscissae")
    solve.add_argument("--out", default=None, help="trajectory table path")
    solve.add_argument("--report", default=None, help="JSON run-report path")
    solve.add_argument("--save-solution", default=None, help="serialized solution path (rpnn only)")
    solve.add_argument("--format", choices=("csv", "json"), default="csv")

    bench = sub.add_parser("benchmark", help="run the benchmark suite and write a summary table")
    bench.add_argument("--suite", required=True, help="'all' or comma list of problem names")
    bench.add_argument("--mu", default=None, help="comma list of van der Pol mu values (default 100)")
    bench.add_argument("--lambda", dest="lam", type=float, default=None)
    bench.add_argument("--tol", type=float, default=1e-3)
    bench.add_argument("--seed", type=int, default=None)
    bench.add_argument("--repeats", type=int, default=1)
    bench.add_argument("--grid-size", type=int, default=None, help="override metric grid size")
    bench.add_argument("--out", default="benchmark_summary.csv", help="summary CSV path")
    bench.add_argument("--report-dir", default=".", help="directory for per-cell JSON reports")

    ev = sub.add_parser("eval", help="evaluate a stored solution on a grid")
    ev.add_argument("--solution", required=True, help="serialized solution JSON")
    ev.add_argument("--grid-size", type=int, default=1000)
    ev.add_argument("--points", default=None)
    ev.add_argument("--out", default=None, help="output table path (stdout when omitted)")
    ev.add_argument("--format", choices=("csv", "json"), default="csv")
    return parser


_VALUE_FLAGS = {"--lambda", "--mu", "--tol", "--points", "--seed"}


def _join_negative_values(argv):
    """Rewrite ['--lambda', '-1e5'] as ['--lambda=-1e5'].

    argparse only recognizes plain negative integers/decimals as values, not
    scientific notation, so negative values in exponent form would otherwise
    be mistaken for option names.
    """
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else ""
        if tok in _VALUE_FLAGS and len(nxt) > 1 and nxt[0] == "-" and nxt[1].isdigit():
            out.append(f"{tok}={nxt}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    argv = _join_negative_values(list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors; remap
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if getattr(args, "seed", None) is None:
        try:
            args.seed = _default_seed()
        except ValueError:
            print("error: RPNN_SEED must be an integer", file=sys.stderr)
            return EXIT_USAGE
    try:
        if args.command == "solve":
            return _cmd_solve(args)
        if args.command == "benchmark":
            return _cmd_benchmark(args)
        return _cmd_eval(args)
    except SolutionFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (StepUnderflowError, NumericError) as exc:
        print(f"error: solver failed: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
