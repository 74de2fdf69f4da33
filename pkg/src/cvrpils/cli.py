"""Command-line entry point for solving instances and running benchmark experiments.

Exit codes: 0 success, 2 configuration/usage error, 3 input parse error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bench import ExperimentSpec, rows_to_csv, rows_to_jsonl, run_experiment
from .engine import RunConfig, run
from .instances import ParseError, load_bks, parse_instance, shipped_bks
from .solution import (Solution, parse_solution_routes, solution_cost, validate,
                       validate_routes)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PARSE = 3


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="cvrpils",
        description="Adaptive two-phase iterated local search for the CVRP.")
    p.add_argument("--instance", action="append", default=[], metavar="FILE",
                   help="instance file (repeatable)")
    p.add_argument("--instance-dir", metavar="DIR",
                   help="directory of .vrp instance files")
    p.add_argument("--runs", type=int, default=1, help="runs per instance (default 1)")
    p.add_argument("--time-limit", type=float, default=None, metavar="SECONDS",
                   help="per-run time limit (default 10n seconds)")
    p.add_argument("--max-iterations", type=int, default=None,
                   help="optional iteration cap per run")
    p.add_argument("--acceptance", choices=[f"c{i}" for i in range(1, 8)], default="c4",
                   help="acceptance criterion (default c4)")
    p.add_argument("--eta", type=float, default=0.4, help="c1/c2/c3 threshold parameter")
    p.add_argument("--kappa", type=float, default=0.4, help="c2 target acceptance rate")
    p.add_argument("--mu", type=float, default=0.5, help="c3 target distance factor")
    p.add_argument("--theta", type=float, default=0.005, help="c5 relative threshold")
    p.add_argument("--k-best", type=int, default=6, help="c6 window length")
    p.add_argument("--lambda-period", type=int, default=None,
                   help="c4 alpha refresh period (default gamma)")
    p.add_argument("--degree", choices=[f"d{i}" for i in range(1, 5)], default="d4",
                   help="perturbation degree mechanism (default d4)")
    p.add_argument("--omega", type=float, default=15.0, help="d1 fixed degree")
    p.add_argument("--nu", type=float, default=0.03, help="d2 relative factor")
    p.add_argument("--omega-min", type=int, default=1, help="d3 lower bound")
    p.add_argument("--omega-max", type=int, default=30, help="d3 upper bound")
    p.add_argument("--dbeta", type=int, default=25,
                   help="target solution distance / elite separation (default 25)")
    p.add_argument("--sigma", type=int, default=60, help="elite pool capacity (default 60)")
    p.add_argument("--gamma", type=int, default=30, help="adaptive window length (default 30)")
    p.add_argument("--phi", type=int, default=40, help="neighbor list size (default 40)")
    p.add_argument("--stall-threshold", type=int, default=2000,
                   help="iterations without improvement before phase 2 (default 2000)")
    p.add_argument("--seed", type=int, default=0, help="base random seed")
    p.add_argument("--bks", metavar="FILE",
                   help="best-known-values CSV (default: bundled registry)")
    p.add_argument("--out", metavar="FILE", help="write the gap table here (default stdout)")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--trace", metavar="FILE",
                   help="write a per-iteration trace CSV (single instance, single run)")
    p.add_argument("--time-source", choices=["wall", "counted"], default="wall",
                   help="counted makes time deterministic for replayable traces")
    p.add_argument("--counted-dt", type=float, default=1.0,
                   help="seconds per iteration under --time-source counted")
    p.add_argument("--workers", type=int, default=1, help="parallel runs (default 1)")
    p.add_argument("--validate-solution", metavar="FILE",
                   help="check a solution file against --instance and exit")
    return p


def _config_from_args(args) -> RunConfig:
    return RunConfig(
        acceptance=args.acceptance, degree=args.degree, gamma=args.gamma,
        sigma=args.sigma, phi=args.phi, d_beta=args.dbeta, eta0=args.eta,
        kappa=args.kappa, mu=args.mu, theta=args.theta, k_best=args.k_best,
        lam=args.lambda_period, omega_fixed=args.omega, nu=args.nu,
        omega_low=args.omega_min, omega_high=args.omega_max,
        time_limit=args.time_limit, max_iterations=args.max_iterations,
        stall_threshold=args.stall_threshold, seed=args.seed,
        time_source=args.time_source, counted_dt=args.counted_dt,
        collect_trace=args.trace is not None,
    )


def _read_instance(path: str):
    p = Path(path)
    if not p.is_file():
        raise ParseError(0, f"instance file not found: {path}")
    return parse_instance(p.read_text())


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code not in (0, None) else EXIT_OK

    try:
        paths = list(args.instance)
        if args.instance_dir:
            d = Path(args.instance_dir)
            if not d.is_dir():
                print(f"error: not a directory: {args.instance_dir}", file=sys.stderr)
                return EXIT_CONFIG
            paths.extend(sorted(str(f) for f in d.glob("*.vrp")))
        if not paths:
            parser.print_usage(sys.stderr)
            print("error: no instance given (use --instance or --instance-dir)",
                  file=sys.stderr)
            return EXIT_CONFIG

        if args.validate_solution:
            if len(paths) != 1:
                print("error: --validate-solution needs exactly one --instance",
                      file=sys.stderr)
                return EXIT_CONFIG
            inst = _read_instance(paths[0])
            sol_path = Path(args.validate_solution)
            if not sol_path.is_file():
                raise ParseError(0, f"solution file not found: {args.validate_solution}")
            routes, stated = parse_solution_routes(sol_path.read_text())
            problems = validate_routes(routes, inst)
            if problems:
                for v in problems:
                    print(str(v))
                return 1
            sol = Solution.from_routes(inst, routes)
            problems = validate(sol, inst)
            cost = solution_cost(sol, inst)
            if stated is not None and stated != cost:
                print(f"invalid: stated cost {stated} but recomputed {cost}")
                return 1
            if problems:
                for v in problems:
                    print(str(v))
                return 1
            print(f"valid, cost {cost}")
            return EXIT_OK

        cfg = _config_from_args(args)
        cfg.validate()
        if args.runs < 1:
            print("error: --runs must be >= 1", file=sys.stderr)
            return EXIT_CONFIG
        if args.workers < 1:
            print("error: --workers must be >= 1", file=sys.stderr)
            return EXIT_CONFIG

        registry = shipped_bks() if args.bks is None else load_bks(Path(args.bks).read_text())
        for path in paths:
            _read_instance(path)  # surface parse errors before spending solver time

        if args.trace:
            if len(paths) != 1 or args.runs != 1:
                print("error: --trace needs exactly one instance and --runs 1",
                      file=sys.stderr)
                return EXIT_CONFIG
            from .bench import GapRow, compute_gap
            inst = _read_instance(paths[0])
            report = run(inst, cfg)
            Path(args.trace).write_text(report.trace_csv())
            bks = registry.get(inst.name)
            rows = [GapRow(instance=inst.name, bks=bks, avg=float(report.best_cost),
                           gap=compute_gap(report.best_cost, bks) if bks else None,
                           best=report.best_cost,
                           t_min=report.time_to_best_seconds / 60.0)]
        else:
            spec = ExperimentSpec(instance_paths=tuple(paths), runs=args.runs,
                                  config=cfg, seed_base=args.seed, bks=registry,
                                  workers=args.workers)
            rows, _ = run_experiment(spec)
        text = rows_to_csv(rows) if args.format == "csv" else rows_to_jsonl(rows)
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
        missing = [r.instance for r in rows if r.bks is None]
        if missing:
            print(f"warning: no BKS entry for {', '.join(missing)}; gap left blank",
                  file=sys.stderr)
        return EXIT_OK
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except FileNotFoundError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG


def console_entry() -> None:
    sys.exit(main(sys.argv[1:]))
