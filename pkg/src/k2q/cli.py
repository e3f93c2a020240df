"""Command-line entry point: ``k2q analyze | sweep | verify``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import harness, verify
from .oracles.simulator import DEFAULT_CAP
from .task_model import TaskSetError, assign_priorities, parse_taskset
from .workload import GenConfig, GenerationError

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, newline="")
    else:
        sys.stdout.write(text)


def _load_json_arg(value: str) -> str:
    """Accept inline JSON or a path to a JSON file."""
    if value.lstrip().startswith("{"):
        return value
    try:
        return Path(value).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {value}: {exc}") from exc


def cmd_analyze(args) -> int:
    try:
        text = Path(args.file).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {args.file}: {exc}") from exc
    try:
        ts = assign_priorities(parse_taskset(text), args.policy)
        tests = harness.parse_tests(args.tests, ts.processors)
    except (TaskSetError, ValueError) as exc:
        raise InputError(str(exc)) from exc
    report = harness.analyze(ts, tests, horizon_cap=args.horizon_cap)
    report["policy"] = args.policy
    _emit(json.dumps(report, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    try:
        cfg = GenConfig.from_json(_load_json_arg(args.config)) if args.config else GenConfig(n=args.n, total_util=0.5)
        if args.policy:
            cfg = GenConfig(**{**json.loads(cfg.to_json()), "policy": args.policy})
        grid = harness.parse_grid(args.util_grid)
        tests = harness.parse_tests(args.tests, cfg.processors)
        if args.trials < 1:
            raise ValueError("--trials must be >= 1")
        if "exact" in tests and not cfg.integer_mode:
            raise ValueError("the exact oracle needs integer_mode in the generator config")
        if "sim" in tests and not cfg.integer_mode:
            raise ValueError("the simulator needs integer_mode in the generator config")
    except (TypeError, ValueError, json.JSONDecodeError) as exc:
        raise InputError(str(exc)) from exc
    try:
        result = harness.sweep(cfg, grid, args.trials, tests, seed=args.seed, horizon_cap=args.horizon_cap)
    except (GenerationError, ValueError) as exc:
        raise InputError(str(exc)) from exc
    _emit(result.to_csv(), args.out)
    if args.json:
        Path(args.json).write_text(json.dumps(result.to_records(), indent=2) + "\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    names = list(verify.SUITES) if args.suite == "all" else [s.strip() for s in args.suite.split(",")]
    unknown = [n for n in names if n not in verify.SUITES]
    if unknown:
        raise InputError(f"unknown suites {unknown}; choose from {list(verify.SUITES)}")
    if args.count is not None and args.count < 1:
        raise InputError("--count must be >= 1")
    ok = True
    lines = []
    for res in verify.run_suites(names, seed=args.seed, count=args.count):
        lines.append(res.summary())
        lines.extend(f"  counterexample {v}" for v in res.violations)
        print(lines[-1 - len(res.violations)], flush=True)
        for v in res.violations:
            print(f"  counterexample {v}", flush=True)
        ok &= res.passed
    if args.out:
        Path(args.out).write_text("\n".join(lines) + "\n")
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="k2q", description="Fixed-priority schedulability analysis via k-point tests.")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="analyze one task set JSON file")
    a.add_argument("file")
    a.add_argument("--tests", help="comma-separated: " + ",".join([*harness.ALL_TESTS, *harness.ORACLE_NAMES]))
    a.add_argument("--policy", choices=("rm", "dm", "given"), default="given")
    a.add_argument("--horizon-cap", type=int, default=DEFAULT_CAP)
    a.add_argument("--out", help="write the JSON report here instead of stdout")
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("sweep", help="acceptance ratio per utilization bucket, as CSV")
    s.add_argument("--config", help="generator config as inline JSON or a JSON file")
    s.add_argument("--n", type=int, default=10, help="tasks per set when no --config is given")
    s.add_argument("--util-grid", default="0.1:1.0:0.1", help="lo:hi:step or a comma list (sum U / M)")
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--seed", type=int, default=None, help="overrides the config seed")
    s.add_argument("--tests")
    s.add_argument("--policy", choices=("rm", "dm", "given"))
    s.add_argument("--horizon-cap", type=int, default=DEFAULT_CAP)
    s.add_argument("--out", help="CSV path (default stdout)")
    s.add_argument("--json", help="also write rows with mean bounds as JSON")
    s.set_defaults(func=cmd_sweep)

    v = sub.add_parser("verify", help="run randomized oracle-comparison suites")
    v.add_argument("--suite", default="all", help="comma-separated from: all," + ",".join(verify.SUITES))
    v.add_argument("--seed", type=int)
    v.add_argument("--count", type=int)
    v.add_argument("--out", help="also write the report here")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
