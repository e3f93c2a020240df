"""Per-task-set analysis reports and acceptance-ratio sweeps."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from . import multiproc, uniproc
from .core import NotApplicable, Verdict
from .oracles.exact import busy_window_exact, tda_exact
from .oracles.simulator import DEFAULT_CAP, first_miss
from .task_model import TaskSet
from .workload import GenConfig, gen_taskset


def _rm_util(ts, k):
    return uniproc.rm_util_bounds_cor2(ts, k)[2]


def _grm_util(ts, k):
    if k == 0:
        # nothing interferes with the top-priority task
        task = ts[k]
        return Verdict(task.wcet <= task.deadline, float(task.utilization), "no-interference")
    return multiproc.grm_util_test(ts, k)


UNIPROC_TESTS: dict[str, Callable[[TaskSet, int], Verdict]] = {
    "window": uniproc.test_arbitrary_thm1,
    "response": uniproc.sched_test_cor1,
    "rm-util": _rm_util,
}
GLOBAL_TESTS: dict[str, Callable[[TaskSet, int], Verdict]] = {
    "grm-quadratic": multiproc.grm_quadratic_test,
    "grm-util": _grm_util,
    "gdm-quadratic": multiproc.gdm_quadratic_test,
}
ALL_TESTS = {**UNIPROC_TESTS, **GLOBAL_TESTS}
ORACLE_NAMES = ("exact", "sim")


def parse_tests(selection: str | None, processors: int) -> list[str]:
    """Resolve a comma-separated selection; default is every test that fits ``processors``."""
    if not selection or selection == "all":
        return list(UNIPROC_TESTS if processors == 1 else GLOBAL_TESTS) + ["exact" if processors == 1 else "sim"]
    names = [s.strip() for s in selection.split(",") if s.strip()]
    unknown = [n for n in names if n not in ALL_TESTS and n not in ORACLE_NAMES]
    if unknown:
        raise ValueError(f"unknown tests {unknown}; choose from {sorted(ALL_TESTS) + list(ORACLE_NAMES)}")
    return names


def _verdict_dict(v: Verdict) -> dict:
    d = {"verdict": v.label, "condition": v.condition, "bound": None if math.isnan(v.bound) else v.bound}
    if v.note:
        d["note"] = v.note
    return d


def _num(x):
    if x is None:
        return None
    if isinstance(x, float) and math.isinf(x):
        return "unbounded"
    if isinstance(x, int):
        return x
    return float(x)


def analyze(ts: TaskSet, tests: Sequence[str] | None = None, horizon_cap: int = DEFAULT_CAP) -> dict:
    """Run the selected tests on every task and collect a JSON-ready report."""
    tests = list(tests) if tests is not None else parse_tests(None, ts.processors)
    uni = ts.processors == 1
    report = {
        "processors": ts.processors,
        "model": ts.model,
        "utilization": float(ts.utilization),
        "tasks": [],
    }
    for k, task in enumerate(ts.tasks):
        row = {
            "id": task.id,
            "k": k,
            "C": _num(task.wcet),
            "T": _num(task.period),
            "D": _num(task.deadline),
            "tests": {},
        }
        for name in tests:
            if name in ORACLE_NAMES:
                continue
            fn = ALL_TESTS[name]
            if uni != (name in UNIPROC_TESTS):
                continue
            row["tests"][name] = _verdict_dict(fn(ts, k))
        if uni:
            try:
                row["response_bound"] = _num(uniproc.wcrt_bound_thm2(ts, k).value)
            except NotApplicable as exc:
                row["response_bound"] = f"n/a: {exc}"
            row["baseline_response_bound"] = _num(uniproc.bini_wcrt_bound(ts, k).value)
            if "exact" in tests:
                row["oracle"] = _exact_oracle(ts, k)
        report["tasks"].append(row)
    if not uni and "sim" in tests:
        report["simulation"] = _simulate(ts, horizon_cap)
    return report


def _exact_oracle(ts: TaskSet, k: int) -> dict:
    task = ts[k]
    out = {}
    try:
        wcrt = busy_window_exact(ts, k)
    except ValueError as exc:
        return {"note": f"exact analysis skipped: {exc}"}
    out["wcrt"] = _num(wcrt)
    out["schedulable"] = bool(wcrt <= task.deadline)
    if task.deadline <= task.period:
        out["tda"] = tda_exact(ts, k).label
    return out


def _simulate(ts: TaskSet, cap: int) -> dict:
    try:
        when, inconclusive = first_miss(ts, cap=cap)
    except ValueError as exc:
        return {"note": f"simulation skipped: {exc}"}
    return {
        "first_miss": when,
        "outcome": "miss" if when is not None else ("inconclusive" if inconclusive else "no-miss"),
    }


# -- sweeps ----------------------------------------------------------------


@dataclass
class SweepRow:
    util: float
    test: str
    accepted: int
    total: int
    bound_sum: float = 0.0
    bound_count: int = 0

    @property
    def ratio(self) -> float:
        return self.accepted / self.total if self.total else math.nan

    @property
    def mean_bound(self) -> float:
        return self.bound_sum / self.bound_count if self.bound_count else math.nan


@dataclass
class SweepResult:
    rows: list[SweepRow] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["util", "test", "accepted", "total", "ratio"])
        for r in self.rows:
            w.writerow([f"{r.util:g}", r.test, r.accepted, r.total, f"{r.ratio:.6f}"])
        return buf.getvalue()

    def to_records(self) -> list[dict]:
        return [
            {"util": r.util, "test": r.test, "accepted": r.accepted, "total": r.total,
             "ratio": r.ratio, "mean_bound": None if math.isnan(r.mean_bound) else r.mean_bound}
            for r in self.rows
        ]


def parse_grid(text: str) -> list[float]:
    """``"0.1:1.0:0.1"`` (inclusive) or ``"0.2,0.5,0.9"``."""
    if ":" in text:
        lo, hi, step = (float(x) for x in text.split(":"))
        if step <= 0 or hi < lo:
            raise ValueError(f"bad grid {text!r}")
        count = int(math.floor((hi - lo) / step + 1e-9)) + 1
        return [round(lo + i * step, 12) for i in range(count)]
    return [float(x) for x in text.split(",") if x.strip()]


def _trial_rng(seed: int, bucket: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([seed, bucket, trial])


def _set_verdict(ts: TaskSet, name: str, horizon_cap: int):
    """Return ``(accepted, mean bound or nan)`` for one set, or None to skip."""
    if name == "exact":
        if not ts.is_integral:
            return None
        ok = all(busy_window_exact(ts, k) <= t.deadline for k, t in enumerate(ts.tasks))
        return ok, math.nan
    if name == "sim":
        when, inconclusive = first_miss(ts, cap=horizon_cap)
        # "accepted" here means no miss was observed
        return when is None, math.nan
    verdicts = [ALL_TESTS[name](ts, k) for k in range(len(ts))]
    bounds = [v.bound for v in verdicts if v.applicable and not math.isnan(v.bound)]
    return all(v.schedulable for v in verdicts), (sum(bounds) / len(bounds) if bounds else math.nan)


def sweep(cfg: GenConfig, grid: Sequence[float], trials: int, tests: Sequence[str] | None = None,
          seed: int | None = None, horizon_cap: int = DEFAULT_CAP) -> SweepResult:
    """Acceptance ratio of each test per utilization bucket.

    Grid values are normalized utilization ``sum U / M``. Every (bucket,
    trial) pair draws from its own generator seeded by ``(seed, bucket,
    trial)``, so results do not depend on evaluation order.
    """
    seed = cfg.seed if seed is None else seed
    tests = list(tests) if tests is not None else parse_tests(None, cfg.processors)
    result = SweepResult()
    for b, util in enumerate(grid):
        rows = {name: SweepRow(util, name, 0, 0) for name in tests}
        bucket_cfg = replace(cfg, total_util=util * cfg.processors)
        for t in range(trials):
            ts = gen_taskset(bucket_cfg, _trial_rng(seed, b, t))
            for name in tests:
                out = _set_verdict(ts, name, horizon_cap)
                if out is None:
                    continue
                ok, bound = out
                row = rows[name]
                row.total += 1
                row.accepted += int(ok)
                if not math.isnan(bound):
                    row.bound_sum += bound
                    row.bound_count += 1
        result.rows.extend(rows[name] for name in tests)
    return result
