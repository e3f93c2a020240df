"""Randomized verification suites pitting the closed-form tests against the
exact oracles.

Each suite returns a :class:`SuiteResult`; a suite fails on any violation and
lists the offending task sets verbatim.
"""

from __future__ import annotations

import itertools
import json
import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import core, multiproc, uniproc
from .core import Entry, KPointInstance, NotApplicable
from .oracles.exact import busy_window_exact, tda_exact
from .oracles.lp import lp_min_ck
from .oracles.permutations import permutation_minmax, response_value, sched_rhs
from .oracles.simulator import first_miss
from .task_model import TaskSet
from .workload import GenConfig, gen_taskset

# Relative slack when comparing a float bound against an exact value.
REL = 1e-9
MAX_REPORTED = 20


@dataclass
class SuiteResult:
    name: str
    checked: int = 0
    violations: list[str] = field(default_factory=list)
    stats: dict = field(default_factory=dict)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.violations

    def fail(self, what: str, payload) -> None:
        if len(self.violations) < MAX_REPORTED:
            self.violations.append(f"{what}: {json.dumps(payload, default=str)}")
        else:
            self.stats["unreported_violations"] = self.stats.get("unreported_violations", 0) + 1

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = ", ".join(f"{k}={_fmt(v)}" for k, v in self.stats.items())
        return f"[{status}] {self.name}: {self.checked} checked, {len(self.violations)} violations" + (
            f" ({extra})" if extra else ""
        ) + f" [{self.elapsed:.2f}s]"


def _fmt(v):
    return f"{v:.6g}" if isinstance(v, float) else str(v)


def _timed(fn: Callable[..., SuiteResult]) -> Callable[..., SuiteResult]:
    def wrapper(*args, **kwargs):
        start = time.perf_counter()
        res = fn(*args, **kwargs)
        res.elapsed = time.perf_counter() - start
        return res

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _child_rngs(seed: int, count: int):
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(count)]


# -- corpora ---------------------------------------------------------------


def uniproc_corpus(count: int, seed: int = 0, max_n: int = 10):
    """Integer uniprocessor RM sets, ``sum U <= 1``, half constrained and half
    arbitrary deadlines."""
    for rng in _child_rngs(seed, count):
        n = int(rng.integers(2, max_n + 1))
        util = float(rng.uniform(0.05, 0.99))
        ratios = (0.5, 1.0) if rng.random() < 0.5 else (1.0, 4.0)
        cfg = GenConfig(n=n, total_util=util, period_range=(10, 1000), deadline_ratio_range=ratios,
                        integer_mode=True, policy="rm")
        yield gen_taskset(cfg, rng)


def random_instance(rng: np.random.Generator, m: int, tk: float = 100.0) -> KPointInstance:
    """A k-point instance with ``sum alpha u <= 1`` and ``sum beta c <= tk``."""
    alpha = rng.uniform(0.2, 2.0, m)
    beta = rng.uniform(0.2, 2.0, m)
    w = rng.dirichlet(np.ones(m + 1))[:m] if m else np.zeros(0)
    au_total = rng.uniform(0.05, 1.0)
    u = np.clip(w * au_total / np.maximum(alpha, 1e-12), 1e-6, 1.0)
    # rescale so that sum alpha u stays within 1 after clipping
    u = u / max(1.0, float(alpha @ u))
    bc_total = rng.uniform(0.0, 1.0) * tk
    wc = rng.dirichlet(np.ones(m + 1))[:m] if m else np.zeros(0)
    c = wc * bc_total / beta
    entries = tuple(Entry(float(a), float(b), float(ci), float(ui)) for a, b, ci, ui in zip(alpha, beta, c, u))
    return KPointInstance(entries, ck=1.0, tk=tk)


# -- suites ----------------------------------------------------------------


@_timed
def suite_constants(**_) -> SuiteResult:
    """Asymptotic utilization bound and global RM capacity factor."""
    res = SuiteResult("constants")
    checks = {
        "rm_limit": (core.util_bound_exclusive(10**6, 1, 1, 0), 2 - math.sqrt(2), 1e-4),
        "grm_capacity": (multiproc.grm_capacity_factor(), (3 + math.sqrt(7)) / 2, 1e-5),
    }
    for name, (got, want, tol) in checks.items():
        res.checked += 1
        res.stats[name] = got
        if abs(got - want) > tol:
            res.fail(name, {"got": got, "want": want, "tol": tol})
    return res


def _ts_payload(ts: TaskSet, k: int | None = None):
    d = ts.to_dict()
    if k is not None:
        d["k"] = k
    return d


@_timed
def suite_safety(count: int = 10_000, seed: int = 0, **_) -> SuiteResult:
    """Every uniprocessor acceptance must be confirmed by the busy-window WCRT,
    and the closed-form response bound must sit between the exact WCRT and the
    older baseline bound."""
    res = SuiteResult("safety")
    accepted = {"window-test": 0, "response-bound": 0, "rm-util": 0}
    strict = eligible = 0
    for ts in uniproc_corpus(count, seed):
        res.checked += 1
        for k, task in enumerate(ts.tasks):
            wcrt = busy_window_exact(ts, k)
            verdicts = {
                "window-test": uniproc.test_arbitrary_thm1(ts, k),
                "response-bound": uniproc.sched_test_cor1(ts, k),
                "rm-util": uniproc.rm_util_bounds_cor2(ts, k)[2],
            }
            for name, v in verdicts.items():
                if v.schedulable:
                    accepted[name] += 1
                    if wcrt > task.deadline:
                        res.fail(f"{name} accepted but WCRT {wcrt} > D_k", _ts_payload(ts, k))
            bound = uniproc.wcrt_bound_thm2(ts, k).value
            bini = uniproc.bini_wcrt_bound(ts, k).value
            if bound < float(wcrt) * (1 - REL):
                res.fail(f"response bound {bound} below exact WCRT {wcrt}", _ts_payload(ts, k))
            if bound > bini * (1 + REL):
                res.fail(f"response bound {bound} above baseline {bini}", _ts_payload(ts, k))
            if k >= 2:
                eligible += 1
                if bound < bini * (1 - REL):
                    strict += 1
    res.stats.update({f"accepted[{k}]": v for k, v in accepted.items()})
    res.stats["strict_fraction_k>=3"] = strict / eligible if eligible else math.nan
    return res


@_timed
def suite_oracles(count: int = 2_000, seed: int = 1, **_) -> SuiteResult:
    """Time-demand analysis and busy-window WCRT agree on constrained deadlines."""
    res = SuiteResult("oracle-agreement")
    for ts in uniproc_corpus(count, seed):
        for k, task in enumerate(ts.tasks):
            if task.deadline > task.period:
                continue
            res.checked += 1
            if tda_exact(ts, k).schedulable != (busy_window_exact(ts, k) <= task.deadline):
                res.fail("TDA and busy window disagree", _ts_payload(ts, k))
    return res


@_timed
def suite_lp(count: int = 1_000, seed: int = 2, **_) -> SuiteResult:
    """Closed-form minimum demand equals the LP optimum found by vertex enumeration."""
    res = SuiteResult("lp-equivalence")
    worst = 0.0
    for rng in _child_rngs(seed, count):
        inst = random_instance(rng, int(rng.integers(0, 6)), tk=float(rng.uniform(1, 1000)))
        res.checked += 1
        closed = core.implied_min_ck(inst)
        lp = lp_min_ck(inst)
        err = abs(closed - lp)
        worst = max(worst, err / inst.tk)
        if err > 1e-9 * inst.tk:
            res.fail(f"closed {closed} vs LP {lp}", {"entries": [e.__dict__ for e in inst.entries], "tk": inst.tk})
    res.stats["max_rel_error"] = worst
    return res


@_timed
def suite_ordering(count: int = 500, seed: int = 3, **_) -> SuiteResult:
    """Sorting by ``beta c / (alpha u)`` matches the exhaustive optimum."""
    res = SuiteResult("ordering")
    for rng in _child_rngs(seed, count):
        m = int(rng.integers(2, 8))
        inst = random_instance(rng, m)
        entries = list(inst.entries)
        res.checked += 1
        _, best = permutation_minmax(entries, "sched_rhs", tk=inst.tk)
        got = sched_rhs(core.worst_case_ordering_sched(entries), inst.tk)
        if abs(got - best) > 1e-12:
            res.fail(f"schedulability ordering {got} != min {best}", [e.__dict__ for e in entries])
        if inst.alpha_u < 1:
            _, best_r = permutation_minmax(entries, "response", ck=inst.ck)
            got_r = response_value(core.worst_case_ordering_response(entries), inst.ck)
            if abs(got_r - best_r) > 1e-12 * max(1.0, abs(best_r)):
                res.fail(f"response ordering {got_r} != max {best_r}", [e.__dict__ for e in entries])
    return res


def _all_accepted(ts: TaskSet, test) -> bool:
    return all(test(ts, k).schedulable for k in range(len(ts)))


@_timed
def suite_global_sim(count: int = 1_000, seed: int = 4, cap: int = 10**6, dm: bool = True, **_) -> SuiteResult:
    """Sets accepted by the global quadratic tests never miss in simulation."""
    res = SuiteResult("global-falsification")
    inconclusive = 0
    for label, test, ratios, policy in (
        ("grm", multiproc.grm_quadratic_test, (1.0, 1.0), "rm"),
        ("gdm", multiproc.gdm_quadratic_test, (0.5, 1.0), "dm"),
    ):
        if label == "gdm" and not dm:
            continue
        rng = np.random.default_rng([seed, len(label)])
        found = 0
        while found < count:
            m = int(rng.choice([2, 4]))
            n = int(rng.integers(m + 1, 3 * m + 1))
            util = float(rng.uniform(0.1, 0.6)) * m
            cfg = GenConfig(n=n, total_util=min(util, n), period_range=(10, 1000), deadline_ratio_range=ratios,
                            processors=m, integer_mode=True, policy=policy)
            ts = gen_taskset(cfg, rng)
            if not _all_accepted(ts, test):
                continue
            found += 1
            res.checked += 1
            when, capped = first_miss(ts, cap=cap)
            inconclusive += capped
            if when is not None:
                res.fail(f"{label} accepted but missed at t={when}", _ts_payload(ts))
    res.stats["inconclusive_rate"] = inconclusive / res.checked if res.checked else math.nan
    return res


@_timed
def suite_bertogna(count: int = 10_000, **_) -> SuiteResult:
    """``2 - sqrt(2 + 2x) >= (1 - x)/2`` on a grid over [0, 1]."""
    res = SuiteResult("bertogna-dominance")
    for x in np.linspace(0.0, 1.0, count):
        res.checked += 1
        if 2 - math.sqrt(2 + 2 * x) < (1 - x) / 2 - 1e-15:
            res.fail("grid point", float(x))
    return res


@_timed
def suite_pigeonhole(count: int = 10_000, seed: int = 5, **_) -> SuiteResult:
    """Each rejection by the global constrained-deadline test has a term above 1/3."""
    res = SuiteResult("pigeonhole")
    rng = np.random.default_rng(seed)
    labels = {}
    while res.checked < count:
        m = int(rng.choice([2, 4, 8]))
        n = int(rng.integers(2, 4 * m + 1))
        util = float(rng.uniform(0.2, 0.75)) * min(m, n)
        cfg = GenConfig(n=n, total_util=util, period_range=(10, 1000), deadline_ratio_range=(0.3, 1.0),
                        processors=m, integer_mode=True, policy="dm")
        ts = gen_taskset(cfg, rng)
        rejected = [k for k in range(n) if (v := multiproc.gdm_quadratic_test(ts, k)).applicable and not v.schedulable]
        if not rejected:
            continue
        res.checked += 1
        for k in rejected:
            try:
                label, value = multiproc.gdm_speedup_witness(ts, k)
            except NotApplicable:
                res.fail("no witness above 1/3", _ts_payload(ts, k))
                continue
            labels[label] = labels.get(label, 0) + 1
    res.stats.update({f"witness[{k}]": v for k, v in sorted(labels.items())})
    return res


@_timed
def suite_implication(count: int = 10_000, seed: int = 6, **_) -> SuiteResult:
    """Utilization-form acceptance implies quadratic-form acceptance, for the
    abstract bound and for global RM; RM utilization bounds imply the
    response-bound test."""
    res = SuiteResult("implication")
    rngs = _child_rngs(seed, count)
    for rng in rngs:
        alpha, beta = rng.uniform(0.2, 2.0, 2)
        k = int(rng.integers(2, 30))
        ratio = float(rng.uniform(0, 1))
        try:
            bound = core.util_bound_exclusive(k, alpha, beta, ratio)
        except NotApplicable:
            continue
        if bound <= 0:
            continue
        u = rng.dirichlet(np.ones(k - 1)) * bound * rng.uniform(0, 1)
        u = u[u > 0]
        if (u > 1).any() or not len(u):
            continue
        res.checked += 1
        if not core.quadratic_bound_uniform(list(u), alpha, beta, ratio).schedulable:
            res.fail("exclusive bound accepted, quadratic rejected",
                     {"alpha": alpha, "beta": beta, "k": k, "ratio": ratio, "u": list(u)})
    for i, rng in enumerate(_child_rngs(seed + 1, count // 10)):
        m = int(rng.choice([2, 4]))
        n = int(rng.integers(2, 3 * m + 1))
        cfg = GenConfig(n=n, total_util=float(rng.uniform(0.05, 0.7)) * min(m, n), period_range=(10, 1000),
                        processors=m, integer_mode=True)
        ts = gen_taskset(cfg, rng)
        for k in range(1, n):
            res.checked += 1
            if multiproc.grm_util_test(ts, k).schedulable and not multiproc.grm_quadratic_test(ts, k).schedulable:
                res.fail("grm utilization form accepted, quadratic form rejected", _ts_payload(ts, k))
    for ts in uniproc_corpus(count // 10, seed + 2):
        for k in range(len(ts)):
            res.checked += 1
            if uniproc.rm_util_bounds_cor2(ts, k)[2].schedulable and not uniproc.sched_test_cor1(ts, k).schedulable:
                res.fail("RM utilization bound accepted, response-bound test rejected", _ts_payload(ts, k))
    return res


SUITES = {
    "constants": suite_constants,
    "safety": suite_safety,
    "oracles": suite_oracles,
    "lp": suite_lp,
    "ordering": suite_ordering,
    "global": suite_global_sim,
    "bertogna": suite_bertogna,
    "pigeonhole": suite_pigeonhole,
    "implication": suite_implication,
}


def run_suites(names, seed: int | None = None, count: int | None = None):
    kwargs = {}
    if count is not None:
        kwargs["count"] = count
    for name in names:
        fn = SUITES[name]
        kw = dict(kwargs)
        if seed is not None:
            kw["seed"] = seed
        yield fn(**kw)
