"""Uniprocessor fixed-priority tests for arbitrary-deadline sporadic tasks.

All functions take a :class:`~k2q.task_model.TaskSet` in priority order and
the 0-based position ``k`` of the task under analysis. Float arithmetic is
used throughout; exact analyses live in :mod:`k2q.oracles`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .core import (
    TOL,
    UNBOUNDED,
    Entry,
    KPointInstance,
    NotApplicable,
    ResponseBound,
    Verdict,
    quadratic_bound_general,
    response_bound_general,
)
from .task_model import Task, TaskSet, partition_hp


def ceil_div(a, b) -> int:
    """Exact ``ceil(a / b)`` for ints, Fractions and floats alike."""
    return math.ceil(Fraction(a) / Fraction(b))


def _require_uniprocessor(ts: TaskSet) -> None:
    if ts.processors != 1:
        raise NotApplicable(f"uniprocessor test applied to M = {ts.processors}")


def _unit_entries(tasks) -> tuple[Entry, ...]:
    return tuple(Entry(1.0, 1.0, float(t.wcet), float(t.utilization)) for t in tasks)


def _by_period_desc(tasks) -> list[Task]:
    return sorted(tasks, key=lambda t: -t.period)


@dataclass(frozen=True)
class VirtualTask:
    """All demand of the analysed task inside one window of length ``D_k``."""

    ck_prime: float
    dk: float
    tk: float


def virtual_task(ts: TaskSet, k: int) -> VirtualTask:
    task = ts[k]
    _, hp2 = partition_hp(ts, k)
    ck_prime = ceil_div(task.deadline, task.period) * task.wcet + sum(t.wcet for t in hp2)
    return VirtualTask(float(ck_prime), float(task.deadline), float(task.deadline))


def window_order(hp1, dk) -> list[Task]:
    """hp1 sorted by the last release before ``dk``: ``(ceil(dk/T_i) - 1) T_i``."""
    return sorted(hp1, key=lambda t: (ceil_div(dk, t.period) - 1) * Fraction(t.period))


def test_arbitrary_thm1(ts: TaskSet, k: int) -> Verdict:
    """Test whether the level-k busy window closes within ``D_k``.

    Higher-priority tasks with ``T_i >= D_k`` are folded into the virtual
    demand once; the others enter the quadratic test with unit coefficients.
    """
    cond = "window-test"
    try:
        _require_uniprocessor(ts)
    except NotApplicable as exc:
        return Verdict.not_applicable(cond, str(exc))
    hp1, _ = partition_hp(ts, k)
    vt = virtual_task(ts, k)
    density = math.fsum(float(t.wcet) for t in hp1) / vt.dk
    if density > 1 + TOL:
        return Verdict.not_applicable(cond, f"sum(C_i)/D_k = {density:.6g} > 1 over hp1")
    inst = KPointInstance(_unit_entries(window_order(hp1, ts[k].deadline)), vt.ck_prime, vt.tk)
    v = quadratic_bound_general(inst)
    if not v.applicable:
        return Verdict.not_applicable(cond, v.note)
    return Verdict(v.schedulable, v.bound, cond)


test_arbitrary_thm1.__test__ = False  # keep pytest from collecting it


def rkh_bound(ts: TaskSet, k: int, h: int) -> ResponseBound:
    """Upper bound on the finishing time of the h-th job in the busy window."""
    if h < 1:
        raise ValueError(f"job index h must be >= 1, got {h}")
    _require_uniprocessor(ts)
    hp = ts.hp(k)
    u = sum(t.utilization for t in hp)
    if u > 1:
        raise NotApplicable(f"higher-priority utilization {float(u):.6g} > 1")
    if u == 1:
        return UNBOUNDED
    inst = KPointInstance(_unit_entries(_by_period_desc(hp)), h * float(ts[k].wcet))
    return response_bound_general(inst)


def wcrt_bound_thm2(ts: TaskSet, k: int) -> ResponseBound:
    """Closed-form WCRT bound valid for any deadline model when ``sum U <= 1``."""
    total = sum(t.utilization for t in ts.tasks[: k + 1])
    if total > 1:
        raise NotApplicable(f"utilization {float(total):.6g} > 1")
    return rkh_bound(ts, k, 1)


def bini_wcrt_bound(ts: TaskSet, k: int) -> ResponseBound:
    """``(C_k + sum C_i - sum U_i C_i) / (1 - sum U_i)``, the comparison baseline."""
    hp = ts.hp(k)
    u = math.fsum(float(t.utilization) for t in hp)
    if u >= 1:
        return UNBOUNDED
    num = float(ts[k].wcet) + math.fsum(float(t.wcet) * (1 - float(t.utilization)) for t in hp)
    return ResponseBound(num / (1 - u))


def cor1_rhs(ts: TaskSet, k: int) -> float:
    hp = _by_period_desc(ts.hp(k))
    dk = float(ts[k].deadline)
    u = [float(t.utilization) for t in hp]
    c = [float(t.wcet) for t in hp]
    tail, inter = 0.0, 0.0
    for ui, ci in zip(reversed(u), reversed(c)):
        tail += ci
        inter += ui * tail
    return 1 - math.fsum(u) - math.fsum(c) / dk + inter / dk


def sched_test_cor1(ts: TaskSet, k: int) -> Verdict:
    """Accept when the closed-form response bound fits within ``D_k``."""
    cond = "response-bound"
    if ts.processors != 1:
        return Verdict.not_applicable(cond, f"uniprocessor test applied to M = {ts.processors}")
    total = sum(t.utilization for t in ts.tasks[: k + 1])
    if total > 1:
        return Verdict.not_applicable(cond, f"utilization {float(total):.6g} > 1")
    bound = cor1_rhs(ts, k)
    return Verdict(float(ts[k].wcet) / float(ts[k].deadline) <= bound + TOL, bound, cond)


def rm_exclusive_bound(n: int, beta: float, uk: float) -> float:
    """Bound on the higher-priority utilization for RM with ``beta = T_k/D_k``."""
    if n < 2:
        return math.nan
    r = n / (n - 1)
    return ((n - 1) / (beta * n)) * (1 + beta - math.sqrt(1 + beta**2 + 2 * beta**2 * uk * r))


def rm_total_bound(n: int, beta: float) -> float:
    """Bound on the total utilization up to and including the analysed task."""
    if n > 2 * beta + 1:
        return ((n - 1) / (beta * n)) * (1 + beta - math.sqrt(1 + beta**2 - 2 * beta / (n - 1)))
    return 1 / beta - (n - 1) / (2 * beta**2 * n)


def rm_util_bounds_cor2(ts: TaskSet, k: int) -> tuple[float, float, Verdict]:
    """Utilization bounds for RM that depend only on ``T_k/D_k`` of the analysed task.

    Returns ``(bound_exclusive, bound_total, verdict)``; the verdict accepts
    when either bound holds.
    """
    task = ts[k]
    n = k + 1
    beta = float(task.period) / float(task.deadline)
    excl, total_b = rm_exclusive_bound(n, beta, float(task.utilization)), rm_total_bound(n, beta)
    if ts.processors != 1:
        return excl, total_b, Verdict.not_applicable("rm-util", f"uniprocessor test applied to M = {ts.processors}")
    hp = ts.hp(k)
    if any(t.period > task.period for t in hp):
        return excl, total_b, Verdict.not_applicable("rm-util", "priority order is not rate-monotonic")
    total = sum(t.utilization for t in ts.tasks[: k + 1])
    if total > 1:
        return excl, total_b, Verdict.not_applicable("rm-util", f"utilization {float(total):.6g} > 1")
    u_hp = math.fsum(float(t.utilization) for t in hp)
    if u_hp <= excl + TOL:
        return excl, total_b, Verdict(True, excl, "rm-util-exclusive")
    ok = float(total) <= total_b + TOL
    return excl, total_b, Verdict(ok, total_b, "rm-util-total")
