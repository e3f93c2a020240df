"""Global fixed-priority tests on M identical processors."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import TOL, NotApplicable, Verdict, uniform_rhs_closed
from .task_model import CONSTRAINED, IMPLICIT, TaskSet


@dataclass(frozen=True)
class GlobalContext:
    m: int
    u_max: float
    delta_max: float


def global_context(ts: TaskSet, k: int) -> GlobalContext:
    hp = ts.hp(k)
    task = ts[k]
    u_max = max(float(t.utilization) for t in ts.tasks[: k + 1])
    delta_max = max([float(t.utilization) for t in hp] + [float(task.wcet) / float(task.deadline)])
    return GlobalContext(ts.processors, u_max, delta_max)


def grm_quadratic_rhs(u_hp, m: int) -> float:
    # Uniform quadratic form with alpha = beta = 1/M.
    return uniform_rhs_closed(u_hp, 1 / m, 1 / m)


def _rm_ordered(ts: TaskSet, k: int) -> bool:
    return all(t.period <= ts[k].period for t in ts.hp(k))


def grm_quadratic_test(ts: TaskSet, k: int) -> Verdict:
    """Global RM, implicit deadlines: ``U_max <= 1 - (2/M) sum U + ((sum U)^2 + sum U^2) / (2 M^2)``."""
    cond = "grm-quadratic"
    if ts.model != IMPLICIT:
        return Verdict.not_applicable(cond, f"needs implicit deadlines, task set is {ts.model}")
    if not _rm_ordered(ts, k):
        return Verdict.not_applicable(cond, "priority order is not rate-monotonic")
    ctx = global_context(ts, k)
    rhs = grm_quadratic_rhs([float(t.utilization) for t in ts.hp(k)], ctx.m)
    return Verdict(ctx.u_max <= rhs + TOL, rhs, cond)


def grm_util_bound(n: int, u_max: float) -> float:
    """Right-hand side bounding ``sum_{i<k} U_i / M``."""
    if n < 2:
        raise ValueError(f"needs at least one higher-priority task, got n = {n}")
    r = n / (n - 1)
    return ((n - 1) / n) * (2 - math.sqrt(2 + 2 * u_max * r))


def grm_util_test(ts: TaskSet, k: int) -> Verdict:
    """Global RM utilization form; needs ``k >= 2`` (0-based ``k >= 1``)."""
    cond = "grm-util"
    if k < 1:
        raise ValueError("utilization form needs a higher-priority task")
    if ts.model != IMPLICIT:
        return Verdict.not_applicable(cond, f"needs implicit deadlines, task set is {ts.model}")
    if not _rm_ordered(ts, k):
        return Verdict.not_applicable(cond, "priority order is not rate-monotonic")
    ctx = global_context(ts, k)
    rhs = grm_util_bound(k + 1, ctx.u_max)
    load = math.fsum(float(t.utilization) for t in ts.hp(k)) / ctx.m
    return Verdict(load <= rhs + TOL, rhs, cond)


def capacity_root(tol: float = 1e-12) -> float:
    """Root of ``x = 2 - sqrt(2 + 2x)`` on [0, 1] by bisection."""
    f = lambda x: 2 - math.sqrt(2 + 2 * x) - x
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def grm_capacity_factor() -> float:
    return 1 / capacity_root()


def gdm_terms(ts: TaskSet, k: int) -> tuple[float, float, float, float]:
    """``(delta_max, sum U / M, sum C/D_k / M, cross / M^2)`` over hp sorted by period, descending."""
    m = ts.processors
    dk = float(ts[k].deadline)
    hp = sorted(ts.hp(k), key=lambda t: -t.period)
    u = [float(t.utilization) for t in hp]
    d = [float(t.wcet) / dk for t in hp]
    tail, cross = 0.0, 0.0
    for ui, di in zip(reversed(u), reversed(d)):
        tail += di
        cross += ui * tail
    return global_context(ts, k).delta_max, math.fsum(u) / m, math.fsum(d) / m, cross / (m * m)


def _gdm_preconditions(ts: TaskSet, k: int) -> str | None:
    if ts.model not in (IMPLICIT, CONSTRAINED):
        return f"needs constrained deadlines, task set is {ts.model}"
    m = ts.processors
    total = sum(t.utilization for t in ts.tasks[: k + 1])
    if total > m:
        return f"utilization {float(total):.6g} > M = {m}"
    dens = math.fsum(float(t.wcet) for t in ts.hp(k)) / float(ts[k].deadline)
    if dens > m:
        return f"sum(C_i)/D_k = {dens:.6g} > M = {m}"
    return None


def gdm_quadratic_test(ts: TaskSet, k: int) -> Verdict:
    """Global fixed priority (e.g. DM), constrained deadlines.

    Only the unextended window is evaluated: extending it can only relax the
    condition once ``sum U <= M``.
    """
    cond = "gdm-quadratic"
    why = _gdm_preconditions(ts, k)
    if why:
        return Verdict.not_applicable(cond, why)
    delta, su, sd, cross = gdm_terms(ts, k)
    rhs = 1 - su - sd + cross
    return Verdict(delta <= rhs + TOL, rhs, cond)


WITNESS_LABELS = ("delta", "utilization", "density")


def gdm_speedup_witness(ts: TaskSet, k: int) -> tuple[str, float]:
    """Name a term exceeding 1/3 for a task the global quadratic test rejects.

    Returns ``(label, value)`` for the largest of ``delta_max``,
    ``sum U / M`` and ``sum C_i/D_k / M``.
    """
    if gdm_quadratic_test(ts, k).schedulable:
        raise ValueError("task is accepted; no witness exists")
    delta, su, sd, _ = gdm_terms(ts, k)
    label, value = max(zip(WITNESS_LABELS, (delta, su, sd)), key=lambda p: p[1])
    if value <= 1 / 3:
        raise NotApplicable(f"no term exceeds 1/3 (max {label} = {value:.6g})")
    return label, value
