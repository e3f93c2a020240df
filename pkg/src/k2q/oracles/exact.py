"""Exact uniprocessor fixed-priority analyses on integer or rational parameters."""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

from ..core import NotApplicable, Verdict
from ..task_model import TaskSet


def exact(x):
    """Return ``x`` as an int or Fraction, rejecting non-integral floats."""
    if isinstance(x, bool):
        raise ValueError(f"not a time value: {x!r}")
    if isinstance(x, Rational):
        return x if isinstance(x, int) or x.denominator != 1 else int(x)
    if isinstance(x, float) and x.is_integer():
        return int(x)
    raise ValueError(f"exact oracle needs integer or rational parameters, got {x!r}")


def _params(ts: TaskSet, k: int):
    if ts.processors != 1:
        raise NotApplicable(f"uniprocessor oracle applied to M = {ts.processors}")
    hp = [(exact(t.wcet), exact(t.period)) for t in ts.hp(k)]
    task = ts[k]
    return hp, exact(task.wcet), exact(task.period), exact(task.deadline)


def _ceil(a, b):
    return -(-a // b)


def tda_exact(ts: TaskSet, k: int) -> Verdict:
    """Time-demand analysis: least fixed point of
    ``t = C_k + sum ceil(t/T_i) C_i``, accepted iff it is at most ``D_k``.

    ``bound`` holds the fixed point when found, else the first iterate past
    ``D_k``.
    """
    hp, ck, tk, dk = _params(ts, k)
    if dk > tk:
        raise NotApplicable("time-demand analysis needs D_k <= T_k")
    t = ck + sum(c for c, _ in hp)
    while t <= dk:
        w = ck + sum(_ceil(t, p) * c for c, p in hp)
        if w == t:
            return Verdict(True, t, "tda")
        t = w
    return Verdict(False, t, "tda")


def level_utilization(ts: TaskSet, k: int) -> Fraction:
    return sum((Fraction(exact(t.wcet), exact(t.period)) for t in ts.tasks[: k + 1]), Fraction(0))


def busy_window_jobs(ts: TaskSet, k: int):
    """Yield ``(h, R_kh)`` for each job of task k in the synchronous busy window."""
    hp, ck, tk, _ = _params(ts, k)
    if level_utilization(ts, k) > 1:
        raise NotApplicable("level-k utilization exceeds 1; the busy window never closes")
    hp_c = sum(c for c, _ in hp)
    r = 0
    h = 0
    while True:
        h += 1
        # Iterating upward from any point below the least fixed point reaches it.
        t = max(r, h * ck + hp_c)
        while True:
            w = h * ck + sum(_ceil(t, p) * c for c, p in hp)
            if w == t:
                break
            t = w
        r = t
        yield h, r
        if r <= h * tk:
            return


def busy_window_exact(ts: TaskSet, k: int):
    """Exact worst-case response time of ``tasks[k]`` for any deadline model.

    Returns an int/Fraction, or ``math.inf`` when the level-k utilization
    exceeds 1.
    """
    try:
        jobs = busy_window_jobs(ts, k)
        tk = exact(ts[k].period)
        return max(r - (h - 1) * tk for h, r in jobs)
    except NotApplicable:
        if ts.processors != 1:
            raise
        return math.inf
