"""Event-driven simulation of preemptive global fixed-priority scheduling.

Integer ticks only. Every task releases synchronously at 0 and then strictly
periodically. At each instant the M highest-priority tasks with pending work
run their oldest job; a task never runs two of its jobs in parallel. Lower
task index means higher priority.

A simulation can only falsify schedulability: a miss disproves it, a clean
run over the horizon proves nothing (synchronous release is not the worst
case under global scheduling).
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterator, NamedTuple

import numpy as np
from numba import njit

from ..task_model import TaskSet
from .exact import exact

DEFAULT_CAP = 10**7

KINDS = ("release", "start", "preempt", "finish", "miss")


class Event(NamedTuple):
    time: int
    kind: str
    task: int
    job: int


@dataclass
class SimTrace:
    horizon: int
    inconclusive: bool
    events: list[Event] = field(default_factory=list)
    misses: list[Event] = field(default_factory=list)

    @property
    def missed(self) -> bool:
        return bool(self.misses)

    def to_jsonl(self) -> str:
        return "".join(json.dumps(e._asdict()) + "\n" for e in self.events)

    def iter_kind(self, kind: str) -> Iterator[Event]:
        return (e for e in self.events if e.kind == kind)


def hyperperiod(ts: TaskSet) -> int:
    return reduce(math.lcm, (exact(t.period) for t in ts.tasks), 1)


def _integer_params(ts: TaskSet):
    out = []
    for t in ts.tasks:
        vals = tuple(exact(v) for v in (t.wcet, t.period, t.deadline))
        if not all(isinstance(v, int) for v in vals):
            raise ValueError("simulator needs integer tick parameters")
        out.append(vals)
    return out


def simulation_horizon(ts: TaskSet, horizon: int | None = None, cap: int = DEFAULT_CAP) -> tuple[int, bool]:
    """Return ``(horizon, inconclusive)``; the hyperperiod, clipped at ``cap``."""
    if horizon is not None:
        if horizon > cap:
            raise ValueError(f"horizon {horizon} exceeds cap {cap}")
        return horizon, False
    h = hyperperiod(ts)
    if h > cap:
        return cap, True
    return h, False


def simulate_global_fp(
    ts: TaskSet,
    horizon: int | None = None,
    cap: int = DEFAULT_CAP,
    *,
    record: bool = True,
    stop_on_miss: bool = False,
) -> SimTrace:
    """Simulate ``ts`` on ``ts.processors`` processors up to ``horizon`` ticks.

    With ``horizon=None`` the hyperperiod is used; if it exceeds ``cap`` the
    run stops at ``cap`` and the trace is marked inconclusive. Misses are
    reported at the absolute deadline of the late job. With ``record=False``
    only misses are kept.
    """
    params = _integer_params(ts)
    end, inconclusive = simulation_horizon(ts, horizon, cap)
    m = ts.processors
    n = len(params)
    wcet = [p[0] for p in params]
    period = [p[1] for p in params]
    rel_deadline = [p[2] for p in params]

    trace = SimTrace(end, inconclusive)
    events = trace.events
    emit = events.append if record else (lambda e: None)

    # per task: deque of [job index, remaining, absolute deadline, missed]
    queues = [deque() for _ in range(n)]
    next_release = [0] * n
    job_count = [0] * n
    running: set[tuple[int, int]] = set()
    now = 0

    while True:
        for i in range(n):
            if next_release[i] == now:
                j = job_count[i]
                job_count[i] += 1
                queues[i].append([j, wcet[i], now + rel_deadline[i], False])
                next_release[i] += period[i]
                emit(Event(now, "release", i, j))
        for i in range(n):
            for job in queues[i]:
                if job[2] == now and not job[3]:
                    job[3] = True
                    ev = Event(now, "miss", i, job[0])
                    trace.misses.append(ev)
                    emit(ev)
        if trace.misses and stop_on_miss:
            break
        if now >= end:
            break

        chosen = [i for i in range(n) if queues[i]][:m]
        if record:
            current = {(i, queues[i][0][0]) for i in chosen}
            for i, j in sorted(running - current):
                if queues[i] and queues[i][0][0] == j:
                    emit(Event(now, "preempt", i, j))
            for i, j in sorted(current - running):
                emit(Event(now, "start", i, j))
            running = current

        step = min(next_release) - now
        step = min(step, end - now)
        for i in chosen:
            step = min(step, queues[i][0][1])
        for q in queues:
            for job in q:
                if not job[3] and job[2] > now:
                    step = min(step, job[2] - now)
                    break
        now += step
        for i in chosen:
            head = queues[i][0]
            head[1] -= step
            if head[1] == 0:
                queues[i].popleft()
                emit(Event(now, "finish", i, head[0]))
    return trace


@njit(cache=True)
def _first_miss_constrained(wcet, period, deadline, m, end):
    # Valid only while D_i <= T_i: before the first miss every task has at
    # most one pending job, so one remaining-work slot per task suffices.
    n = wcet.shape[0]
    remaining = np.zeros(n, dtype=np.int64)
    due = np.zeros(n, dtype=np.int64)
    next_release = np.zeros(n, dtype=np.int64)
    now = 0
    while True:
        for i in range(n):
            if remaining[i] > 0 and due[i] == now:
                return now
        for i in range(n):
            if next_release[i] == now:
                remaining[i] = wcet[i]
                due[i] = now + deadline[i]
                next_release[i] += period[i]
        if now >= end:
            return -1
        step = end - now
        for i in range(n):
            if next_release[i] - now < step:
                step = next_release[i] - now
        busy = 0
        for i in range(n):
            if remaining[i] > 0:
                if busy < m and remaining[i] < step:
                    step = remaining[i]
                busy += 1
                if due[i] - now < step:
                    step = due[i] - now
        busy = 0
        for i in range(n):
            if remaining[i] > 0 and busy < m:
                remaining[i] -= step
                busy += 1
        now += step


def first_miss(ts: TaskSet, horizon: int | None = None, cap: int = DEFAULT_CAP) -> tuple[int | None, bool]:
    """Return ``(time of the first miss or None, inconclusive)``.

    Constrained-deadline sets take a compiled path that tracks only
    remaining work; anything else falls back to :func:`simulate_global_fp`.
    """
    params = _integer_params(ts)
    if any(d > t for _, t, d in params):
        trace = simulate_global_fp(ts, horizon, cap, record=False, stop_on_miss=True)
        return (trace.misses[0].time if trace.misses else None), trace.inconclusive
    end, inconclusive = simulation_horizon(ts, horizon, cap)
    c, t, d = (np.array(col, dtype=np.int64) for col in zip(*params))
    when = int(_first_miss_constrained(c, t, d, ts.processors, end))
    return (None if when < 0 else when), inconclusive
