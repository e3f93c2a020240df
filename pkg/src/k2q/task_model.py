"""Sporadic task and task-set representation.

Priorities are positional: ``tasks[0]`` has the highest priority and the
task under analysis is addressed by its 0-based position ``k``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from numbers import Real
from typing import Sequence

IMPLICIT = "implicit"
CONSTRAINED = "constrained"
ARBITRARY = "arbitrary"

POLICIES = ("rm", "dm", "given")


class TaskSetError(ValueError):
    """Raised for malformed or infeasible task-set input."""


@dataclass(frozen=True)
class Task:
    wcet: Real
    period: Real
    deadline: Real | None = None
    id: str = ""

    def __post_init__(self):
        if self.deadline is None:
            object.__setattr__(self, "deadline", self.period)
        for name in ("wcet", "period", "deadline"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, Real):
                raise TaskSetError(f"task {self.id!r}: {name} must be a number, got {value!r}")
            if not math.isfinite(value) or value <= 0:
                raise TaskSetError(f"task {self.id!r}: {name} must be positive, got {value!r}")

    @property
    def utilization(self):
        if isinstance(self.wcet, (int, Fraction)) and isinstance(self.period, (int, Fraction)):
            return Fraction(self.wcet, self.period)
        return self.wcet / self.period

    @property
    def density(self):
        return self.wcet / self.deadline


def classify(tasks: Sequence[Task]) -> str:
    if all(t.deadline == t.period for t in tasks):
        return IMPLICIT
    if all(t.deadline <= t.period for t in tasks):
        return CONSTRAINED
    return ARBITRARY


@dataclass(frozen=True)
class TaskSet:
    tasks: tuple[Task, ...]
    processors: int = 1
    model: str = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "tasks", tuple(self.tasks))
        if isinstance(self.processors, bool) or not isinstance(self.processors, int) or self.processors < 1:
            raise TaskSetError(f"processors must be a positive integer, got {self.processors!r}")
        for t in self.tasks:
            if t.utilization > 1:
                raise TaskSetError(f"task {t.id!r}: utilization {float(t.utilization):.6g} exceeds 1")
        object.__setattr__(self, "model", classify(self.tasks))

    def __len__(self):
        return len(self.tasks)

    def __iter__(self):
        return iter(self.tasks)

    def __getitem__(self, i):
        return self.tasks[i]

    @property
    def utilization(self):
        return sum(t.utilization for t in self.tasks)

    @property
    def is_integral(self) -> bool:
        return all(
            isinstance(v, int) and not isinstance(v, bool)
            for t in self.tasks
            for v in (t.wcet, t.period, t.deadline)
        )

    def hp(self, k: int) -> tuple[Task, ...]:
        """Tasks with higher priority than ``tasks[k]``."""
        _check_index(self, k)
        return self.tasks[:k]

    def to_dict(self) -> dict:
        return {
            "processors": self.processors,
            "tasks": [
                {"id": t.id, "C": _jsonable(t.wcet), "T": _jsonable(t.period), "D": _jsonable(t.deadline)}
                for t in self.tasks
            ],
        }


def _jsonable(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else float(x)
    return x


def _check_index(ts: TaskSet, k: int) -> None:
    if not 0 <= k < len(ts.tasks):
        raise IndexError(f"task index {k} out of range for {len(ts.tasks)} tasks")


def parse_taskset(document: str | bytes | dict) -> TaskSet:
    """Build a validated :class:`TaskSet` from JSON text (or an already
    decoded mapping) of the form
    ``{"processors": M, "tasks": [{"id": .., "C": .., "T": .., "D": ..}]}``.

    ``"M"`` is accepted as an alias of ``"processors"``; ``"D"`` defaults to
    ``"T"`` when omitted.
    """
    if isinstance(document, (str, bytes)):
        try:
            doc = json.loads(document)
        except json.JSONDecodeError as exc:
            raise TaskSetError(f"malformed JSON: {exc}") from exc
    else:
        doc = document
    if not isinstance(doc, dict):
        raise TaskSetError("task set document must be a JSON object")
    raw_tasks = doc.get("tasks")
    if not isinstance(raw_tasks, list) or not raw_tasks:
        raise TaskSetError("'tasks' must be a nonempty array")
    processors = doc.get("processors", doc.get("M", 1))

    tasks = []
    for i, raw in enumerate(raw_tasks):
        if not isinstance(raw, dict):
            raise TaskSetError(f"task #{i} must be an object")
        try:
            c, t = raw["C"], raw["T"]
        except KeyError as exc:
            raise TaskSetError(f"task #{i} is missing field {exc.args[0]!r}") from None
        d = raw.get("D", t)
        tasks.append(Task(wcet=c, period=t, deadline=d, id=str(raw.get("id", f"t{i + 1}"))))
    return TaskSet(tuple(tasks), processors=processors)


def assign_priorities(ts: TaskSet, policy: str = "given") -> TaskSet:
    """Reorder tasks by RM (period), DM (deadline), or keep the input order.

    Sorting is stable, so ties keep their original relative order.
    """
    policy = policy.lower()
    if policy == "given":
        return ts
    if policy == "rm":
        key = lambda t: t.period
    elif policy == "dm":
        key = lambda t: t.deadline
    else:
        raise ValueError(f"unknown priority policy {policy!r}; expected one of {POLICIES}")
    return replace(ts, tasks=tuple(sorted(ts.tasks, key=key)))


def partition_hp(ts: TaskSet, k: int) -> tuple[tuple[Task, ...], tuple[Task, ...]]:
    """Split hp(tasks[k]) into (period < D_k, period >= D_k)."""
    hp = ts.hp(k)
    dk = ts.tasks[k].deadline
    hp1 = tuple(t for t in hp if t.period < dk)
    hp2 = tuple(t for t in hp if t.period >= dk)
    return hp1, hp2
