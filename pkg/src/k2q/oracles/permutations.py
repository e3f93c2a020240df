"""Exhaustive search over last-release orderings."""

from __future__ import annotations

import itertools
from typing import Sequence

from ..core import Entry

MAX_ENTRIES = 8
OBJECTIVES = ("sched_rhs", "response")


def _cross(order: Sequence[Entry]) -> float:
    total = 0.0
    for i, ei in enumerate(order):
        total += ei.alpha * ei.u * sum(el.beta * el.c for el in order[i:])
    return total


def sched_rhs(order: Sequence[Entry], tk: float) -> float:
    au = sum(e.alpha * e.u for e in order)
    bc = sum(e.beta * e.c for e in order)
    return 1 - au - (bc - _cross(order)) / tk


def response_value(order: Sequence[Entry], ck: float) -> float:
    au = sum(e.alpha * e.u for e in order)
    bc = sum(e.beta * e.c for e in order)
    return (ck + bc - _cross(order)) / (1 - au)


def permutation_minmax(entries: Sequence[Entry], objective: str, *, tk: float = 1.0, ck: float = 1.0):
    """Try every ordering.

    ``objective="sched_rhs"`` returns the ordering minimizing the quadratic
    test's right-hand side; ``"response"`` the one maximizing the response
    bound (which needs ``sum alpha u < 1``). Returns ``(order, value)``.
    """
    if len(entries) > MAX_ENTRIES:
        raise ValueError(f"at most {MAX_ENTRIES} entries, got {len(entries)}")
    if objective == "sched_rhs":
        score = lambda o: sched_rhs(o, tk)
        better = lambda a, b: a < b
    elif objective == "response":
        if sum(e.alpha * e.u for e in entries) >= 1:
            raise ValueError("response objective needs sum(alpha*u) < 1")
        score = lambda o: response_value(o, ck)
        better = lambda a, b: a > b
    else:
        raise ValueError(f"objective must be one of {OBJECTIVES}")
    best_order, best = None, None
    for order in itertools.permutations(entries):
        v = score(order)
        if best is None or better(v, best):
            best_order, best = order, v
    return list(best_order), best
