"""Generic k-point last-release machinery.

Everything here works on abstract coefficient instances: for every
higher-priority task the caller supplies ``(alpha, beta, c, u)`` in the
last-release ordering, plus the demand ``ck`` of the task under analysis and
the window ``tk``. The task-model specific modules (:mod:`k2q.uniproc`,
:mod:`k2q.multiproc`) only build such instances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

# Absolute tolerance for comparisons of normalized (ratio) quantities.
TOL = 1e-9


class NotApplicable(ValueError):
    """A bound was requested outside the hypotheses it is proven under."""


@dataclass(frozen=True)
class Entry:
    """Coefficients of one higher-priority task."""

    alpha: float
    beta: float
    c: float
    u: float

    def __post_init__(self):
        if not self.alpha > 0 or not self.beta > 0:
            raise ValueError(f"alpha and beta must be positive: {self}")
        if self.c < 0:
            raise ValueError(f"c must be nonnegative: {self}")
        if not 0 < self.u <= 1:
            raise ValueError(f"u must lie in (0, 1]: {self}")

    @property
    def ratio(self) -> float:
        """beta*c / (alpha*u), the key of the worst-case ordering."""
        return self.beta * self.c / (self.alpha * self.u)


@dataclass(frozen=True)
class KPointInstance:
    entries: tuple[Entry, ...]
    ck: float
    tk: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        if not self.ck > 0:
            raise ValueError(f"ck must be positive, got {self.ck}")
        if self.tk is not None and not self.tk > 0:
            raise ValueError(f"tk must be positive, got {self.tk}")

    @property
    def k(self) -> int:
        return len(self.entries) + 1

    @property
    def alpha_u(self) -> float:
        return math.fsum(e.alpha * e.u for e in self.entries)

    @property
    def beta_c(self) -> float:
        return math.fsum(e.beta * e.c for e in self.entries)

    def reordered(self, entries: Iterable[Entry]) -> "KPointInstance":
        return KPointInstance(tuple(entries), self.ck, self.tk)


@dataclass(frozen=True)
class Verdict:
    """Outcome of a sufficient test.

    ``schedulable`` is True only when the condition is proven. A verdict with
    ``applicable=False`` means the test's hypotheses did not hold; it is not a
    rejection.
    """

    schedulable: bool
    bound: float
    condition: str
    applicable: bool = True
    note: str = field(default="", compare=False)

    @classmethod
    def not_applicable(cls, condition: str, note: str) -> "Verdict":
        return cls(False, math.nan, condition, applicable=False, note=note)

    @property
    def label(self) -> str:
        if not self.applicable:
            return "n/a"
        return "accept" if self.schedulable else "reject"


@dataclass(frozen=True)
class ResponseBound:
    """Safe upper bound on a response time; ``math.inf`` when unbounded."""

    value: float

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.value)

    def __float__(self):
        return float(self.value)


UNBOUNDED = ResponseBound(math.inf)


def tail_sums(entries: Sequence[Entry]) -> list[float]:
    """``out[i] = sum(beta_l * c_l for l >= i)``."""
    out = [0.0] * len(entries)
    acc = 0.0
    for i in range(len(entries) - 1, -1, -1):
        acc += entries[i].beta * entries[i].c
        out[i] = acc
    return out


def _interaction(entries: Sequence[Entry]) -> float:
    # sum_i alpha_i u_i * sum_{l >= i} beta_l c_l
    return math.fsum(e.alpha * e.u * s for e, s in zip(entries, tail_sums(entries)))


def kpoint_test_direct(inst: KPointInstance, points: Sequence[float]) -> Verdict:
    """Evaluate the k-point condition at explicit points ``t_1 <= ... <= t_k``.

    Accepts iff some ``j`` has
    ``ck + sum_i alpha_i t_i u_i + sum_{i<j} beta_i c_i <= t_j``.
    ``bound`` is the largest slack over the points, normalized by ``t_k``.
    """
    if len(points) != inst.k:
        raise ValueError(f"expected {inst.k} points, got {len(points)}")
    if any(b < a for a, b in zip(points, points[1:])):
        raise ValueError("points must be nondecreasing")
    if points[0] < 0 or not points[-1] > 0:
        raise ValueError("points must be nonnegative with t_k > 0")
    tk = points[-1]
    base = inst.ck + math.fsum(e.alpha * t * e.u for e, t in zip(inst.entries, points))
    best = -math.inf
    prefix = 0.0
    for j, tj in enumerate(points):
        best = max(best, (tj - (base + prefix)) / tk)
        if j < len(inst.entries):
            prefix += inst.entries[j].beta * inst.entries[j].c
    return Verdict(best >= -TOL, best, "kpoint-direct")


def quadratic_bound_general(inst: KPointInstance) -> Verdict:
    """General quadratic test for a fixed last-release ordering.

    Accept iff ``ck/tk <= 1 - sum(alpha u) - sum_i(beta_i c_i - alpha_i u_i
    sum_{l>=i} beta_l c_l)/tk``. Requires ``sum(alpha u) <= 1`` and
    ``sum(beta c) <= tk``.
    """
    cond = "quadratic-general"
    if inst.tk is None:
        raise ValueError("quadratic_bound_general needs tk")
    au, bc = inst.alpha_u, inst.beta_c
    if au > 1 + TOL:
        return Verdict.not_applicable(cond, f"sum(alpha*u) = {au:.6g} > 1")
    if bc > inst.tk * (1 + TOL):
        return Verdict.not_applicable(cond, f"sum(beta*c) = {bc:.6g} > tk = {inst.tk:.6g}")
    bound = 1 - au - (bc - _interaction(inst.entries)) / inst.tk
    return Verdict(inst.ck / inst.tk <= bound + TOL, bound, cond)


def implied_min_ck(inst: KPointInstance) -> float:
    """Smallest ``ck`` the closed form would reject, i.e. ``bound * tk``."""
    v = quadratic_bound_general(inst)
    if not v.applicable:
        raise NotApplicable(v.note)
    return v.bound * inst.tk


def worst_case_ordering(entries: Sequence[Entry]) -> list[Entry]:
    """Sort by nonincreasing ``beta c / (alpha u)``; ties keep input order."""
    return sorted(entries, key=lambda e: -e.ratio)


# The same key is the worst case for both the schedulability condition and
# the response bound.
worst_case_ordering_sched = worst_case_ordering
worst_case_ordering_response = worst_case_ordering


def uniform_rhs_nested(u: Sequence[float], alpha: float, beta: float) -> float:
    """``1 - (a+b) sum U + a b sum_i U_i sum_{l>=i} U_l``."""
    total = math.fsum(u)
    acc, tail = 0.0, 0.0
    for x in reversed(u):
        tail += x
        acc += x * tail
    return 1 - (alpha + beta) * total + alpha * beta * acc


def uniform_rhs_closed(u: Sequence[float], alpha: float, beta: float) -> float:
    """``1 - (a+b) sum U + a b ((sum U)^2 + sum U^2) / 2``."""
    total = math.fsum(u)
    squares = math.fsum(x * x for x in u)
    return 1 - (alpha + beta) * total + 0.5 * alpha * beta * (total * total + squares)


def quadratic_bound_uniform(u: Sequence[float], alpha: float, beta: float, ck_over_tk: float) -> Verdict:
    """Quadratic test when every ``alpha_i <= alpha`` and ``beta_i c_i <= beta u_i tk``."""
    if any(not 0 < x <= 1 for x in u):
        raise ValueError("utilizations must lie in (0, 1]")
    bound = uniform_rhs_closed(u, alpha, beta)
    return Verdict(ck_over_tk <= bound + TOL, bound, "quadratic-uniform")


def _check_k(k: int) -> None:
    if k < 2:
        raise ValueError(f"utilization bounds need k >= 2, got {k}")


def util_bound_exclusive(k: int, alpha: float, beta: float, ck_over_tk: float) -> float:
    """Bound on ``sum_{i<k} U_i`` that implies the uniform quadratic test."""
    _check_k(k)
    if ck_over_tk < 0:
        raise ValueError(f"ck/tk must be nonnegative, got {ck_over_tk}")
    ratio = k / (k - 1)
    disc = (alpha + beta) ** 2 - 2 * alpha * beta * (1 - ck_over_tk) * ratio
    if disc < 0:
        raise NotApplicable(f"negative discriminant {disc:.6g} for ck/tk = {ck_over_tk}")
    return ((k - 1) / k) * (alpha + beta - math.sqrt(disc)) / (alpha * beta)


def util_bound_exclusive_limit(alpha: float, beta: float, ck_over_tk: float) -> float:
    return (alpha + beta - math.sqrt(alpha**2 + beta**2 + 2 * alpha * beta * ck_over_tk)) / (alpha * beta)


def util_bound_inclusive(k: int, alpha: float, beta: float) -> float:
    """Bound on ``ck/tk + sum_{i<k} U_i``; needs ``alpha + beta >= 1``."""
    _check_k(k)
    s = alpha + beta
    if s < 1:
        raise NotApplicable(f"alpha + beta = {s} < 1")
    # k > (s^2 - 1)/(alpha^2 + beta^2 - 1), cross-multiplied so that a
    # nonpositive denominator selects the second case.
    if k * (alpha**2 + beta**2 - 1) > s * s - 1:
        disc = s * s - 2 * alpha * beta * k / (k - 1)
        return ((k - 1) / k) * (s - math.sqrt(max(disc, 0.0))) / (alpha * beta)
    return 1 + (k - 1) * ((s - 1) - 0.5 * s * s + 0.5) / (k * alpha * beta)


def util_bound_inclusive_beta(k: int, alpha: float, beta: float) -> float:
    """Bound on ``sum_{i<=k} U_i`` when ``ck/tk = beta U_k``; needs ``alpha + beta >= 1``."""
    _check_k(k)
    if alpha + beta < 1:
        raise NotApplicable(f"alpha + beta = {alpha + beta} < 1")
    if k > (2 * beta + alpha) / alpha:
        disc = alpha**2 + beta**2 - 2 * alpha * beta / (k - 1)
        return ((k - 1) / k) * (alpha + beta - math.sqrt(disc)) / (alpha * beta)
    return 1 / beta - (k - 1) * alpha / (2 * k * beta**2)


def util_bound_inclusive_limit(alpha: float, beta: float) -> float:
    """Limit of :func:`util_bound_inclusive` as ``k`` grows.

    When ``alpha^2 + beta^2 <= 1`` the second case holds for every ``k`` and
    the limit is that branch's, not the square-root form.
    """
    s = alpha + beta
    if alpha**2 + beta**2 <= 1:
        return 1 + ((s - 1) - 0.5 * s * s + 0.5) / (alpha * beta)
    return util_bound_inclusive_beta_limit(alpha, beta)


def util_bound_inclusive_beta_limit(alpha: float, beta: float) -> float:
    return (alpha + beta - math.sqrt(alpha**2 + beta**2)) / (alpha * beta)


def response_bound_general(inst: KPointInstance) -> ResponseBound:
    """Response-time bound for a fixed last-release ordering.

    ``(ck + sum beta c - sum_i alpha_i u_i sum_{l>=i} beta_l c_l) / (1 - sum alpha u)``,
    or :data:`UNBOUNDED` once ``sum alpha u >= 1``.
    """
    au = inst.alpha_u
    if au >= 1:
        return UNBOUNDED
    return ResponseBound((inst.ck + inst.beta_c - _interaction(inst.entries)) / (1 - au))
