"""Random task-set synthesis."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .task_model import Task, TaskSet, assign_priorities

MAX_ATTEMPTS = 10_000


class GenerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class GenConfig:
    n: int
    total_util: float
    period_range: tuple[float, float] = (1.0, 1000.0)
    deadline_ratio_range: tuple[float, float] = (1.0, 1.0)
    processors: int = 1
    integer_mode: bool = False
    seed: int = 0
    policy: str = "rm"

    def __post_init__(self):
        object.__setattr__(self, "period_range", tuple(self.period_range))
        object.__setattr__(self, "deadline_ratio_range", tuple(self.deadline_ratio_range))
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not 0 < self.total_util <= min(self.processors, self.n):
            raise ValueError(f"total_util must lie in (0, min(M, n)], got {self.total_util}")
        lo, hi = self.period_range
        if not 0 < lo <= hi:
            raise ValueError(f"bad period range {self.period_range}")
        dlo, dhi = self.deadline_ratio_range
        if not 0 < dlo <= dhi:
            raise ValueError(f"bad deadline ratio range {self.deadline_ratio_range}")

    @classmethod
    def from_json(cls, text: str) -> "GenConfig":
        return cls(**json.loads(text))

    def to_json(self) -> str:
        return json.dumps(asdict(self))


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def uunifast(n: int, total_util: float, seed=None) -> list[float]:
    """UUniFast, discarding draws where any task exceeds utilization 1."""
    if n < 1 or total_util <= 0:
        raise ValueError("need n >= 1 and total_util > 0")
    if total_util > n:
        raise ValueError(f"total utilization {total_util} is infeasible for {n} tasks")
    if total_util == n:
        return [1.0] * n  # the only feasible split
    rng = _rng(seed)
    for _ in range(MAX_ATTEMPTS):
        utils = []
        remaining = total_util
        for i in range(1, n):
            nxt = remaining * rng.random() ** (1.0 / (n - i))
            utils.append(remaining - nxt)
            remaining = nxt
        utils.append(remaining)
        if max(utils) <= 1:
            return utils
    raise GenerationError(f"UUniFast could not keep every utilization <= 1 for n={n}, U={total_util}")


def _draw(cfg: GenConfig, rng: np.random.Generator):
    utils = uunifast(cfg.n, cfg.total_util, rng)
    lo, hi = cfg.period_range
    periods = np.exp(rng.uniform(math.log(lo), math.log(hi), cfg.n))
    ratios = rng.uniform(*cfg.deadline_ratio_range, cfg.n)
    tasks = []
    for i, (u, p, r) in enumerate(zip(utils, periods, ratios)):
        if cfg.integer_mode:
            period = max(1, int(round(p)))
            wcet = int(math.floor(u * period))
            if wcet == 0:
                # redraw this period from the part of the range where C >= 1
                floor_p = max(lo, 1.0 / u)
                if floor_p > hi:
                    return None
                period = int(math.ceil(math.exp(rng.uniform(math.log(floor_p), math.log(hi)))))
                wcet = int(math.floor(u * period))
                if wcet == 0:
                    return None
            deadline = period if r == 1 else max(1, int(round(r * period)))
        else:
            period, wcet, deadline = float(p), float(u * p), float(r * p)
        tasks.append(Task(wcet, period, deadline, id=f"t{i + 1}"))
    return tasks


def gen_taskset(cfg: GenConfig, rng=None) -> TaskSet:
    """Draw one task set; ``rng`` overrides ``cfg.seed`` when given."""
    rng = _rng(cfg.seed if rng is None else rng)
    for _ in range(MAX_ATTEMPTS):
        tasks = _draw(cfg, rng)
        if tasks is not None:
            return assign_priorities(TaskSet(tuple(tasks), processors=cfg.processors), cfg.policy)
    raise GenerationError(f"integer rounding kept producing zero WCETs for {cfg}")
