"""Closed-form schedulability and response-time bounds for fixed-priority
real-time scheduling, with exact analyses and simulation to check them."""

from .core import (
    TOL,
    UNBOUNDED,
    Entry,
    KPointInstance,
    NotApplicable,
    ResponseBound,
    Verdict,
)
from .task_model import Task, TaskSet, TaskSetError, assign_priorities, parse_taskset, partition_hp

__version__ = "0.1.0"
