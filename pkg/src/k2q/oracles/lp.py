"""Vertex enumeration for the small linear program behind the quadratic test.

The program, in variables ``x = (t_1, ..., t_{k-1}, s)``::

    minimize   s - sum_i alpha_i u_i t_i - sum_i beta_i c_i
    subject to s - t_j >= sum_{i>=j} beta_i c_i     (j = 1..k-1)
               t_j >= 0                              (j = 1..k-1)
               s >= tk

Its optimum is the smallest demand of the analysed task that is compatible
with missing at every one of the k points. Nothing here reuses the closed
form; every basis of the constraint matrix is tried.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from ..core import KPointInstance, NotApplicable

MAX_ENTRIES = 12
_CHUNK = 4096


def _system(inst: KPointInstance):
    n = inst.k  # k-1 release points plus s
    m = n - 1
    bc = np.array([e.beta * e.c for e in inst.entries], dtype=float)
    tails = np.cumsum(bc[::-1])[::-1] if m else bc
    rows, rhs = [], []
    for j in range(m):
        a = np.zeros(n)
        a[-1], a[j] = 1.0, -1.0
        rows.append(a)
        rhs.append(tails[j])
    for j in range(m):
        a = np.zeros(n)
        a[j] = 1.0
        rows.append(a)
        rhs.append(0.0)
    a = np.zeros(n)
    a[-1] = 1.0
    rows.append(a)
    rhs.append(float(inst.tk))
    cost = np.zeros(n)
    cost[:m] = [-e.alpha * e.u for e in inst.entries]
    cost[-1] = 1.0
    return np.array(rows), np.array(rhs), cost, float(bc.sum())


def lp_vertices(inst: KPointInstance):
    """Yield ``(x, objective)`` for every feasible basic solution."""
    A, b, cost, bc_sum = _system(inst)
    n = A.shape[1]
    scale = max(1.0, float(inst.tk), float(np.abs(b).max()))
    combos = itertools.combinations(range(A.shape[0]), n)
    while True:
        chunk = list(itertools.islice(combos, _CHUNK))
        if not chunk:
            return
        idx = np.array(chunk)
        mats = A[idx]
        dets = np.linalg.det(mats)
        ok = np.abs(dets) > 1e-12
        if not ok.any():
            continue
        xs = np.linalg.solve(mats[ok], b[idx[ok]][..., None])[..., 0]
        slack = xs @ A.T - b
        feasible = (slack >= -1e-9 * scale).all(axis=1)
        for x in xs[feasible]:
            yield x, float(x @ cost - bc_sum)


def lp_min_ck(inst: KPointInstance) -> float:
    """Minimum over all vertices of the program above."""
    if inst.tk is None:
        raise ValueError("instance needs tk")
    if len(inst.entries) > MAX_ENTRIES:
        raise ValueError(f"vertex enumeration is limited to {MAX_ENTRIES} higher-priority entries")
    if inst.alpha_u > 1 + 1e-12:
        raise NotApplicable("sum(alpha*u) > 1: the program is unbounded below")
    if inst.beta_c > inst.tk * (1 + 1e-12):
        raise NotApplicable("sum(beta*c) > tk")
    best = math.inf
    for _, obj in lp_vertices(inst):
        best = min(best, obj)
    return best
