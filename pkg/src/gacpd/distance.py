"""Distance between two changepoint configurations of the same series.

``d(C1, C2) = |m1 - m2| + min assignment cost``, where the smaller location
set is matched injectively into the larger one at cost ``|tau_i - tau_j| / N``
per pair.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .core import ConfigError


def solve_assignment(cost) -> tuple[np.ndarray, float]:
    """Optimal injective assignment of rows to columns of an ``a x b`` matrix, ``a <= b``.

    Returns the column assigned to each row and the total cost.
    """
    cost = np.asarray(cost)
    if cost.ndim != 2 or cost.shape[0] > cost.shape[1]:
        raise ValueError(f"expected an a x b cost matrix with a <= b, got shape {cost.shape}")
    if cost.shape[0] == 0:
        return np.zeros(0, dtype=int), 0
    rows, cols = linear_sum_assignment(cost)
    assignment = np.empty(cost.shape[0], dtype=int)
    assignment[rows] = cols
    return assignment, cost[rows, cols].sum()


def _as_taus(tau: Optional[Sequence[int]], n: int, name: str) -> np.ndarray:
    if tau is None:
        return np.zeros(0, dtype=np.int64)
    arr = np.asarray(list(tau), dtype=np.int64)
    if arr.size and (arr.min() < 2 or arr.max() > n):
        raise ConfigError(f"{name} has locations outside [2, N={n}]: {arr.tolist()}")
    return arr


def cpt_dist(tau1: Optional[Sequence[int]], tau2: Optional[Sequence[int]], n: int) -> float:
    """Changepoint configuration distance; ``None`` or empty means no changepoints."""
    if n < 2:
        raise ConfigError(f"N must be at least 2, got {n}")
    a, b = _as_taus(tau1, n, "tau1"), _as_taus(tau2, n, "tau2")
    if a.size > b.size:
        a, b = b, a
    count_term = b.size - a.size
    if a.size == 0:
        return float(count_term)
    # integer costs keep the optimum exact; divide once at the end
    cost = np.abs(a[:, None] - b[None, :])
    _, total = solve_assignment(cost)
    return count_term + int(total) / n
