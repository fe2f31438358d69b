"""Penalized least-squares segmentation of the mean by dynamic programming.

Exact DP over the within-segment squared-error contrast. Segment costs come
from prefix sums in O(1), so the run is O(n^2 K_max) in time and
O(n K_max) in memory (backtracking table).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import _kernels
from .core import InfeasibleConfig, DomainError, Segmentation, TimeSeries
from .fd import estimate_sigma

__all__ = ["PlscResult", "plsc_costs", "plsc_segment", "select_k", "bic_penalty"]


@dataclass(frozen=True, eq=False)
class PlscResult:
    costs: np.ndarray  # J(K), K = 0..K_max
    configurations: list  # optimal change points for each K
    penalty: float
    selected_k: int
    segmentation: Segmentation

    @property
    def best_by_k(self) -> list:
        return list(zip(self.configurations, self.costs.tolist()))


def _prefix(x: np.ndarray):
    z = x - x.mean()
    c1 = np.concatenate(([0.0], np.cumsum(z)))
    c2 = np.concatenate(([0.0], np.cumsum(z * z)))
    return c1, c2


def plsc_costs(x, k_max: int, min_seg: int = 2):
    """Optimal residual sums of squares and configurations for K = 0..k_max.

    Returns ``(costs, configurations)`` where ``configurations[K]`` lists the
    K change points (1-based, last index of the left segment).
    """
    x = np.asarray(x.values if isinstance(x, TimeSeries) else x, dtype=np.float64)
    n = x.size
    if min_seg < 1:
        raise InfeasibleConfig("min_seg must be >= 1")
    if k_max < 0:
        raise InfeasibleConfig("k_max must be >= 0")
    if (k_max + 1) * min_seg > n:
        raise InfeasibleConfig(
            f"{k_max} change points with segments of >= {min_seg} points do not fit in n = {n}"
        )
    c1, c2 = _prefix(x)
    costs = np.empty(k_max + 1)
    back = np.empty((k_max + 1, n + 1), dtype=np.int64)
    _kernels.segment_dp(c1, c2, k_max, min_seg, costs, back)
    configs = []
    for K in range(k_max + 1):
        cps = []
        t = n
        for k in range(K, 0, -1):
            s = int(back[k, t])
            cps.append(s)
            t = s
        configs.append(cps[::-1])
    return costs, configs


def bic_penalty(x, n: int) -> float:
    """2 sigma^2 log n with the difference-based sigma estimate."""
    return 2.0 * estimate_sigma(x, "diff") ** 2 * math.log(n)


def _slope_heuristic(costs: np.ndarray, threshold: float = 0.75) -> int:
    # largest K whose normalized second difference of J exceeds the threshold
    k_max = costs.size - 1
    if k_max < 2 or costs[0] == costs[-1]:
        return 0
    jt = (costs[-1] - costs) / (costs[-1] - costs[0]) * (k_max - 1) + 1
    d2 = jt[:-2] - 2 * jt[1:-1] + jt[2:]
    ok = np.flatnonzero(d2 > threshold)
    return int(ok.max() + 1) if ok.size else 0


def select_k(costs: np.ndarray, penalty: Union[str, float], x=None) -> tuple:
    """Return ``(K, beta)``; ``beta`` is NaN for the slope heuristic."""
    if isinstance(penalty, str):
        if penalty == "bic":
            beta = bic_penalty(x, np.asarray(x).size)
        elif penalty == "slope":
            return _slope_heuristic(costs), math.nan
        else:
            raise DomainError(f"unknown penalty rule {penalty!r}")
    else:
        beta = float(penalty)
        if beta < 0:
            raise DomainError("penalty must be >= 0")
    crit = costs + beta * np.arange(costs.size)
    return int(np.argmin(crit)), beta


def plsc_segment(series, k_max: int, min_seg: int = 2, penalty: Union[str, float] = "bic") -> PlscResult:
    """Segment ``series`` with at most ``k_max`` mean changes.

    Parameters
    ----------
    penalty : {"bic", "slope"} or float
        ``"bic"`` uses beta = 2 sigma^2 log n, ``"slope"`` the normalized
        second-difference (elbow) rule on J(K), a float a fixed beta.
    """
    x = np.asarray(series.values if isinstance(series, TimeSeries) else series, dtype=np.float64)
    costs, configs = plsc_costs(x, k_max, min_seg)
    k, beta = select_k(costs, penalty, x)
    cps = configs[k]
    bounds = [0, *cps, x.size]
    est = tuple(float(x[lo:hi].mean()) for lo, hi in zip(bounds[:-1], bounds[1:]))
    return PlscResult(costs=costs, configurations=configs, penalty=beta, selected_k=k,
                      segmentation=Segmentation(x.size, cps, est))
