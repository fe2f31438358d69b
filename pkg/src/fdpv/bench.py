"""Empirical time and memory scaling of FDpV and PLSC."""

from __future__ import annotations

import math
import time
import tracemalloc
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .core import DetectorSpec, DomainError, TimeSeries
from .detect import fdpv
from .plsc import plsc_segment
from .simgen import make_rng

__all__ = ["BenchRow", "BenchTable", "bench", "fit_exponent"]


@dataclass(frozen=True)
class BenchRow:
    n: int
    seconds: float
    peak_mb: float


@dataclass(frozen=True)
class BenchTable:
    method: str
    rows: tuple
    exponent: Optional[float]
    memory_exponent: Optional[float]

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "rows": [r.__dict__ for r in self.rows],
            "time_exponent": self.exponent,
            "memory_exponent": self.memory_exponent,
        }


def fit_exponent(sizes: Sequence[float], values: Sequence[float]) -> float:
    """Least-squares slope of log(values) on log(sizes)."""
    return float(np.polyfit(np.log(sizes), np.log(values), 1)[0])


def default_window(n: int) -> int:
    # grows like sqrt(n) so (log n)^2 / A -> 0 and A / n -> 0
    return max(10, int(round(math.sqrt(n))))


def bench(
    sizes: Sequence[int],
    method: str = "fdpv",
    target: str = "mean",
    window_rule: Callable[[int], int] = default_window,
    repeats: int = 3,
    seed: int = 0,
    k_max: int = 5,
) -> BenchTable:
    """Time ``method`` on iid normal input for each size.

    Wall time is the minimum over ``repeats`` rounds; peak memory is the
    tracemalloc peak of a separate run, excluding the input itself.
    """
    sizes = [int(s) for s in sizes]
    if sorted(sizes) != sizes:
        raise DomainError("sizes must be ascending")
    if method not in ("fdpv", "plsc"):
        raise DomainError(f"unknown method {method!r}")
    runs = {}
    for n in sizes:
        rng = make_rng(seed + n)
        if target in ("slope", "intercept"):
            series = TimeSeries(rng.standard_normal(n), delta=1.0)
        else:
            series = TimeSeries(rng.standard_normal(n))
        if method == "fdpv":
            spec = DetectorSpec(target, window_rule(n), 0.05, 1e-4)
            runs[n] = lambda series=series, spec=spec: fdpv(series, spec)
        else:
            runs[n] = lambda series=series: plsc_segment(series, k_max, 2, "bic")
        runs[n]()  # warm-up (JIT compilation, caches)
    # sizes are interleaved within each round so that slow drifts of the
    # machine affect every size alike
    best = dict.fromkeys(sizes, math.inf)
    for _ in range(repeats):
        for n in sizes:
            t0 = time.perf_counter()
            runs[n]()
            best[n] = min(best[n], time.perf_counter() - t0)
    rows = []
    for n in sizes:
        tracemalloc.start()
        runs[n]()
        peak = tracemalloc.get_traced_memory()[1] / 2**20
        tracemalloc.stop()
        rows.append(BenchRow(n=n, seconds=best[n], peak_mb=peak))
    exp = mexp = None
    if len(rows) > 1:
        exp = fit_exponent([r.n for r in rows], [r.seconds for r in rows])
        mexp = fit_exponent([r.n for r in rows], [r.peak_mb for r in rows])
    return BenchTable(method=method, rows=tuple(rows), exponent=exp, memory_exponent=mexp)
