"""Filtered-derivative traces.

``D(k, A) = theta(k, A) - theta(k - A, A)`` where ``theta(k, A)`` estimates the
parameter on the window ``[k + 1, k + A]`` (1-based). Traces are returned for
``k = A..n - A`` so ``trace.values[k - A]`` is ``D(k, A)``. Every trace is built
from compensated rolling sums in one pass over the data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .core import (
    DegenerateWindow,
    DomainError,
    MissingCovariate,
    TimeSeries,
    WindowTooLarge,
)

__all__ = [
    "FDTrace",
    "fd_mean",
    "fd_variance",
    "fd_slope",
    "fd_intercept",
    "slope_null_scale",
    "global_slope",
    "d3_covariance",
    "d3_gamma",
    "write_trace_csv",
]


@dataclass(frozen=True, eq=False)
class FDTrace:
    """Filtered derivative D(k, A) for k = A..n-A and its standard deviation under H0."""

    window: int
    values: np.ndarray
    null_scale: float

    def __post_init__(self):
        if not self.null_scale > 0:
            raise DomainError(f"null scale must be positive, got {self.null_scale}")

    @property
    def n(self) -> int:
        return self.values.size + 2 * self.window - 1

    @property
    def index(self) -> np.ndarray:
        """1-based positions k matching ``values``."""
        return np.arange(self.window, self.window + self.values.size)

    def at(self, k: int) -> float:
        return float(self.values[k - self.window])


def _as_array(series) -> np.ndarray:
    if isinstance(series, TimeSeries):
        return series.values
    return np.asarray(series, dtype=np.float64)


def _check_window(n: int, A: int) -> None:
    if A < 1:
        raise DegenerateWindow(f"window must be positive, got {A}")
    if 2 * A > n:
        raise WindowTooLarge(f"2A = {2 * A} exceeds series length n = {n}")


def _window_means(x: np.ndarray, A: int) -> np.ndarray:
    out = np.empty(x.size - A + 1)
    _kernels.rolling_sums(np.ascontiguousarray(x, dtype=np.float64), A, out)
    out /= A
    return out


def _difference(est: np.ndarray, A: int) -> np.ndarray:
    # est[k] is the estimate on x[k:k+A]; D(k) = est[k] - est[k-A], k = A..n-A
    return est[A:] - est[:-A]


def _diff_sigma(x: np.ndarray) -> float:
    d = np.diff(x)
    return math.sqrt(float(np.dot(d, d)) / (2.0 * d.size))


def estimate_sigma(x: np.ndarray, method: str = "diff") -> float:
    """Noise scale for the mean target.

    ``"diff"`` uses sum((X_{i+1} - X_i)^2) / (2(n-1)), which stays consistent
    when the mean has finitely many jumps; ``"global"`` is the sample std.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.size < 2:
        raise DomainError("need at least two observations to estimate sigma")
    if method == "diff":
        return _diff_sigma(x)
    if method == "global":
        return float(np.std(x, ddof=1))
    raise DomainError(f"unknown sigma estimator {method!r}")


def estimate_regression_sigma(y: np.ndarray) -> float:
    """Noise scale of a piecewise-linear signal from second differences.

    Second differences cancel any locally linear trend; their variance is
    6 sigma^2 for iid noise.
    """
    y = np.asarray(y, dtype=np.float64)
    if y.size < 3:
        raise DomainError("need at least three observations to estimate sigma")
    d2 = y[2:] - 2.0 * y[1:-1] + y[:-2]
    return math.sqrt(float(np.dot(d2, d2)) / (6.0 * d2.size))


def fd_mean(series, A: int, sigma: Optional[float] = None, sigma_estimator: str = "diff") -> FDTrace:
    """Difference of window means, D1(k, A).

    Parameters
    ----------
    series : TimeSeries or array_like
    A : int
        Window width.
    sigma : float, optional
        Known noise standard deviation; estimated when omitted.
    """
    x = _as_array(series)
    _check_window(x.size, A)
    d = _difference(_window_means(x, A), A)
    if sigma is None:
        sigma = estimate_sigma(x, sigma_estimator) if x.size > 1 else 0.0
    scale = sigma * math.sqrt(2.0 / A)
    return FDTrace(A, d, scale if scale > 0 else math.sqrt(2.0 / A))


def fd_variance(series, A: int, mu: Optional[float] = None, nu: Optional[float] = None) -> FDTrace:
    """Difference of window variances, D2(k, A).

    With ``mu`` given the window variance is the average of ``(X_j - mu)^2``;
    otherwise each window is centred on its own mean (biased, divide by A).
    ``nu`` is the standard deviation of ``(X - mu)^2``; when omitted it is the
    sample standard deviation of the squared centred observations.
    """
    x = _as_array(series)
    _check_window(x.size, A)
    if mu is not None:
        sq = (x - mu) ** 2
        var = _window_means(sq, A)
        centred_sq = sq
    else:
        # shift by the global mean to limit cancellation in E[x^2] - E[x]^2
        z = x - x.mean()
        m1 = _window_means(z, A)
        m2 = _window_means(z * z, A)
        var = np.maximum(m2 - m1 * m1, 0.0)
        centred_sq = z * z
    d = _difference(var, A)
    if nu is None:
        nu = float(np.std(centred_sq, ddof=1)) if x.size > 1 else 0.0
    scale = nu * math.sqrt(2.0 / A)
    return FDTrace(A, d, scale if scale > 0 else math.sqrt(2.0 / A))


def slope_null_scale(sigma: float, A: int, delta: float) -> float:
    """Standard deviation of D3 under H0: 2 sqrt(6) sigma / (delta sqrt(A (A^2 - 1)))."""
    return 2.0 * math.sqrt(6.0) * sigma / (delta * math.sqrt(A * (A * A - 1.0)))


def fd_slope(series: TimeSeries, A: int, sigma: Optional[float] = None) -> FDTrace:
    """Difference of window least-squares slopes, D3(k, A).

    The covariate is equidistant, so each window slope is
    ``sum_i (i - (A+1)/2) Y_{k+i} / (delta A (A^2 - 1) / 12)``; the numerator
    is maintained by a rolling recurrence.
    """
    if not isinstance(series, TimeSeries) or not series.regression:
        raise MissingCovariate("slope trace needs a regression-mode TimeSeries")
    if A < 2:
        raise DegenerateWindow(f"slope windows need A >= 2, got {A}")
    y = series.values
    _check_window(y.size, A)
    cm = np.empty(y.size - A + 1)
    _kernels.rolling_centered_moments(np.ascontiguousarray(y), A, cm)
    slopes = cm / (series.delta * A * (A * A - 1.0) / 12.0)
    if sigma is None:
        sigma = estimate_regression_sigma(y) if y.size > 2 else 0.0
    scale = slope_null_scale(sigma, A, series.delta)
    if not scale > 0:
        scale = slope_null_scale(1.0, A, series.delta)
    return FDTrace(A, _difference(slopes, A), scale)


def global_slope(series: TimeSeries) -> float:
    """Full-sample least-squares slope of Y on the covariate."""
    x = series.covariate
    y = series.values
    xc = x - x.mean()
    sxx = float(np.dot(xc, xc))
    if sxx == 0:
        raise DomainError("covariate has no spread")
    return float(np.dot(xc, y - y.mean()) / sxx)


def fd_intercept(
    series: TimeSeries,
    A: int,
    slope: Optional[float] = None,
    sigma: Optional[float] = None,
    sigma_estimator: str = "diff",
) -> FDTrace:
    """Difference of window intercepts, D4(k, A), at known or globally estimated slope.

    ``b(k, A) = mean(Y) - a * mean(X)`` over the window, so the trace is the
    mean trace of the residuals ``Y_j - a X_j``.
    """
    if not isinstance(series, TimeSeries) or not series.regression:
        raise MissingCovariate("intercept trace needs a regression-mode TimeSeries")
    a = global_slope(series) if slope is None else float(slope)
    resid = series.values - a * series.covariate
    return fd_mean(resid, A, sigma=sigma, sigma_estimator=sigma_estimator)


def d3_gamma(i: int, A: int) -> float:
    """Weight of observation ``k + i`` in ``A (A^2 - 1) D3(k, A) / (12 / delta)``."""
    if i > 0:
        return i - (A + 1) / 2.0
    return -i - (A - 1) / 2.0


def _f1(p: int, A: int) -> float:
    return (A - p) * (A * A - 2 * A * p - 2 * p * p - 1) / 6.0 + p * (3 * A * A + 2 * p * p - 6 * A * p + 1) / 12.0


def _f2(p: int, A: int) -> float:
    return -(2 * A - p) * (A * A + 2 * A * p - 2 * p * p - 1) / 12.0


def d3_covariance(lag: int, A: int) -> float:
    """Correlation between standardized D3(k, A) and D3(k + lag, A) under H0."""
    if A < 2:
        raise DomainError(f"A must be >= 2, got {A}")
    if int(lag) != lag:
        raise DomainError(f"lag must be an integer, got {lag}")
    p = abs(int(lag))
    c = 6.0 / (A * (A * A - 1.0))
    if p < A:
        return c * _f1(p, A)
    if p <= 2 * A - 1:
        return c * _f2(p, A)
    return 0.0


def write_trace_csv(trace: FDTrace, path) -> None:
    """Two-column CSV ``k,D`` with a header row."""
    data = np.column_stack((trace.index, trace.values))
    np.savetxt(path, data, delimiter=",", header="k,D", comments="", fmt=["%d", "%.17g"])
