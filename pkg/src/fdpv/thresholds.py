"""Step-1 critical values from the Gumbel-type limit of max |D| under H0,
and the detection probability of a known change point."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import CALIBRATIONS, DomainError, Target
from .fd import slope_null_scale
from .statfn import std_normal_cdf, std_normal_sf

__all__ = [
    "ThresholdSpec",
    "gumbel_quantile",
    "c_fn",
    "critical_value",
    "detection_probability",
]


@dataclass(frozen=True)
class ThresholdSpec:
    level: float
    gumbel_x: float
    normalizer: float
    critical_value: float

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "x": self.gumbel_x,
            "normalizer": self.normalizer,
            "C1": self.critical_value,
        }


def gumbel_quantile(p1: float) -> float:
    """Solve exp(-2 exp(-x)) = 1 - p1 for x."""
    if not 0.0 < p1 < 1.0:
        raise DomainError(f"level must lie in (0, 1), got {p1}")
    return -math.log(-math.log1p(-p1) / 2.0)


def c_fn(y: float, x: float) -> float:
    """(x + 2 log y + log(log y)/2 - log(pi)/2) / sqrt(2 log y), defined for y > e."""
    if not y > math.e:
        raise DomainError(
            f"normalizer needs y > e (got y = {y}); use a smaller window relative to n"
        )
    ly = math.log(y)
    return (x + 2.0 * ly + 0.5 * math.log(ly) - 0.5 * math.log(math.pi)) / math.sqrt(2.0 * ly)


def critical_value(
    target, n: int, A: int, level: float, scale: float, delta: float = 1.0,
    calibration: str = "standardized",
) -> ThresholdSpec:
    """Threshold C1 with P(max_k |D(k, A)| > C1 | H0) ~ level.

    ``scale`` is sigma for the mean, intercept and slope targets and nu for
    the variance target. The slope target uses ``c(A, x)`` times the null
    standard deviation of the slope trace, the others ``c(n / A - 1, x)``.

    Under H0, ``sqrt(A) D / scale`` has variance 2 for the mean, variance and
    intercept traces. ``calibration="standardized"`` (default) applies the
    normalizer to the unit-variance trace, ``C1 = sqrt(2/A) scale c``;
    ``"literal"`` uses ``C1 = scale / sqrt(A) c``, whose false-alarm rate
    is far above ``level`` at practical sizes (about 0.6 instead of 0.05 for
    n = 5000, A = 300).

    Examples
    --------
    >>> round(critical_value("mean", 5000, 300, 0.05, 1.0, calibration="literal").critical_value, 4)
    0.224
    >>> round(critical_value("mean", 5000, 300, 0.05, 1.0).critical_value, 4)
    0.3167
    """
    target = Target(target)
    if calibration not in CALIBRATIONS:
        raise DomainError(f"unknown calibration {calibration!r}")
    if not scale > 0:
        raise DomainError(f"scale must be positive, got {scale}")
    x = gumbel_quantile(level)
    if target is Target.SLOPE:
        norm = c_fn(A, x)
        c1 = slope_null_scale(scale, A, delta) * norm
    else:
        norm = c_fn(n / A - 1.0, x)
        c1 = scale / math.sqrt(A) * norm
        if calibration == "standardized":
            c1 *= math.sqrt(2.0)
    return ThresholdSpec(level=level, gumbel_x=x, normalizer=norm, critical_value=c1)


def detection_probability(target, delta_jump: float, C1: float, A: int, scale: float, step: float = 1.0) -> float:
    """P(|D(tau, A)| >= C1) for a jump of size ``delta_jump`` at a known tau.

    D(tau, A) is Gaussian with mean ``delta_jump`` and standard deviation
    sigma sqrt(2/A) (mean, intercept, variance with ``scale = nu``) or
    2 sqrt(6) sigma / (step sqrt(A (A^2 - 1))) (slope).
    """
    target = Target(target)
    if not C1 > 0:
        raise DomainError(f"C1 must be positive, got {C1}")
    if target is Target.SLOPE:
        sd = slope_null_scale(scale, A, step)
    else:
        sd = math.sqrt(2.0) * scale / math.sqrt(A)
    upper = std_normal_sf((C1 - delta_jump) / sd)
    lower = std_normal_cdf((-C1 - delta_jump) / sd)
    return min(1.0, upper + lower)
