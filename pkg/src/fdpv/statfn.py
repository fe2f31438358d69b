"""Special functions and reference laws used for thresholds and p-values.

Tail probabilities are evaluated directly (never as ``1 - cdf``) so that
p-values far below machine epsilon, e.g. 1e-12, stay representable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .core import DegenerateVariance, DomainError

__all__ = [
    "TestResult",
    "std_normal_cdf",
    "std_normal_sf",
    "regularized_incomplete_beta",
    "student_t_sf",
    "fisher_f_sf",
    "fisher_f_cdf",
    "welch_df",
]

_SQRT2 = math.sqrt(2.0)
_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 100_000


@dataclass(frozen=True)
class TestResult:
    statistic: float
    df: Union[float, tuple]
    p_value: float

    __test__ = False  # keep pytest from collecting this class


def std_normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / _SQRT2)


def std_normal_sf(x: float) -> float:
    return 0.5 * math.erfc(x / _SQRT2)


def _betacf(a: float, b: float, x: float) -> float:
    # modified Lentz evaluation of the incomplete beta continued fraction
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def _ibeta(a: float, b: float, x: float, y: float) -> float:
    """I_x(a, b) with ``y = 1 - x`` supplied separately to avoid cancellation."""
    if x <= 0.0:
        return 0.0
    if y <= 0.0:
        return 1.0
    log_front = (
        a * math.log(x) + b * math.log(y)
        + math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
    )
    if x < (a + 1.0) / (a + b + 2.0):
        return math.exp(log_front) * _betacf(a, b, x) / a
    return 1.0 - math.exp(log_front) * _betacf(b, a, y) / b


def _ibetac(a: float, b: float, x: float, y: float) -> float:
    """Complement 1 - I_x(a, b), computed without subtracting from one when small."""
    return _ibeta(b, a, y, x)


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b).

    Parameters
    ----------
    a, b : float
        Shape parameters, both > 0.
    x : float
        Evaluation point in [0, 1].

    Raises
    ------
    DomainError
        If the arguments fall outside the domain above.
    """
    if not (a > 0 and b > 0 and math.isfinite(a) and math.isfinite(b)):
        raise DomainError(f"shape parameters must be positive, got a={a}, b={b}")
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x must lie in [0, 1], got {x}")
    return _ibeta(a, b, x, 1.0 - x)


def student_t_sf(t: float, df: float) -> float:
    """Survival function P(T > t) of Student's law with ``df`` degrees of freedom."""
    if not df > 0:
        raise DomainError(f"degrees of freedom must be positive, got {df}")
    if math.isnan(t):
        raise DomainError("t is NaN")
    if math.isinf(t):
        return 0.0 if t > 0 else 1.0
    t2 = t * t
    x = df / (df + t2)
    y = t2 / (df + t2)
    tail = 0.5 * _ibeta(0.5 * df, 0.5, x, y)
    return tail if t >= 0 else 1.0 - tail


def fisher_f_sf(f: float, df1: float, df2: float) -> float:
    """Survival function of the F(df1, df2) law."""
    if not (df1 > 0 and df2 > 0):
        raise DomainError(f"degrees of freedom must be positive, got {df1}, {df2}")
    if not f >= 0:
        raise DomainError(f"F statistic must be >= 0, got {f}")
    if math.isinf(f):
        return 0.0
    u = df1 * f
    # P(F > f) = I_{df2 / (df2 + df1 f)}(df2/2, df1/2)
    return _ibeta(0.5 * df2, 0.5 * df1, df2 / (df2 + u), u / (df2 + u))


def fisher_f_cdf(f: float, df1: float, df2: float) -> float:
    if not (df1 > 0 and df2 > 0):
        raise DomainError(f"degrees of freedom must be positive, got {df1}, {df2}")
    if not f >= 0:
        raise DomainError(f"F statistic must be >= 0, got {f}")
    if math.isinf(f):
        return 1.0
    u = df1 * f
    return _ibeta(0.5 * df1, 0.5 * df2, u / (df2 + u), df2 / (df2 + u))


def welch_df(s2_left: float, s2_right: float, n_left: int, n_right: int) -> int:
    """Floored Welch-Satterthwaite degrees of freedom.

    ``floor((s2l/nl + s2r/nr)^2 / ((s2l/(nl sqrt(nl-1)))^2 + (s2r/(nr sqrt(nr-1)))^2))``
    """
    if n_left < 2 or n_right < 2:
        raise DomainError("both samples need at least two observations")
    if s2_left < 0 or s2_right < 0:
        raise DomainError("variances must be >= 0")
    if s2_left == 0 and s2_right == 0:
        raise DegenerateVariance("both sample variances are zero")
    vl = s2_left / n_left
    vr = s2_right / n_right
    num = (vl + vr) ** 2
    den = vl * vl / (n_left - 1) + vr * vr / (n_right - 1)
    raw = num / den
    # absorb rounding just below an integer, e.g. 17.999999999999996 -> 18
    return int(math.floor(raw * (1.0 + 1e-12)))
