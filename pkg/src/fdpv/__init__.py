"""Offline multiple change-point detection by Filtered Derivative with p-values.

Detects changes in the mean, variance, regression slope and regression
intercept of a series in linear time and memory, and includes a dynamic
programming least-squares baseline plus a Monte Carlo harness.
"""

from .core import (
    DetectorSpec,
    FdpvError,
    PiecewiseSpec,
    Segmentation,
    Target,
    TimeSeries,
    validate,
)
from .detect import fdpv, step1_extract
from .fd import FDTrace, d3_covariance, fd_intercept, fd_mean, fd_slope, fd_variance
from .plsc import plsc_segment
from .simgen import gen_piecewise_mean, gen_piecewise_regression, monte_carlo
from .thresholds import c_fn, critical_value, detection_probability, gumbel_quantile

__version__ = "0.1.0"

__all__ = [
    "DetectorSpec",
    "FdpvError",
    "FDTrace",
    "PiecewiseSpec",
    "Segmentation",
    "Target",
    "TimeSeries",
    "c_fn",
    "critical_value",
    "d3_covariance",
    "detection_probability",
    "fd_intercept",
    "fd_mean",
    "fd_slope",
    "fd_variance",
    "fdpv",
    "gen_piecewise_mean",
    "gen_piecewise_regression",
    "gumbel_quantile",
    "monte_carlo",
    "plsc_segment",
    "step1_extract",
    "validate",
]
