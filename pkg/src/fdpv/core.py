"""Domain types, index conventions and validation.

All indices exposed by this package are 1-based. A change point ``tau`` is the
last index of the left segment, so a segmentation with change points
``tau_1 < ... < tau_K`` has segments ``[tau_{k} + 1, tau_{k+1}]`` with
``tau_0 = 0`` and ``tau_{K+1} = n``.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

__all__ = [
    "FdpvError",
    "WindowTooLarge",
    "NonFinite",
    "MissingCovariate",
    "DomainError",
    "DegenerateVariance",
    "DegenerateWindow",
    "DegenerateDesign",
    "SegmentTooShort",
    "InfeasibleConfig",
    "KMismatch",
    "ParseError",
    "Target",
    "TimeSeries",
    "DetectorSpec",
    "Segmentation",
    "PiecewiseSpec",
    "validate",
]


class FdpvError(ValueError):
    """Base class for all errors raised by this package."""

    exit_code = 1


class WindowTooLarge(FdpvError):
    exit_code = 10


class NonFinite(FdpvError):
    exit_code = 11


class MissingCovariate(FdpvError):
    exit_code = 12


class DomainError(FdpvError):
    exit_code = 13


class DegenerateVariance(FdpvError):
    exit_code = 14


class DegenerateWindow(FdpvError):
    exit_code = 15


class DegenerateDesign(FdpvError):
    exit_code = 16


class SegmentTooShort(FdpvError):
    exit_code = 17


class InfeasibleConfig(FdpvError):
    exit_code = 18


class KMismatch(FdpvError):
    exit_code = 19


class ParseError(FdpvError):
    exit_code = 20

    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(message)
        self.line = line


class Target(str, enum.Enum):
    MEAN = "mean"
    VARIANCE = "variance"
    SLOPE = "slope"
    INTERCEPT = "intercept"

    @property
    def needs_covariate(self) -> bool:
        return self in (Target.SLOPE, Target.INTERCEPT)


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Observed sequence, optionally paired with equidistant abscissae.

    Parameters
    ----------
    values : array_like
        Observations ``X_1..X_n`` (or ``Y_1..Y_n`` in regression mode).
    delta : float, optional
        Sampling step. When given the series is in regression mode and the
        covariate is ``start + (i - 1) * delta`` for ``i = 1..n``.
    start : float, optional
        Abscissa of the first sample; defaults to ``delta`` so that
        ``X_i = i * delta``.
    """

    values: np.ndarray
    delta: Optional[float] = None
    start: Optional[float] = None

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64).ravel()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if values.size < 1:
            raise DomainError("a time series needs at least one value")
        if not np.all(np.isfinite(values)):
            bad = int(np.flatnonzero(~np.isfinite(values))[0]) + 1
            raise NonFinite(f"non-finite value at position {bad}")
        if self.delta is not None:
            delta = float(self.delta)
            if not (delta > 0 and math.isfinite(delta)):
                raise DomainError(f"sampling step must be > 0, got {self.delta}")
            object.__setattr__(self, "delta", delta)
            start = delta if self.start is None else float(self.start)
            if not math.isfinite(start):
                raise NonFinite("covariate origin is not finite")
            object.__setattr__(self, "start", start)
        elif self.start is not None:
            raise MissingCovariate("'start' given without a sampling step")

    def __len__(self) -> int:
        return self.values.size

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def regression(self) -> bool:
        return self.delta is not None

    @property
    def covariate(self) -> np.ndarray:
        if self.delta is None:
            raise MissingCovariate("series has no covariate (not in regression mode)")
        return self.start + self.delta * np.arange(self.n, dtype=np.float64)

    @classmethod
    def from_xy(cls, x: Sequence[float], y: Sequence[float], rtol: float = 1e-8) -> "TimeSeries":
        """Build a regression series from explicit abscissae, which must be equidistant."""
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if x.shape != y.shape:
            raise MissingCovariate(f"covariate length {x.size} != series length {y.size}")
        if not np.all(np.isfinite(x)):
            raise NonFinite("non-finite covariate value")
        if x.size < 2:
            raise DomainError("need at least two points to infer the sampling step")
        steps = np.diff(x)
        delta = float(steps.mean())
        if delta <= 0 or not np.allclose(steps, delta, rtol=rtol, atol=rtol * abs(delta)):
            raise DomainError("covariate must be increasing and equidistant")
        return cls(y, delta=delta, start=float(x[0]))


CALIBRATIONS = ("standardized", "literal")


@dataclass(frozen=True)
class DetectorSpec:
    """Configuration of one FDpV run.

    ``sigma``, ``mu``, ``nu`` and ``slope`` are known nuisance parameters; leave
    them as ``None`` to have them estimated from the data.
    """

    target: Target
    window: int
    level1: float = 0.05
    level2: float = 1e-4
    sigma: Optional[float] = None
    mu: Optional[float] = None
    nu: Optional[float] = None
    slope: Optional[float] = None
    two_sided: bool = True
    # "diff": first-difference estimator robust to mean jumps; "global": sample std
    sigma_estimator: str = "diff"
    # "per-point": estimator variances divided again by segment length; "direct": used as is
    regression_scaling: str = "per-point"
    # "squared": var(b) ~ 1/n + xbar^2/Sxx ; "linear": 1/n + xbar/Sxx
    intercept_variance: str = "squared"
    retest: bool = False
    # "standardized": Gumbel normalizer applied to D / sd(D); "literal": scale / sqrt(A)
    calibration: str = "standardized"

    def __post_init__(self):
        object.__setattr__(self, "target", Target(self.target))
        if int(self.window) != self.window:
            raise DomainError(f"window must be an integer, got {self.window}")
        object.__setattr__(self, "window", int(self.window))
        if self.window < 2:
            raise DegenerateWindow(f"window must be >= 2, got {self.window}")
        for name in ("level1", "level2"):
            p = getattr(self, name)
            if not 0.0 < p < 1.0:
                raise DomainError(f"{name} must lie in (0, 1), got {p}")
        for name in ("sigma", "nu"):
            v = getattr(self, name)
            if v is not None and not (v > 0 and math.isfinite(v)):
                raise DomainError(f"{name} must be positive and finite, got {v}")
        if self.sigma_estimator not in ("diff", "global"):
            raise DomainError(f"unknown sigma estimator {self.sigma_estimator!r}")
        if self.regression_scaling not in ("per-point", "direct"):
            raise DomainError(f"unknown regression scaling {self.regression_scaling!r}")
        if self.intercept_variance not in ("squared", "linear"):
            raise DomainError(f"unknown intercept variance form {self.intercept_variance!r}")
        if self.calibration not in CALIBRATIONS:
            raise DomainError(f"unknown calibration {self.calibration!r}")


def validate(spec: DetectorSpec, series: TimeSeries) -> DetectorSpec:
    """Check that ``spec`` can run on ``series``; return the spec unchanged."""
    if 2 * spec.window > series.n:
        raise WindowTooLarge(
            f"2A = {2 * spec.window} exceeds series length n = {series.n}"
        )
    if spec.target.needs_covariate and not series.regression:
        raise MissingCovariate(f"target {spec.target.value!r} needs regression data")
    return spec


Estimate = Union[float, tuple]


@dataclass(frozen=True, eq=False)
class Segmentation:
    """Final change points with one parameter estimate per segment."""

    n: int
    change_points: np.ndarray
    segment_estimates: tuple = field(default_factory=tuple)

    def __post_init__(self):
        cps = np.asarray(self.change_points, dtype=np.int64).ravel()
        cps.setflags(write=False)
        object.__setattr__(self, "change_points", cps)
        if self.n < 1:
            raise DomainError("n must be >= 1")
        if cps.size and (cps[0] < 1 or cps[-1] > self.n - 1 or np.any(np.diff(cps) <= 0)):
            raise DomainError("change points must be strictly increasing in [1, n-1]")
        est = tuple(
            tuple(float(v) for v in e) if isinstance(e, (tuple, list, np.ndarray)) else float(e)
            for e in self.segment_estimates
        )
        if est and len(est) != cps.size + 1:
            raise DomainError(
                f"{len(est)} segment estimates for {cps.size + 1} segments"
            )
        object.__setattr__(self, "segment_estimates", est)

    @property
    def n_changes(self) -> int:
        return int(self.change_points.size)

    @property
    def boundaries(self) -> np.ndarray:
        """``[0, tau_1, ..., tau_K, n]``."""
        return np.concatenate(([0], self.change_points, [self.n])).astype(np.int64)

    def segments(self) -> list[tuple[int, int]]:
        """1-based inclusive ``(start, end)`` pairs tiling ``1..n``."""
        b = self.boundaries
        return [(int(b[i]) + 1, int(b[i + 1])) for i in range(b.size - 1)]

    def piecewise(self) -> np.ndarray:
        """Length-``n`` array holding each segment's (scalar) estimate."""
        if not self.segment_estimates:
            raise DomainError("segmentation carries no estimates")
        lengths = np.diff(self.boundaries)
        vals = [e if isinstance(e, float) else e[0] for e in self.segment_estimates]
        return np.repeat(np.asarray(vals, dtype=np.float64), lengths)

    def to_dict(self) -> dict:
        segs = []
        for (start, end), est in zip(self.segments(), self.segment_estimates or [None] * (self.n_changes + 1)):
            segs.append({"start": start, "end": end, "estimate": list(est) if isinstance(est, tuple) else est})
        return {"n": int(self.n), "change_points": [int(c) for c in self.change_points], "segments": segs}

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, d: dict) -> "Segmentation":
        segs = d.get("segments", [])
        bounds = [s["end"] for s in segs[:-1]]
        if segs and [int(b) for b in bounds] != [int(c) for c in d["change_points"]]:
            raise DomainError("segments disagree with change points")
        est = tuple(
            tuple(s["estimate"]) if isinstance(s["estimate"], list) else s["estimate"]
            for s in segs
            if s.get("estimate") is not None
        )
        return cls(n=int(d["n"]), change_points=d["change_points"], segment_estimates=est)

    @classmethod
    def from_json(cls, text: str) -> "Segmentation":
        return cls.from_dict(json.loads(text))

    def __eq__(self, other):
        if not isinstance(other, Segmentation):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.change_points, other.change_points)
            and self.segment_estimates == other.segment_estimates
        )


@dataclass(frozen=True, eq=False)
class PiecewiseSpec:
    """Ground truth for synthetic data.

    ``params`` holds one value per segment: the mean, the variance, or the
    slope (mean, variance, slope targets); for the intercept target it holds
    intercepts. ``slopes`` / ``intercept`` carry the fixed companion parameter
    of the regression models.
    """

    n: int
    change_points: np.ndarray
    params: np.ndarray
    sigma: float = 1.0
    target: Target = Target.MEAN
    delta: float = 1.0
    intercept: float = 0.0
    slope: float = 0.0

    def __post_init__(self):
        cps = np.asarray(self.change_points, dtype=np.int64).ravel()
        params = np.asarray(self.params, dtype=np.float64).ravel()
        object.__setattr__(self, "change_points", cps)
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "target", Target(self.target))
        if cps.size and (cps[0] < 1 or cps[-1] > self.n - 1 or np.any(np.diff(cps) <= 0)):
            raise DomainError("change points must be strictly increasing in [1, n-1]")
        if params.size != cps.size + 1:
            raise DomainError(f"need {cps.size + 1} segment parameters, got {params.size}")
        if self.sigma < 0:
            raise DomainError("sigma must be >= 0")

    @property
    def boundaries(self) -> np.ndarray:
        return np.concatenate(([0], self.change_points, [self.n])).astype(np.int64)

    @property
    def min_segment_length(self) -> int:
        return int(np.diff(self.boundaries).min())

    @property
    def jumps(self) -> np.ndarray:
        return np.abs(np.diff(self.params))

    def piecewise(self) -> np.ndarray:
        return np.repeat(self.params, np.diff(self.boundaries))

    def as_segmentation(self) -> Segmentation:
        return Segmentation(self.n, self.change_points, tuple(self.params))
