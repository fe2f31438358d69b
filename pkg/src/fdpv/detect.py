"""The two-step FDpV pipeline.

Step 1 extracts candidate change points as thresholded peaks of ``|D(k, A)|``.
Step 2 runs a two-sample test between the segments on either side of each
candidate and keeps the candidates whose p-value falls below ``level2``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import (
    DegenerateDesign,
    DegenerateVariance,
    DetectorSpec,
    DomainError,
    MissingCovariate,
    Segmentation,
    SegmentTooShort,
    Target,
    TimeSeries,
    validate,
)
from .fd import (
    FDTrace,
    estimate_regression_sigma,
    estimate_sigma,
    fd_intercept,
    fd_mean,
    fd_slope,
    fd_variance,
    global_slope,
)
from .statfn import fisher_f_cdf, fisher_f_sf, student_t_sf, welch_df
from .thresholds import ThresholdSpec, critical_value

__all__ = [
    "StepOneResult",
    "StepTwoRecord",
    "FdpvResult",
    "step1_extract",
    "step2_test_mean",
    "step2_test_variance",
    "step2_test_regression",
    "compute_trace",
    "nuisance_scale",
    "segment_estimates",
    "fdpv",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class StepOneResult:
    candidates: np.ndarray
    statistics: np.ndarray
    threshold_used: float

    @property
    def k_max(self) -> int:
        return int(self.candidates.size)


@dataclass(frozen=True)
class StepTwoRecord:
    candidate: int
    left_segment: tuple
    right_segment: tuple
    estimates: tuple
    dispersions: tuple
    statistic: float
    df: float
    p_value: float
    kept: bool = False

    def to_dict(self) -> dict:
        return {
            "candidate": self.candidate,
            "left_segment": list(self.left_segment),
            "right_segment": list(self.right_segment),
            "estimates": list(self.estimates),
            "dispersions": list(self.dispersions),
            "statistic": self.statistic,
            "df": self.df,
            "p_value": self.p_value,
            "kept": self.kept,
        }


@dataclass(frozen=True, eq=False)
class FdpvResult:
    step1: StepOneResult
    step2: list
    segmentation: Segmentation
    trace: FDTrace
    threshold: ThresholdSpec

    def __iter__(self):
        # unpacks as (step1, step2, segmentation)
        return iter((self.step1, self.step2, self.segmentation))


def step1_extract(trace: FDTrace, C1: float) -> StepOneResult:
    """Iterative peak extraction on ``|D|``.

    Take the argmax of ``|D|`` (smallest index on ties); while it exceeds
    ``C1`` record it and zero the open interval ``(tau - A, tau + A)``.
    The input trace is left untouched.
    """
    if not C1 > 0:
        raise DomainError(f"C1 must be positive, got {C1}")
    A = trace.window
    work = np.abs(trace.values)
    found = []
    stats = []
    while work.size:
        pos = int(np.argmax(work))
        value = work[pos]
        if not value > C1:
            break
        found.append(pos + A)
        stats.append(float(value))
        work[max(0, pos - A + 1): pos + A] = 0.0
    order = np.argsort(found, kind="stable")
    return StepOneResult(
        candidates=np.asarray(found, dtype=np.int64)[order],
        statistics=np.asarray(stats, dtype=np.float64)[order],
        threshold_used=float(C1),
    )


def _slice(series, seg) -> np.ndarray:
    x = series.values if isinstance(series, TimeSeries) else np.asarray(series, dtype=np.float64)
    start, end = seg
    return x[start - 1:end]


def _check_segment(seg, min_len: int) -> int:
    length = seg[1] - seg[0] + 1
    if length < min_len:
        raise SegmentTooShort(f"segment {seg} has {length} points, need {min_len}")
    return length


def _t_p_value(stat: float, df: float, two_sided: bool) -> float:
    p = student_t_sf(stat, df)
    return min(1.0, 2.0 * p) if two_sided else p


def step2_test_mean(series, left, right, two_sided: bool = True) -> StepTwoRecord:
    """Welch two-sample test of equal means between two 1-based inclusive segments."""
    nl = _check_segment(left, 2)
    nr = _check_segment(right, 2)
    xl = _slice(series, left)
    xr = _slice(series, right)
    ml, mr = float(xl.mean()), float(xr.mean())
    vl, vr = float(xl.var(ddof=1)), float(xr.var(ddof=1))
    diff = abs(ml - mr)
    se2 = vl / nl + vr / nr
    if se2 == 0.0:
        stat = 0.0 if diff == 0.0 else math.inf
        return StepTwoRecord(left[1], tuple(left), tuple(right), (ml, mr), (vl, vr),
                             stat, math.nan, 1.0 if diff == 0.0 else 0.0)
    stat = diff / math.sqrt(se2)
    df = welch_df(vl, vr, nl, nr)
    return StepTwoRecord(left[1], tuple(left), tuple(right), (ml, mr), (vl, vr),
                         stat, float(df), _t_p_value(stat, df, two_sided))


def step2_test_variance(series, left, right) -> StepTwoRecord:
    """Two-sided F test of equal variances."""
    nl = _check_segment(left, 2)
    nr = _check_segment(right, 2)
    xl = _slice(series, left)
    xr = _slice(series, right)
    vl, vr = float(xl.var(ddof=1)), float(xr.var(ddof=1))
    if vr == 0.0:
        raise DegenerateVariance(f"right segment {right} has zero variance")
    f = vl / vr
    sf = fisher_f_sf(f, nl - 1, nr - 1)
    cdf = fisher_f_cdf(f, nl - 1, nr - 1)
    p = min(1.0, 2.0 * min(sf, cdf))
    return StepTwoRecord(left[1], tuple(left), tuple(right), (vl, vr), (float(nl - 1), float(nr - 1)),
                         f, (nl - 1, nr - 1), p)


def _ols(x: np.ndarray, y: np.ndarray, intercept_variance: str = "squared"):
    n = x.size
    xbar = float(x.mean())
    xc = x - xbar
    sxx = float(np.dot(xc, xc))
    if sxx <= 0.0:
        raise DegenerateDesign("segment covariate has no spread")
    ybar = float(y.mean())
    a = float(np.dot(xc, y - ybar)) / sxx
    b = ybar - a * xbar
    resid = y - (a * x + b)
    s2 = float(np.dot(resid, resid)) / (n - 2)
    var_a = s2 / sxx
    xfac = xbar * xbar if intercept_variance == "squared" else xbar
    var_b = s2 * (1.0 / n + xfac / sxx)
    return a, b, var_a, var_b


def step2_test_regression(
    series: TimeSeries,
    left,
    right,
    which="slope",
    two_sided: bool = True,
    scaling: str = "per-point",
    intercept_variance: str = "squared",
) -> StepTwoRecord:
    """Compare slopes (or intercepts) of least-squares fits on two segments.

    The statistic is ``|th_l - th_r| / sqrt(v_l / n_l + v_r / n_r)`` where
    ``v`` is the estimated variance of the slope (intercept) estimator, with
    floored Welch degrees of freedom built from the same terms. With
    ``scaling="direct"`` the estimator variances are used without the extra
    division by the segment lengths.
    """
    if not isinstance(series, TimeSeries) or not series.regression:
        raise MissingCovariate("regression test needs a regression-mode TimeSeries")
    which = Target(which)
    if which not in (Target.SLOPE, Target.INTERCEPT):
        raise DomainError(f"regression test compares slope or intercept, not {which.value}")
    nl = _check_segment(left, 3)
    nr = _check_segment(right, 3)
    x = series.covariate
    fl = _ols(_slice(x, left), _slice(series, left), intercept_variance)
    fr = _ols(_slice(x, right), _slice(series, right), intercept_variance)
    j = 0 if which is Target.SLOPE else 1
    tl, tr = fl[j], fr[j]
    vl, vr = fl[2 + j], fr[2 + j]
    diff = abs(tl - tr)
    if scaling == "per-point":
        se2 = vl / nl + vr / nr
        dfl, dfr = vl, vr
    else:
        se2 = vl + vr
        dfl, dfr = vl * nl, vr * nr
    if se2 == 0.0:
        stat = 0.0 if diff == 0.0 else math.inf
        return StepTwoRecord(left[1], tuple(left), tuple(right), (fl[:2], fr[:2]), (vl, vr),
                             stat, math.nan, 1.0 if diff == 0.0 else 0.0)
    stat = diff / math.sqrt(se2)
    df = welch_df(dfl, dfr, nl, nr)
    return StepTwoRecord(left[1], tuple(left), tuple(right), (fl[:2], fr[:2]), (vl, vr),
                         stat, float(df), _t_p_value(stat, df, two_sided))


def nuisance_scale(series: TimeSeries, spec: DetectorSpec) -> float:
    """Noise scale entering the Step-1 threshold: sigma, or nu for the variance target."""
    t = spec.target
    x = series.values
    if t is Target.MEAN:
        return spec.sigma if spec.sigma is not None else estimate_sigma(x, spec.sigma_estimator)
    if t is Target.VARIANCE:
        if spec.nu is not None:
            return spec.nu
        c = x - (spec.mu if spec.mu is not None else x.mean())
        return float(np.std(c * c, ddof=1))
    if t is Target.SLOPE:
        return spec.sigma if spec.sigma is not None else estimate_regression_sigma(x)
    if spec.sigma is not None:
        return spec.sigma
    a = spec.slope if spec.slope is not None else global_slope(series)
    return estimate_sigma(x - a * series.covariate, spec.sigma_estimator)


def compute_trace(series: TimeSeries, spec: DetectorSpec, scale: Optional[float] = None) -> FDTrace:
    validate(spec, series)
    A = spec.window
    t = spec.target
    if scale is None:
        scale = nuisance_scale(series, spec)
    if t is Target.MEAN:
        return fd_mean(series, A, sigma=scale)
    if t is Target.VARIANCE:
        return fd_variance(series, A, mu=spec.mu, nu=scale)
    if t is Target.SLOPE:
        return fd_slope(series, A, sigma=scale)
    return fd_intercept(series, A, slope=spec.slope, sigma=scale)


def segment_estimates(series: TimeSeries, target, boundaries: Sequence[int]) -> tuple:
    """Per-segment parameter estimates on ``[b_i + 1, b_{i+1}]``."""
    target = Target(target)
    x = series.values
    out = []
    cov = series.covariate if target.needs_covariate else None
    for lo, hi in zip(boundaries[:-1], boundaries[1:]):
        seg = x[lo:hi]
        if target is Target.MEAN:
            out.append(float(seg.mean()))
        elif target is Target.VARIANCE:
            out.append(float(seg.var(ddof=1)) if seg.size > 1 else 0.0)
        else:
            xs = cov[lo:hi]
            if seg.size < 2:
                out.append((0.0, float(seg[0])))
                continue
            xc = xs - xs.mean()
            a = float(np.dot(xc, seg - seg.mean()) / np.dot(xc, xc))
            out.append((a, float(seg.mean() - a * xs.mean())))
    return tuple(out)


def _run_tests(series, spec: DetectorSpec, candidates) -> list:
    n = series.n
    bounds = [0, *[int(c) for c in candidates], n]
    min_len = 3 if spec.target.needs_covariate else 2
    records = []
    for i in range(1, len(bounds) - 1):
        left = (bounds[i - 1] + 1, bounds[i])
        right = (bounds[i] + 1, bounds[i + 1])
        if min(left[1] - left[0], right[1] - right[0]) + 1 < min_len:
            log.warning("candidate %d: segment shorter than %d points, rejected", bounds[i], min_len)
            records.append(StepTwoRecord(bounds[i], left, right, (), (), math.nan, math.nan, 1.0))
            continue
        t = spec.target
        if t is Target.MEAN:
            rec = step2_test_mean(series, left, right, spec.two_sided)
        elif t is Target.VARIANCE:
            try:
                rec = step2_test_variance(series, left, right)
            except DegenerateVariance:
                vl = float(_slice(series, left).var(ddof=1))
                rec = StepTwoRecord(bounds[i], left, right, (vl, 0.0), (), math.inf if vl > 0 else math.nan,
                                    math.nan, 0.0 if vl > 0 else 1.0)
        else:
            rec = step2_test_regression(
                series, left, right, t, spec.two_sided, spec.regression_scaling, spec.intercept_variance
            )
        records.append(rec)
    return records


def _mark(records, level2):
    return [
        StepTwoRecord(**{**r.__dict__, "kept": bool(r.p_value < level2)}) for r in records
    ]


def fdpv(series: TimeSeries, spec: DetectorSpec, trace: Optional[FDTrace] = None) -> FdpvResult:
    """Run both steps and build the final segmentation.

    Each candidate is tested against its neighbouring candidates (kept or
    not), so the tests do not depend on one another. With ``spec.retest``
    one extra pass re-tests the survivors against the surviving neighbours.
    """
    if not isinstance(series, TimeSeries):
        series = TimeSeries(series)
    validate(spec, series)
    scale = nuisance_scale(series, spec)
    if trace is None:
        trace = compute_trace(series, spec, scale)
    th = critical_value(
        spec.target, series.n, spec.window, spec.level1,
        scale if scale > 0 else 1e-300, series.delta or 1.0, spec.calibration,
    )
    s1 = step1_extract(trace, th.critical_value)
    records = _mark(_run_tests(series, spec, s1.candidates), spec.level2)
    kept = [r.candidate for r in records if r.kept]
    if spec.retest and kept:
        retested = _mark(_run_tests(series, spec, kept), spec.level2)
        kept = [r.candidate for r in retested if r.kept]
        survivors = set(kept)
        records = [
            StepTwoRecord(**{**r.__dict__, "kept": r.candidate in survivors}) for r in records
        ]
    bounds = [0, *kept, series.n]
    seg = Segmentation(series.n, kept, segment_estimates(series, spec.target, bounds))
    return FdpvResult(step1=s1, step2=records, segmentation=seg, trace=trace, threshold=th)
