"""Synthetic piecewise models, error metrics and the Monte Carlo harness."""

from __future__ import annotations

import json
import os
import time
import tracemalloc
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .core import DetectorSpec, DomainError, KMismatch, PiecewiseSpec, Segmentation, Target, TimeSeries
from .detect import fdpv, segment_estimates
from .plsc import plsc_segment

__all__ = [
    "RNG_ALGORITHM",
    "make_rng",
    "Scenario",
    "MCReport",
    "gen_piecewise_mean",
    "gen_piecewise_regression",
    "draw_truth",
    "mise",
    "change_point_se",
    "monte_carlo",
    "load_scenario",
    "builtin_scenario",
]

# counter-based bit generator: replication i uses key base_seed + i
RNG_ALGORITHM = "numpy.random.Philox"


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(int(seed)))


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else make_rng(seed)


def gen_piecewise_mean(spec: PiecewiseSpec, seed) -> TimeSeries:
    """X_i = mu_k + sigma * eps_i on each segment (mean target) or
    X_i = sqrt(v_k) * eps_i (variance target)."""
    rng = _rng(seed)
    eps = rng.standard_normal(spec.n)
    path = spec.piecewise()
    if spec.target is Target.VARIANCE:
        return TimeSeries(np.sqrt(path) * eps)
    return TimeSeries(path + spec.sigma * eps)


def regression_mean(spec: PiecewiseSpec, continuous: bool = False) -> np.ndarray:
    """Noise-free response of a piecewise regression model.

    Slope target: ``Y = a_k X + b`` with the common intercept ``spec.intercept``;
    with ``continuous=True`` the intercept of each segment is shifted so that
    consecutive lines meet at the change point. Intercept target:
    ``Y = a X + b_k`` with the common slope ``spec.slope``.
    """
    x = spec.delta * np.arange(1, spec.n + 1, dtype=np.float64)
    lengths = np.diff(spec.boundaries)
    if spec.target is Target.SLOPE:
        slopes = spec.params
        intercepts = np.full(slopes.size, spec.intercept)
        if continuous:
            xs = spec.delta * spec.change_points
            intercepts[1:] = spec.intercept + np.cumsum((slopes[:-1] - slopes[1:]) * xs)
        return np.repeat(slopes, lengths) * x + np.repeat(intercepts, lengths)
    if spec.target is Target.INTERCEPT:
        return spec.slope * x + np.repeat(spec.params, lengths)
    raise DomainError(f"regression model needs a slope or intercept target, got {spec.target.value}")


def gen_piecewise_regression(spec: PiecewiseSpec, seed, continuous: bool = False) -> TimeSeries:
    """Y_i = a_k X_i + b_k + sigma * e_i with X_i = i * delta."""
    rng = _rng(seed)
    y = regression_mean(spec, continuous) + spec.sigma * rng.standard_normal(spec.n)
    return TimeSeries(y, delta=spec.delta)


def draw_truth(
    n: int,
    n_changes: int,
    jump_range,
    rng,
    target=Target.MEAN,
    base: float = 0.0,
    sigma: float = 1.0,
    delta: float = 1.0,
    change_points=None,
) -> PiecewiseSpec:
    """Equally spaced change points with jumps drawn uniformly from ``jump_range``
    and a random sign."""
    rng = _rng(rng)
    if change_points is None:
        change_points = [int(round(n * (k + 1) / (n_changes + 1))) for k in range(n_changes)]
    lo, hi = jump_range
    jumps = rng.uniform(lo, hi, size=len(change_points)) * rng.choice([-1.0, 1.0], size=len(change_points))
    params = base + np.concatenate(([0.0], np.cumsum(jumps)))
    return PiecewiseSpec(n=n, change_points=change_points, params=params, sigma=sigma,
                         target=target, delta=delta)


def mise(truth: PiecewiseSpec, est: Segmentation, n: Optional[int] = None, values=None) -> float:
    """(1/n) sum_i (g_hat_i - g_i)^2 for piecewise-constant g.

    ``values`` overrides the estimated path; by default it comes from the
    segmentation's estimates.
    """
    n = truth.n if n is None else n
    if est.n != n or truth.n != n:
        raise DomainError("truth and estimate must cover the same 1..n")
    g = truth.piecewise()
    g_hat = est.piecewise() if values is None else np.asarray(values, dtype=np.float64)
    d = g_hat - g
    return float(np.dot(d, d) / n)


def change_point_se(truth: PiecewiseSpec, est: Segmentation, n: Optional[int] = None) -> float:
    """sum_k ((tau_hat_k - tau_k) / n)^2, only defined when the counts agree."""
    n = truth.n if n is None else n
    if est.n_changes != truth.change_points.size:
        raise KMismatch(f"estimated {est.n_changes} change points, truth has {truth.change_points.size}")
    d = (est.change_points - truth.change_points) / n
    return float(np.dot(d, d))


@dataclass
class Scenario:
    """One experiment: a random ground-truth model plus detector settings."""

    name: str
    n: int
    n_changes: int
    jump_range: tuple
    target: Target = Target.MEAN
    sigma: float = 1.0
    delta: float = 1.0
    base: float = 0.0
    continuous: bool = False
    change_points: Optional[list] = None
    window: int = 300
    level1: float = 0.05
    level2: float = 1e-4
    known_sigma: bool = True
    replications: int = 1000
    seed: int = 0
    plsc_kmax: int = 10
    plsc_min_seg: int = 2
    plsc_penalty: str = "bic"

    def __post_init__(self):
        self.target = Target(self.target)
        self.jump_range = tuple(self.jump_range)

    def truth(self, rng) -> PiecewiseSpec:
        return draw_truth(self.n, self.n_changes, self.jump_range, rng, self.target,
                          base=self.base, sigma=self.sigma, delta=self.delta,
                          change_points=self.change_points)

    def sample(self, seed):
        """(truth, series) for one replication."""
        rng = make_rng(seed)
        truth = self.truth(rng)
        if self.target in (Target.SLOPE, Target.INTERCEPT):
            return truth, gen_piecewise_regression(truth, rng, self.continuous)
        return truth, gen_piecewise_mean(truth, rng)

    def detector(self) -> DetectorSpec:
        return DetectorSpec(
            target=self.target, window=self.window, level1=self.level1, level2=self.level2,
            sigma=self.sigma if (self.known_sigma and self.target is not Target.VARIANCE) else None,
        )

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["target"] = self.target.value
        d["jump_range"] = list(self.jump_range)
        return d


def load_scenario(path) -> Scenario:
    with open(path) as fh:
        return Scenario(**json.load(fh))


def builtin_scenario(name: str) -> Scenario:
    path = Path(__file__).parent / "data" / "scenarios" / f"{name}.json"
    if not path.exists():
        raise DomainError(f"no built-in scenario named {name!r}")
    return load_scenario(path)


@dataclass
class MCReport:
    method: str
    replications: int
    true_k: int
    k_histogram: dict
    correct_k_rate: float
    mean_se: Optional[float]
    mean_mise: float
    mean_time: float
    peak_memory_mb: Optional[float]
    rng: str = RNG_ALGORITHM
    base_seed: int = 0
    rows: list = field(default_factory=list, repr=False)

    def to_dict(self, rows: bool = False) -> dict:
        d = {k: v for k, v in self.__dict__.items() if k != "rows"}
        d["k_histogram"] = {str(k): v for k, v in self.k_histogram.items()}
        if rows:
            d["rows"] = self.rows
        return d

    def write_rows_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("replication,seed,k_hat,correct,se,mise,seconds\n")
            for r in self.rows:
                se = "" if r["se"] is None else repr(r["se"])
                fh.write(f"{r['replication']},{r['seed']},{r['k_hat']},{int(r['correct'])},{se},"
                         f"{r['mise']!r},{r['seconds']!r}\n")


def _estimate_for_mise(truth: PiecewiseSpec, series: TimeSeries, seg: Segmentation, target: Target) -> np.ndarray:
    # piecewise estimate of the monitored parameter on the estimated boundaries
    est = segment_estimates(series, target, seg.boundaries)
    lengths = np.diff(seg.boundaries)
    if target is Target.SLOPE:
        vals = [e[0] for e in est]
    elif target is Target.INTERCEPT:
        vals = [e[1] for e in est]
    else:
        vals = list(est)
    return np.repeat(np.asarray(vals, dtype=np.float64), lengths)


def _run_method(method: str, scenario: Scenario, series: TimeSeries) -> Segmentation:
    if method == "fdpv":
        return fdpv(series, scenario.detector()).segmentation
    if method == "plsc":
        return plsc_segment(series, scenario.plsc_kmax, scenario.plsc_min_seg, scenario.plsc_penalty).segmentation
    raise DomainError(f"unknown method {method!r}")


def _one(method: str, scenario: Scenario, i: int, base_seed: int, track_memory: bool) -> dict:
    seed = base_seed + i
    truth, series = scenario.sample(seed)
    t0 = time.perf_counter()
    seg = _run_method(method, scenario, series)
    elapsed = time.perf_counter() - t0
    k_true = truth.change_points.size
    se = change_point_se(truth, seg) if seg.n_changes == k_true else None
    m = mise(truth, seg, values=_estimate_for_mise(truth, series, seg, scenario.target))
    return {"replication": i, "seed": seed, "k_hat": seg.n_changes, "correct": seg.n_changes == k_true,
            "se": se, "mise": m, "seconds": elapsed}


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("FDPV_THREADS", "1")))
    except ValueError:
        return 1


def monte_carlo(
    method: str,
    scenario: Scenario,
    replications: Optional[int] = None,
    base_seed: Optional[int] = None,
    measure_memory: bool = False,
    workers: Optional[int] = None,
    progress: Optional[Callable[[int], None]] = None,
) -> MCReport:
    """Replicate ``scenario`` and aggregate K-hat, SE and MISE.

    Replication ``i`` draws its model and noise from seed ``base_seed + i``;
    results are aggregated in replication order, so the report does not
    depend on ``workers`` (default: the FDPV_THREADS environment variable).
    """
    M = scenario.replications if replications is None else int(replications)
    if M < 1:
        raise DomainError("need at least one replication")
    base_seed = scenario.seed if base_seed is None else int(base_seed)
    workers = _workers() if workers is None else workers
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda i: _one(method, scenario, i, base_seed, False), range(M)))
    else:
        rows = []
        for i in range(M):
            rows.append(_one(method, scenario, i, base_seed, False))
            if progress:
                progress(i)
    peak = None
    if measure_memory:
        _, series = scenario.sample(base_seed)
        tracemalloc.start()
        _run_method(method, scenario, series)
        peak = tracemalloc.get_traced_memory()[1] / 2**20
        tracemalloc.stop()
    k_true = scenario.n_changes if scenario.change_points is None else len(scenario.change_points)
    hist: dict = {}
    for r in rows:
        hist[r["k_hat"]] = hist.get(r["k_hat"], 0) + 1
    ses = [r["se"] for r in rows if r["se"] is not None]
    return MCReport(
        method=method,
        replications=M,
        true_k=k_true,
        k_histogram=dict(sorted(hist.items())),
        correct_k_rate=sum(r["correct"] for r in rows) / M,
        mean_se=float(np.mean(ses)) if ses else None,
        mean_mise=float(np.mean([r["mise"] for r in rows])),
        mean_time=float(np.mean([r["seconds"] for r in rows])),
        peak_memory_mb=peak,
        base_seed=base_seed,
        rows=rows,
    )
