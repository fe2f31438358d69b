"""
Variance, slope and intercept changes
=====================================

The same two-step procedure monitors other parameters: the variance of a
sequence, or the slope and intercept of a regression on an equidistant
covariate.
"""

# %%
# A change in variance: the trace compares window variances, Step 2 uses an
# F test.
import numpy as np

from fdpv import DetectorSpec, PiecewiseSpec, TimeSeries, fdpv, gen_piecewise_mean, gen_piecewise_regression

var_truth = PiecewiseSpec(n=4000, change_points=[1500, 2800], params=[1.0, 4.0, 1.5], target="variance")
res = fdpv(gen_piecewise_mean(var_truth, seed=1), DetectorSpec("variance", window=200, level2=1e-6))
print("variance changes:", res.segmentation.change_points.tolist(),
      "estimates:", np.round(res.segmentation.segment_estimates, 2).tolist())

# %%
# Slope changes in Y_i = a_k X_i + b_k + e_i with X_i = i. Here the lines
# meet at each change point.
slope_truth = PiecewiseSpec(n=1400, change_points=[280, 560, 840, 1120], params=[1.0, 5.0, 1.5, 4.5, 0.5],
                            sigma=30.0, target="slope", delta=1.0)
ys = gen_piecewise_regression(slope_truth, seed=7, continuous=True)
res = fdpv(ys, DetectorSpec("slope", window=100, level2=1e-10, sigma=30.0))
print("slope changes:", res.segmentation.change_points.tolist())
print("segment slopes:", [round(a, 2) for a, b in res.segmentation.segment_estimates])

# %%
# Intercept changes with a common slope. When the slope is not given, it is
# estimated by least squares on the whole series.
x = np.arange(1, 2001, dtype=float)
y = 0.25 * x + np.where(x <= 1000, 0.0, 3.0) + np.random.default_rng(4).normal(0, 2.0, x.size)
res = fdpv(TimeSeries(y, delta=1.0), DetectorSpec("intercept", window=150, level2=1e-6, slope=0.25))
print("intercept change:", res.segmentation.change_points.tolist())
