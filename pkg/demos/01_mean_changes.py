"""
Detecting changes in the mean
=============================

A noisy piecewise-constant signal, the filtered-derivative trace, the
Step-1 candidates and the Step-2 p-values that decide which of them stay.
"""

# %%
# Five changes in the mean of a unit-variance Gaussian sequence.
import numpy as np

from fdpv import DetectorSpec, PiecewiseSpec, fdpv, gen_piecewise_mean

truth = PiecewiseSpec(
    n=5000,
    change_points=[800, 1700, 2500, 3300, 4200],
    params=[0.0, 1.0, 0.3, 1.4, 0.6, -0.2],
)
series = gen_piecewise_mean(truth, seed=2024)
print("n =", series.n, " true change points:", truth.change_points.tolist())

# %%
# One call runs both steps. With ``sigma`` left out, the noise level is
# estimated from first differences, which jumps barely disturb.
spec = DetectorSpec("mean", window=300, level1=0.05, level2=1e-4)
result = fdpv(series, spec)

# %%
# The trace D(k) = mean of the next A points minus mean of the previous A
# points has a triangular peak of height |jump| at every change.
trace = result.trace
top = np.argsort(-np.abs(trace.values))[:3]
print("largest |D| at k =", trace.index[top].tolist())
print("Step-1 threshold C1 = %.4f" % result.threshold.critical_value)

# %%
# Step 1 keeps the local maxima above C1, Step 2 compares the neighbouring
# segments of every candidate with a Welch t-test.
for rec in result.step2:
    print(f"candidate {rec.candidate:5d}  t = {rec.statistic:7.2f}  p = {rec.p_value:.2e}  kept = {rec.kept}")

# %%
# The final segmentation holds the kept change points and the segment means.
seg = result.segmentation
print("estimated change points:", seg.change_points.tolist())
print("segment means:", np.round(seg.segment_estimates, 3).tolist())
print(seg.to_json()[:120], "...")
