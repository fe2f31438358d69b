"""
Calibrating the Step-1 threshold
================================

The threshold C1 comes from the Gumbel-type limit of max |D| under the
no-change hypothesis. This script compares it with simulation and shows the
power formula for a single change.
"""

# %%
import numpy as np

from fdpv import critical_value, detection_probability, fd_mean, gumbel_quantile
from fdpv.simgen import make_rng

n, A = 5000, 300
x = gumbel_quantile(0.05)
print("Gumbel quantile for p1 = 0.05: x = %.5f" % x)

# %%
# ``calibration="standardized"`` applies the normalizer to D divided by its
# null standard deviation sigma sqrt(2/A). The unscaled variant
# sigma / sqrt(A) * c_n(x) is kept for comparison.
std = critical_value("mean", n, A, 0.05, 1.0)
lit = critical_value("mean", n, A, 0.05, 1.0, calibration="literal")
print("C1 standardized = %.4f, unscaled = %.4f" % (std.critical_value, lit.critical_value))

# %%
# Empirical false-alarm rates over 1000 pure-noise series.
rng = make_rng(3)
maxima = np.array([np.abs(fd_mean(rng.standard_normal(n), A, sigma=1.0).values).max() for _ in range(1000)])
print("P(max|D| > C1): standardized %.3f, unscaled %.3f" % ((maxima > std.critical_value).mean(),
                                                             (maxima > lit.critical_value).mean()))

# %%
# Probability that |D(tau)| exceeds C1 at a known change of size delta.
for delta in (0.1, 0.2, 0.3, 0.4, 0.5):
    p = detection_probability("mean", delta, std.critical_value, A, 1.0)
    print(f"delta = {delta:.1f}: detection probability {p:.4f}")

# %%
# The slope target uses the normalizer c(A, x) and the null scale of the
# slope trace, 2 sqrt(6) sigma / (step sqrt(A (A^2 - 1))).
print(critical_value("slope", 1400, 100, 0.05, 30.0).to_dict())
