"""
p-values without scipy
======================

Step 2 needs Student and Fisher tail probabilities far out in the tail.
Both come from one regularized incomplete beta function, evaluated by a
continued fraction.
"""

# %%
from fdpv.statfn import (
    fisher_f_sf,
    regularized_incomplete_beta,
    std_normal_cdf,
    student_t_sf,
    welch_df,
)

print("I_0.4(2, 3) = %.6f" % regularized_incomplete_beta(2, 3, 0.4))
print("Phi(1.96) = %.6f" % std_normal_cdf(1.959963985))

# %%
# Tail probabilities stay accurate in relative terms at 1e-10 and beyond.
for t in (2.0, 6.0, 9.0, 15.0):
    print(f"P(T_200 > {t:4.1f}) = {student_t_sf(t, 200):.6e}")
print("P(F(10, 10) > 3) = %.8f" % fisher_f_sf(3.0, 10, 10))

# %%
# Welch-Satterthwaite degrees of freedom are floored to an integer.
print("welch_df(2, 1, 20, 10) =", welch_df(2.0, 1.0, 20, 10))
