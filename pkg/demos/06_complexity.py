"""
Time and memory scaling
=======================

Fits log-log slopes of run time against n for both methods.
"""

# %%
from fdpv.bench import bench

fd = bench([100_000, 200_000, 400_000, 800_000], "fdpv", repeats=10)
for row in fd.rows:
    print(f"fdpv  n = {row.n:7d}  {row.seconds * 1e3:7.2f} ms  peak {row.peak_mb:6.2f} MB")
print("time exponent %.2f, memory exponent %.2f" % (fd.exponent, fd.memory_exponent))

# %%
pl = bench([1000, 2000, 4000], "plsc", repeats=2)
for row in pl.rows:
    print(f"plsc  n = {row.n:7d}  {row.seconds:7.3f} s")
print("time exponent %.2f" % pl.exponent)
