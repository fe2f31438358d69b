"""Compiled inner loops: rolling window sums and the segmentation DP."""

import numpy as np
from numba import njit

# full recomputation of the window sums every REANCHOR steps bounds drift
REANCHOR = 1 << 16


@njit(cache=True, nogil=True)
def _two_sum(s, c, v):
    # Neumaier compensated accumulation of v into (s, c)
    t = s + v
    if abs(s) >= abs(v):
        c += (s - t) + v
    else:
        c += (v - t) + s
    return t, c


@njit(cache=True, nogil=True)
def _window_sum(x, start, width):
    s = 0.0
    c = 0.0
    for i in range(start, start + width):
        s, c = _two_sum(s, c, x[i])
    return s + c


@njit(cache=True, nogil=True)
def _window_moment(x, start, width):
    s = 0.0
    c = 0.0
    for i in range(width):
        s, c = _two_sum(s, c, (i + 1) * x[start + i])
    return s + c


@njit(cache=True, nogil=True)
def rolling_sums(x, width, out):
    """out[k] = sum(x[k:k + width]) for k = 0..len(x) - width."""
    m = x.shape[0] - width + 1
    s = 0.0
    c = 0.0
    for k in range(m):
        if k % REANCHOR == 0:
            s = _window_sum(x, k, width)
            c = 0.0
        else:
            s, c = _two_sum(s, c, x[k + width - 1])
            s, c = _two_sum(s, c, -x[k - 1])
        out[k] = s + c


@njit(cache=True, nogil=True)
def rolling_centered_moments(x, width, out):
    """out[k] = sum_{i=1..width} (i - (width + 1) / 2) * x[k + i - 1].

    Uses M(k+1) = M(k) - S(k) + width * x[k + width] for the raw moment
    M(k) = sum i * x[k + i - 1] alongside the plain window sum S(k).
    """
    m = x.shape[0] - width + 1
    half = 0.5 * (width + 1)
    s = 0.0
    cs = 0.0
    mo = 0.0
    cm = 0.0
    for k in range(m):
        if k % REANCHOR == 0:
            s = _window_sum(x, k, width)
            cs = 0.0
            mo = _window_moment(x, k, width)
            cm = 0.0
        else:
            prev = s + cs
            mo, cm = _two_sum(mo, cm, -prev)
            mo, cm = _two_sum(mo, cm, width * x[k + width - 1])
            s, cs = _two_sum(s, cs, x[k + width - 1])
            s, cs = _two_sum(s, cs, -x[k - 1])
        out[k] = (mo + cm) - half * (s + cs)


@njit(cache=True, nogil=True)
def segment_dp(csum, csum2, kmax, min_seg, cost_out, back):
    """Exact least-squares segmentation for 0..kmax change points.

    ``csum``/``csum2`` are length n+1 prefix sums of x and x^2. ``cost_out[K]``
    receives the optimal residual sum of squares with K change points and
    ``back[K, t]`` the start of the last segment of the best K-change
    segmentation of x[:t].
    """
    n = csum.shape[0] - 1
    inf = np.inf
    prev = np.empty(n + 1)
    cur = np.empty(n + 1)
    for t in range(n + 1):
        if t >= min_seg:
            s1 = csum[t]
            prev[t] = csum2[t] - s1 * s1 / t
        else:
            prev[t] = inf
        back[0, t] = 0
    cost_out[0] = prev[n]
    for K in range(1, kmax + 1):
        for t in range(n + 1):
            cur[t] = inf
            back[K, t] = -1
            lo = K * min_seg
            hi = t - min_seg
            if t < (K + 1) * min_seg:
                continue
            best = inf
            arg = -1
            for s in range(lo, hi + 1):
                p = prev[s]
                if p == inf:
                    continue
                length = t - s
                d = csum[t] - csum[s]
                c = csum2[t] - csum2[s] - d * d / length
                if c < 0.0:
                    c = 0.0
                v = p + c
                if v < best:
                    best = v
                    arg = s
            cur[t] = best
            back[K, t] = arg
        cost_out[K] = cur[n]
        for t in range(n + 1):
            prev[t] = cur[t]
