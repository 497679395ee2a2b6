"""Independent oracles used by the tests.

These deliberately avoid the package's own code paths: the normal quantile
comes from bisecting math.erf, the tail-index oracle is a Hill estimator on
freshly simulated states, and the brute-force simulators below are written
directly against the defining recursions.
"""

import math

import numpy as np

EULER_GAMMA = 0.5772156649015329


def norm_quantile(p, tol_iters=200):
    """Standard normal quantile by bisection of math.erf."""
    lo, hi = -12.0, 12.0
    for _ in range(tol_iters):
        mid = 0.5 * (lo + hi)
        if 0.5 * (1.0 + math.erf(mid / math.sqrt(2.0))) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def dkw_bound(n, alpha=0.01):
    """Two-sided DKW confidence radius for an empirical CDF."""
    return math.sqrt(math.log(2.0 / alpha) / (2.0 * n))


def ks_statistic(sample, cdf):
    s = np.sort(np.asarray(sample, dtype=float))
    n = s.size
    F = np.asarray(cdf(s), dtype=float)
    return float(max(np.max(np.abs(F - np.arange(1, n + 1) / n)),
                     np.max(np.abs(F - np.arange(0, n) / n))))


def simulate_arch_states(theta0, theta1, n_draws, seed, lanes=50_000, burn=1500):
    """Stationary states of Y' = sqrt(theta0 + theta1 Y^2) W, by direct recursion."""
    rng = np.random.default_rng(seed)
    y = math.sqrt(theta0 / (1.0 - theta1)) * rng.standard_normal(lanes)
    for _ in range(burn):
        y = np.sqrt(theta0 + theta1 * y * y) * rng.standard_normal(lanes)
    out = []
    kept = 0
    while kept < n_draws:
        y = np.sqrt(theta0 + theta1 * y * y) * rng.standard_normal(lanes)
        out.append(y.copy())
        kept += lanes
    return np.concatenate(out)[:n_draws]


def hill_tail_index(sample_abs, k=5000):
    """Hill estimate of the tail index on the top k order statistics."""
    a = np.sort(np.asarray(sample_abs, dtype=float))
    tail = a[a.size - k:]
    return 1.0 / float(np.mean(np.log(tail[1:]) - math.log(tail[0])))


def simulate_centered_expar(phi, n, steps, seed):
    """Direct simulation of V' = phi V + (E - 1); returns the final states."""
    rng = np.random.default_rng(seed)
    v = np.zeros(n)
    for _ in range(steps):
        v = phi * v + rng.exponential(size=n) - 1.0
    return v


def trapezoid_mean_from_cdf(xs, cdf_vals):
    """E[X] = x_min + int (1 - F) for a law supported on [x_min, inf)."""
    return float(xs[0] + np.trapezoid(1.0 - np.asarray(cdf_vals), xs))


def tv_distance(p, q):
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())
