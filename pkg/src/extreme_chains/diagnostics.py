"""Monte-Carlo verification layer: conditional forward simulation, normalized
kernel convergence, quantile envelopes, tail-dependence estimates, and
change-point law checks.  Every routine takes an explicit generator and
records seeds/sample sizes in its outputs so runs reproduce exactly.
"""

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ValidationError
from .tailchain import detect_changepoints

__all__ = [
    "FixedX0",
    "Exceedance",
    "conditional_forward_sim",
    "normalized_samples",
    "ks_distance",
    "ks_against_limit",
    "ConvergenceRow",
    "ConvergenceTable",
    "convergence_table",
    "QuantileEnvelope",
    "quantile_envelope",
    "ChiRow",
    "chi_estimate",
    "changepoint_law_check",
    "geometric_pmf_truncated",
]


@dataclass
class FixedX0:
    x0: float


@dataclass
class Exceedance:
    u: float


def conditional_forward_sim(kernel, law, init, T, n, rng):
    """Simulate n paths X_0..X_T; X_0 fixed or drawn from ``law`` above u.

    Exceedance initial states use exact inverse-CDF conditioning:
    X_0 = law.ppf(F(u) + (1 - F(u)) U).
    """
    if n < 1 or T < 0:
        raise ValidationError("need n >= 1 and T >= 0")
    X = np.empty((n, T + 1))
    if isinstance(init, FixedX0):
        X[:, 0] = init.x0
    elif isinstance(init, Exceedance):
        pu = float(law.cdf(init.u))
        if not pu < 1.0:
            raise DomainError(f"threshold {init.u} beyond the law's numeric range")
        X[:, 0] = law.ppf(pu + (1.0 - pu) * rng.uniform(size=n))
    else:
        raise ValidationError("init must be FixedX0 or Exceedance")
    for t in range(1, T + 1):
        X[:, t] = kernel.sample(X[:, t - 1], rng)
    return X


def normalized_samples(kernel, v, scheme, t, n, rng):
    """n draws of (X_t - a_t(v)) / b_t(v) given X_0 = v (forward simulation)."""
    if t < 1:
        raise ValidationError("need t >= 1")
    X = conditional_forward_sim(kernel, kernel.stationary_law, FixedX0(v), t, n, rng)
    return (X[:, t] - scheme.a(t, v)) / scheme.b(t, v)


def ks_distance(samples, cdf):
    """Kolmogorov-Smirnov sup-distance between a sample and a reference CDF."""
    s = np.sort(np.asarray(samples, dtype=float))
    n = s.size
    if n == 0:
        raise DomainError("empty sample")
    F = np.asarray(cdf(s), dtype=float)
    up = np.max(np.abs(F - np.arange(1, n + 1) / n))
    dn = np.max(np.abs(F - np.arange(0, n) / n))
    return float(max(up, dn))


def ks_against_limit(samples, law, m=20.0):
    """KS against a limit law, atoms handled separately.

    Values below -m count toward the -inf atom, above +m toward the +inf
    atom; the KS distance is computed between the interior sample and the
    law's (normalised) continuous component.  Returns (ks, mass_lo, mass_hi).
    """
    s = np.asarray(samples, dtype=float)
    mass_lo = float(np.mean(s < -m))
    mass_hi = float(np.mean(s > m))
    interior = s[(s >= -m) & (s <= m)]
    if interior.size == 0:
        return 1.0, mass_lo, mass_hi
    return ks_distance(interior, law.cdf), mass_lo, mass_hi


@dataclass
class ConvergenceRow:
    v: float
    n: int
    ks: float
    mass_lo: float
    mass_hi: float
    seed: int


@dataclass
class ConvergenceTable:
    kernel_id: str
    scheme_id: str
    t: int
    rows: list

    def ks_values(self):
        return np.array([r.ks for r in self.rows])

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["kernel", "scheme", "t", "v", "n", "ks",
                             "atom_lo", "atom_hi", "seed"])
            for r in self.rows:
                writer.writerow([self.kernel_id, self.scheme_id, self.t,
                                 repr(r.v), r.n, repr(r.ks), repr(r.mass_lo),
                                 repr(r.mass_hi), r.seed])


def convergence_table(kernel, scheme, K, t, v_grid, n, seed, atom_cut=20.0):
    """One KS row per threshold v, with escaped-mass columns for atom laws."""
    rows = []
    for j, v in enumerate(v_grid):
        rng = np.random.default_rng(np.random.SeedSequence(
            entropy=int(seed), spawn_key=(0xC0, j)))
        z = normalized_samples(kernel, float(v), scheme, t, n, rng)
        ks, lo, hi = ks_against_limit(z, K, m=atom_cut)
        rows.append(ConvergenceRow(float(v), n, ks, lo, hi, int(seed)))
    return ConvergenceTable(getattr(kernel, "name", "kernel"),
                            scheme.scheme_id, t, rows)


@dataclass
class QuantileEnvelope:
    """Per-step 2.5%/mean/97.5% summary of a path bundle."""

    source: str
    t: np.ndarray
    q025: np.ndarray
    mean: np.ndarray
    q975: np.ndarray
    n_paths: int = 0
    precision_warning: bool = False

    def to_csv(self, path, mode="w", header=True):
        with open(path, mode, newline="") as fh:
            writer = csv.writer(fh)
            if header:
                writer.writerow(["source", "t", "q025", "mean", "q975"])
            for i in range(len(self.t)):
                writer.writerow([self.source, int(self.t[i]),
                                 repr(float(self.q025[i])),
                                 repr(float(self.mean[i])),
                                 repr(float(self.q975[i]))])


def quantile_envelope(paths, source="actual", t_start=0):
    """Columnwise envelope of a (n_paths, horizon) array.

    Fewer than 100 paths sets ``precision_warning`` on the result.
    """
    paths = np.atleast_2d(np.asarray(paths, dtype=float))
    n = paths.shape[0]
    ts = np.arange(t_start, t_start + paths.shape[1])
    return QuantileEnvelope(
        source=source,
        t=ts,
        q025=np.quantile(paths, 0.025, axis=0),
        mean=paths.mean(axis=0),
        q975=np.quantile(paths, 0.975, axis=0),
        n_paths=n,
        precision_warning=n < 100,
    )


@dataclass
class ChiRow:
    u: float
    estimate: float
    n_exceed: int
    n: int
    flagged: bool


def chi_estimate(kernel, law, t, u_grid, n, seed, min_exceed=50):
    """Empirical chi_t(u) = Pr(F(X_t) > u | F(X_0) > u) per threshold u.

    The conditioning is exact (inverse-CDF above the threshold); rows whose
    lag-t exceedance count falls below ``min_exceed`` are flagged.
    """
    rows = []
    for j, u in enumerate(u_grid):
        if not 0.0 < u < 1.0:
            raise DomainError("u grid must lie inside (0, 1)")
        rng = np.random.default_rng(np.random.SeedSequence(
            entropy=int(seed), spawn_key=(0xC1, j)))
        x_u = float(law.ppf(u))
        X = conditional_forward_sim(kernel, law, Exceedance(x_u), t, n, rng)
        hits = law.cdf(X[:, t]) > u
        cnt = int(hits.sum())
        rows.append(ChiRow(float(u), float(hits.mean()), cnt, n, cnt < min_exceed))
    return rows


def geometric_pmf_truncated(p, horizon):
    """Geometric(p) pmf on {1..horizon} plus the right-tail lump."""
    t = np.arange(1, horizon + 1)
    pmf = (1.0 - p) ** (t - 1) * p
    return np.concatenate([pmf, [(1.0 - p) ** horizon]])


def changepoint_law_check(paths, rule, p, horizon=None):
    """Total-variation distance between the first-detection law and Geometric(p).

    ``paths`` holds X_0..X_T per row; detections beyond the horizon land in a
    shared truncation bucket on both sides.
    """
    paths = np.atleast_2d(np.asarray(paths, dtype=float))
    T = paths.shape[1] - 1
    horizon = T if horizon is None else min(horizon, T)
    firsts = np.empty(paths.shape[0], dtype=int)
    for i in range(paths.shape[0]):
        times = detect_changepoints(paths[i], rule)
        firsts[i] = times[0] if times.size and times[0] <= horizon else horizon + 1
    emp = np.array([(firsts == t).mean() for t in range(1, horizon + 1)]
                   + [(firsts == horizon + 1).mean()])
    ref = geometric_pmf_truncated(p, horizon)
    return float(0.5 * np.abs(emp - ref).sum())
