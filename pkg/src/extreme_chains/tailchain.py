"""Simulators for the limit processes: tail chains under the three theorem
regimes, hidden tail chains with change-points, affine path reconstruction,
and change-point detection on simulated paths.

Atoms at +-infinity never enter floating-point arithmetic: hidden-chain
states carry integer regime codes instead and the values stay finite.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels, margins
from .errors import RegimeError, ValidationError

__all__ = [
    "TailChainPaths",
    "HiddenChainPaths",
    "RatioThreshold",
    "SignChange",
    "ValueChange",
    "simulate_tail_chain",
    "simulate_nonneg_tail_chain",
    "simulate_negdep_tail_chain",
    "hidden_asym_logistic",
    "hidden_ht_mixture",
    "hidden_rootzen_smith",
    "hidden_arch",
    "reconstruct_paths",
    "detect_changepoints",
]


@dataclass
class TailChainPaths:
    """n simulated tail-chain paths: E0 plus M_1..M_T (columns)."""

    E0: np.ndarray
    M: np.ndarray
    scheme_id: str = ""

    @property
    def horizon(self):
        return self.M.shape[1]

    @property
    def n_paths(self):
        return self.M.shape[0]


# regime codes shared by the hidden-chain simulators
REGIME_EXTREME = 1          # following the extreme mode / alpha_1 mode
REGIME_BODY = 0             # returned to the body of the distribution
REGIME_SECOND = 2           # alpha_2 mode of the mixture chain
REGIME_NEG = -1             # negative-extreme regime (sign-switching chains)

# per-step update-case codes for the mixture hidden chain (0 = initial draw)
MIX_CASE_A1_INNOV = 1       # alpha1 M + (n_t)^{beta1} eps1
MIX_CASE_A2_INNOV = 2       # alpha2 M + (n_t)^{beta2} eps2
MIX_CASE_INNOV1_ONLY = 3    # (n_t)^{beta1} eps1
MIX_CASE_INNOV2_ONLY = 4    # (n_t)^{beta2} eps2
MIX_CASE_A1_SCALE = 5       # alpha1 M (deterministic)
MIX_CASE_A2_SCALE = 6       # alpha2 M (deterministic)


@dataclass
class HiddenChainPaths:
    """Hidden tail-chain paths with latent states and change-point annotations."""

    M: np.ndarray                       # (n, T) values, always finite
    regime: np.ndarray                  # (n, T) integer regime codes
    is_changepoint: np.ndarray          # (n, T) bool, True at T^B_k
    B: np.ndarray = None                # latent Bernoulli draws where used
    case: np.ndarray = None             # per-step update-case codes (mixture)
    example: str = ""

    @property
    def horizon(self):
        return self.M.shape[1]

    @property
    def n_paths(self):
        return self.M.shape[0]

    def changepoints(self, i):
        """Ordered change-point times (1-based) of path i."""
        return np.flatnonzero(self.is_changepoint[i]) + 1

    def to_rows(self):
        """Iterate (path, t, value, regime, is_changepoint) rows for CSV."""
        n, T = self.M.shape
        for i in range(n):
            for t in range(T):
                yield (i, t + 1, self.M[i, t], int(self.regime[i, t]),
                       bool(self.is_changepoint[i, t]))


def _check_horizon(T, n):
    if T < 1 or n < 1:
        raise ValidationError("need horizon >= 1 and at least one path")


def simulate_tail_chain(update, K, T, n, rng):
    """Theorem-1 regime: M_1 ~ K, M_{t+1} = psi_a(M_t) + psi_b(M_t) eps.

    ``K`` must carry no mass at +-infinity.
    """
    _check_horizon(T, n)
    if K.has_atoms:
        raise RegimeError(
            "limit law has atoms at +-inf; use the hidden-chain simulators")
    E0 = rng.exponential(size=n)
    M = np.empty((n, T))
    M[:, 0] = K.sample(n, rng)
    for t in range(2, T + 1):
        eps = K.sample(n, rng)
        prev = M[:, t - 2]
        M[:, t - 1] = update.psi_a(t, prev) + update.psi_b(t, prev) * eps
    return TailChainPaths(E0, M, scheme_id=update.scheme_id)


def simulate_nonneg_tail_chain(update, K, T, n, rng):
    """Theorem-2 regime: multiplicative recursion M_{t+1} = psi_b(M_t) eps
    for a limit law supported on (0, inf) with no mass at zero."""
    _check_horizon(T, n)
    if K.has_atoms:
        raise RegimeError("limit law has atoms at +-inf")
    if K.support[0] < 0.0 or K.cdf(0.0) > 0.0:
        raise RegimeError("scale-only regime needs K on (0, inf) with K({0}) = 0")
    E0 = rng.exponential(size=n)
    M = np.empty((n, T))
    M[:, 0] = K.sample(n, rng)
    for t in range(2, T + 1):
        eps = K.sample(n, rng)
        M[:, t - 1] = update.psi_b(t, M[:, t - 2]) * eps
    return TailChainPaths(E0, M, scheme_id=update.scheme_id)


def simulate_negdep_tail_chain(update, K_minus, K_plus, T, n, rng):
    """Theorem-3 regime: M_1 ~ K_-, innovations alternate K_+ (producing even
    steps) and K_- (producing odd steps)."""
    _check_horizon(T, n)
    for law in (K_minus, K_plus):
        if law.has_atoms:
            raise RegimeError("limit laws with atoms need a hidden-chain simulator")
    E0 = rng.exponential(size=n)
    M = np.empty((n, T))
    M[:, 0] = K_minus.sample(n, rng)
    for t in range(2, T + 1):
        # step t is produced from M_{t-1}; t-1 odd -> K_plus innovation
        law = K_plus if (t - 1) % 2 == 1 else K_minus
        eps = law.sample(n, rng)
        prev = M[:, t - 2]
        M[:, t - 1] = update.psi_a(t, prev) + update.psi_b(t, prev) * eps
    return TailChainPaths(E0, M, scheme_id=update.scheme_id)


def hidden_asym_logistic(phi1, phi2, nu, T, n, rng, kernel=None):
    """Hidden tail chain of the asymmetric-logistic chain.

    Before the first zero of the latent Bernoulli(phi1) sequence the chain is
    a random walk with extreme-mode increments; at the change-point it
    restarts from an independent unit exponential, and afterwards it evolves
    by the original transition kernel.
    """
    _check_horizon(T, n)
    from . import norming as _norming
    g1 = _norming.limit_law("asym_logistic_g1", phi1=phi1, phi2=phi2, nu=nu)
    if kernel is None:
        kernel = kernels.AsymmetricLogisticKernel(phi1, phi2, nu)
    B = rng.uniform(size=(n, T)) < phi1
    M = np.empty((n, T))
    regime = np.empty((n, T), dtype=np.int8)
    cp = np.zeros((n, T), dtype=bool)
    # T^B = first t with B_t = 0 (may exceed the horizon)
    hit = ~B
    tb = np.where(hit.any(axis=1), hit.argmax(axis=1) + 1, T + 1)
    cp[np.arange(n)[tb <= T], tb[tb <= T] - 1] = True

    fresh = rng.exponential(size=n)
    M[:, 0] = np.where(tb == 1, fresh, g1.sample(n, rng))
    regime[:, 0] = np.where(tb == 1, REGIME_BODY, REGIME_EXTREME)
    for t in range(2, T + 1):
        prev = M[:, t - 2]
        pre = t < tb
        at = t == tb
        out = np.where(pre, prev + g1.sample(n, rng), 0.0)
        out = np.where(at, rng.exponential(size=n), out)
        post = t > tb
        if post.any():
            out[post] = kernel.sample(np.maximum(prev[post], 1e-12), rng)
        M[:, t - 1] = out
        regime[:, t - 1] = np.where(pre, REGIME_EXTREME, REGIME_BODY)
    return HiddenChainPaths(M, regime, cp, B=B, example="asym_logistic")


def _flip_changepoints(B):
    """Change-point mask of a latent sequence started from B_0 = 1."""
    n, T = B.shape
    prev = np.concatenate([np.ones((n, 1), dtype=bool), B[:, :-1]], axis=1)
    return B != prev


def hidden_ht_mixture(lam, mode1, mode2, T, n, rng, latent=None):
    """Hidden tail chain of the two-component canonical mixture.

    ``mode1``/``mode2`` are (alpha, beta, G) triples with alpha1 > alpha2 and
    limit laws G for the innovations.  The update follows the mixture case
    table: between change-points the chain contracts by the active alpha, at
    transitions it degenerates to a pure scaling or an innovation-only draw
    depending on the ordering of beta1 and beta2.  ``latent`` overrides the
    Bernoulli(lam) draws (row-wise) for scenario tests.
    """
    _check_horizon(T, n)
    a1, b1, G1 = mode1
    a2, b2, G2 = mode2
    if not a1 > a2:
        raise ValidationError("mixture modes need alpha1 > alpha2")
    if not 0.0 < lam < 1.0:
        raise ValidationError("lambda must lie in (0, 1)")
    if latent is None:
        B = rng.uniform(size=(n, T)) < lam
    else:
        B = np.asarray(latent, dtype=bool)
        if B.shape != (n, T):
            raise ValidationError("latent override must have shape (n, T)")
    cp = _flip_changepoints(B)
    M = np.empty((n, T))
    regime = np.where(B, REGIME_EXTREME, REGIME_SECOND).astype(np.int8)
    case = np.zeros((n, T), dtype=np.int8)

    # n^alpha_t bookkeeping: product of the active alpha at each step
    n_alpha = np.empty((n, T))
    n_alpha[:, 0] = np.where(B[:, 0], a1, a2)
    for t in range(1, T):
        n_alpha[:, t] = n_alpha[:, t - 1] * np.where(B[:, t], a1, a2)

    # change-point indices: k(t) = number of flips up to and including t;
    # t+1 = T^B_k exactly at flips.
    k_count = np.cumsum(cp, axis=1)
    tb1 = np.where(cp.any(axis=1), cp.argmax(axis=1) + 1, T + 1)

    M[:, 0] = np.where(B[:, 0], G1.sample(n, rng), G2.sample(n, rng))
    for t_next in range(2, T + 1):
        i = t_next - 1
        prev = M[:, i - 1]
        eps1 = G1.sample(n, rng)
        eps2 = G2.sample(n, rng)
        scale = n_alpha[:, i - 1]
        k_here = k_count[:, i]            # interval index containing t_next
        at_flip = cp[:, i]
        first_flip_at_1 = tb1 == 1
        # second change-point time for the T^B_1 = 1 branch
        row = np.empty(n, dtype=np.int8)
        # default: follow the active mode with innovation
        mode1_active = B[:, i]
        row[:] = np.where(mode1_active, MIX_CASE_A1_INNOV, MIX_CASE_A2_INNOV)
        if b1 > b2:
            # alpha2-intervals degenerate to pure scaling ...
            deg = ~mode1_active
            row[deg] = MIX_CASE_A2_SCALE
            # ... unless the chain started in mode 2 (T^B_1 = 1, k = 1)
            keep = deg & first_flip_at_1 & (k_here == 1)
            row[keep] = MIX_CASE_A2_INNOV
            # re-entry into mode 1 after an immediate start in mode 2 forgets
            # the past: innovation only
            innov = mode1_active & first_flip_at_1 & at_flip & (k_here == 2)
            row[innov] = MIX_CASE_INNOV1_ONLY
        elif b1 < b2:
            # mode-1 intervals after a change-point degenerate to scaling
            deg = mode1_active & (k_here >= 1)
            row[deg] = MIX_CASE_A1_SCALE
            # first entry into mode 2 forgets the past
            innov = ~mode1_active & at_flip & (k_here == 1)
            row[innov] = MIX_CASE_INNOV2_ONLY
        on1 = row == MIX_CASE_A1_INNOV
        on2 = row == MIX_CASE_A2_INNOV
        out = np.where(on1, a1 * prev + scale ** b1 * eps1,
              np.where(on2, a2 * prev + scale ** b2 * eps2,
              np.where(row == MIX_CASE_INNOV1_ONLY, scale ** b1 * eps1,
              np.where(row == MIX_CASE_INNOV2_ONLY, scale ** b2 * eps2,
              np.where(row == MIX_CASE_A1_SCALE, a1 * prev, a2 * prev)))))
        M[:, i] = out
        case[:, i] = row
    return HiddenChainPaths(M, regime, cp, B=B, case=case, example="ht_mixture")


def hidden_rootzen_smith(T, n, rng, p=0.5):
    """Hidden tail chain of the tail-switching chain: zero until a geometric
    termination time, then an independent copy of the chain from Laplace."""
    _check_horizon(T, n)
    term = rng.geometric(p, size=n)
    M = np.zeros((n, T))
    regime = np.full((n, T), REGIME_EXTREME, dtype=np.int8)
    cp = np.zeros((n, T), dtype=bool)
    kernel = kernels.RootzenSmithKernel(p_flip=1.0 - p)
    active = term <= T
    idx = np.arange(n)
    cp[idx[active], term[active] - 1] = True
    cur = margins.LAPLACE.ppf(rng.uniform(size=n))
    for t in range(1, T + 1):
        live = term <= t
        at = term == t
        if at.any():
            M[at, t - 1] = cur[at]
        cont = live & ~at
        if cont.any():
            nxt = kernel.sample(M[cont, t - 2], rng)
            M[cont, t - 1] = nxt
        regime[live, t - 1] = REGIME_BODY
    return HiddenChainPaths(M, regime, cp, example="rootzen_smith")


def hidden_arch(theta0, theta1, T, n, rng, kappa=None):
    """Hidden tail chain of the volatility chain on Laplace margins.

    Signed random walk M_{t+1} = s_{t+1} M_t + eps_{t+1} whose sign flips
    exactly at the change-points of a latent Bernoulli(1/2) sequence; the
    innovation law alternates between the upper- and lower-tail limits with
    the parity of the change-point count.
    """
    _check_horizon(T, n)
    from . import norming as _norming
    from . import numerics as _numerics
    if kappa is None:
        kappa = _numerics.arch_tail_index(theta1)
    gp = _norming.limit_law("arch_g_plus", theta1=theta1, kappa=kappa)
    gm = _norming.limit_law("arch_g_minus", theta1=theta1, kappa=kappa)
    B = rng.uniform(size=(n, T)) < 0.5
    cp = _flip_changepoints(B)
    k_count = np.cumsum(cp, axis=1)
    M = np.empty((n, T))
    regime = np.where(k_count % 2 == 0, REGIME_EXTREME, REGIME_NEG).astype(np.int8)
    # k odd inside [T^B_k, T^B_{k+1}) -> G_- innovations
    use_minus = k_count % 2 == 1
    M[:, 0] = np.where(use_minus[:, 0], gm.sample(n, rng), gp.sample(n, rng))
    for t_next in range(2, T + 1):
        i = t_next - 1
        eps = np.where(use_minus[:, i], gm.sample(n, rng), gp.sample(n, rng))
        s = np.where(cp[:, i], -1.0, 1.0)
        M[:, i] = s * M[:, i - 1] + eps
    return HiddenChainPaths(M, regime, cp, B=B, example="arch")


def reconstruct_paths(x0, scheme, M):
    """Affine reconstruction X_t = a_t(x0) + b_t(x0) M_t, columnwise."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    T = M.shape[1]
    a = np.array([np.asarray(scheme.a(t, x0), dtype=float) for t in range(1, T + 1)])
    b = np.array([np.asarray(scheme.b(t, x0), dtype=float) for t in range(1, T + 1)])
    return a[None, :] + b[None, :] * M if a.ndim == 1 else a.T + b.T * M


# ---------------------------------------------------------------------------
# change-point rules
# ---------------------------------------------------------------------------

@dataclass
class RatioThreshold:
    """T_1 = first t with X_t <= c X_{t-1}; later detections alternate the
    direction of the comparison (mixture-chain convention)."""

    c: float

    def __post_init__(self):
        if not 0.0 < self.c < 1.0:
            raise ValidationError("ratio threshold c must lie in (0, 1)")


@dataclass
class SignChange:
    """Times with sign(X_t) != sign(X_{t-1})."""


@dataclass
class ValueChange:
    """First time the strict alternation X_t = -X_{t-1} breaks."""


def detect_changepoints(path, rule):
    """Ordered change-point times (1-based, X_0 at index 0) under ``rule``."""
    x = np.asarray(path, dtype=float)
    if x.size < 2:
        return np.array([], dtype=int)
    cur, prev = x[1:], x[:-1]
    if isinstance(rule, SignChange):
        hits = np.sign(cur) != np.sign(prev)
        return np.flatnonzero(hits) + 1
    if isinstance(rule, ValueChange):
        hits = cur != -prev
        idx = np.flatnonzero(hits)
        return idx[:1] + 1
    if isinstance(rule, RatioThreshold):
        below = cur <= rule.c * prev
        times = []
        want_below = True
        for t in np.arange(1, x.size):
            if below[t - 1] == want_below:
                times.append(t)
                want_below = not want_below
        return np.asarray(times, dtype=int)
    raise ValidationError(f"unknown change-point rule {rule!r}")
