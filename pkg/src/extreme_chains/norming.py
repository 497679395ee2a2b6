"""Norming schemes a_t, b_t, their update functions, limit laws, and the
remainder terms that witness the convergence assumptions numerically.

Update-function indexing: ``psi_a(t, x)`` and ``psi_b(t, x)`` are the maps
producing M_t from M_{t-1}, stored under the index of the step they produce
(t >= 2).
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm

from .errors import (RegimeError, UnsupportedLawError, UnsupportedSchemeError,
                     ValidationError)

__all__ = [
    "NormingScheme",
    "UpdateFunctions",
    "LimitLaw",
    "make_norming",
    "update_functions",
    "limit_law",
    "remainder_terms",
    "remainder_table",
    "remainder_table_to_csv",
    "update_limit_quotients",
    "SCHEME_IDS",
    "LIMIT_LAW_IDS",
]


def _binom2(t):
    return t * (t - 1) / 2.0


@dataclass
class NormingScheme:
    """Time-indexed location/scale norming pair with one-step base maps."""

    scheme_id: str
    params: dict
    scale: str                      # marginal scale the scheme lives on
    scale_only: bool = False        # Theorem-2 regime (no location norming)
    alternating: bool = False       # Theorem-3 regime (sign-alternating)

    def a(self, t, v):
        raise NotImplementedError

    def b(self, t, v):
        raise NotImplementedError

    def a1(self, v):
        return self.a(1, v)

    def b1(self, v):
        return self.b(1, v)

    def one_step_a(self, t, w):
        """One-step location map applied at time t (parity-aware for
        alternating schemes where the map differs by tail)."""
        return self.a(1, w)


class HtCanonicalScheme(NormingScheme):
    """Canonical family a(v) = alpha v, b(v) = v**beta on the exponential scale.

    Three regimes: random walk (alpha=1, beta=0), scaled autoregression
    (alpha in (0,1)), and the scale-only exponential autoregression (alpha=0,
    beta in (0,1)) where b_t(v) = v**(beta**t).
    """

    def __init__(self, alpha, beta, scale="exponential"):
        ok = (0.0 <= alpha <= 1.0) and (0.0 <= beta < 1.0) and (alpha, beta) != (0.0, 0.0)
        if not ok:
            raise ValidationError(
                "(alpha, beta) must lie in [0,1] x [0,1) and not be (0, 0)")
        if alpha == 1.0 and beta != 0.0:
            raise ValidationError("alpha = 1 requires beta = 0")
        super().__init__("ht_canonical", {"alpha": alpha, "beta": beta}, scale,
                         scale_only=(alpha == 0.0))
        self.alpha = float(alpha)
        self.beta = float(beta)

    def a(self, t, v):
        v = np.asarray(v, dtype=float)
        if self.alpha == 0.0:
            return np.zeros_like(v)
        return self.alpha ** t * v

    def b(self, t, v):
        v = np.asarray(v, dtype=float)
        if self.alpha == 0.0:
            return v ** (self.beta ** t)
        if self.beta == 0.0:
            return np.ones_like(v)
        return v ** self.beta


class HuslerReissScheme(NormingScheme):
    """Norming for the inverted max-stable chain with Husler-Reiss dependence.

    a_t(v) = v exp(-g t (2 log v)^{1/2} + g t loglog v / (2 log v)^{1/2}
    + (g t)^2 / 2), b_t(v) = a_t(v)/(log v)^{1/2}.  The loglog term uses the
    (2 log v)^{-1/2} scaling that makes the normalized kernel converge to the
    stated limit law (checked numerically in the test suite).
    """

    def __init__(self, gamma):
        if gamma <= 0.0:
            raise ValidationError("gamma must be positive")
        super().__init__("husler_reiss", {"gamma": gamma}, "exponential")
        self.gamma = float(gamma)

    def a(self, t, v):
        v = np.asarray(v, dtype=float)
        g = self.gamma
        L = np.log(v)
        s = np.sqrt(2.0 * L)
        return v * np.exp(-g * t * s + g * t * np.log(L) / s + (g * t) ** 2 / 2.0)

    def b(self, t, v):
        v = np.asarray(v, dtype=float)
        return self.a(t, v) / np.sqrt(np.log(v))


class DensityDecayScheme(NormingScheme):
    """Norming for inverted max-stable chains whose spectral density decays
    like w**delta exp(-kappa w**-gamma) at the origin.

    With c = delta + 2(1 + gamma):
      a_t(v) = v (log v / kappa)^{-t/gamma}
               (1 + (zeta_t/gamma^2) loglog v / log v + t C1 / log v),
      b_t(v) = a_t(v) / log v,
    zeta_t = C(t,2) + t (c - gamma) and C1 = -C0/gamma with
    C0 = (c/gamma - 1) log kappa - log(gamma kappa c); these constants make
    the one-step normalized kernel converge to K(x) = 1 - exp(-c e^{gamma x})
    exactly and keep the t-step update a pure random walk with drift
    -(t/gamma^2) log kappa.
    """

    def __init__(self, kappa, gamma, delta):
        if kappa <= 0.0 or gamma <= 0.0:
            raise ValidationError("kappa and gamma must be positive")
        super().__init__("density_decay",
                         {"kappa": kappa, "gamma": gamma, "delta": delta},
                         "exponential")
        self.kappa = float(kappa)
        self.gamma = float(gamma)
        self.delta = float(delta)
        self.c = delta + 2.0 * (1.0 + gamma)
        self.C0 = (self.c / gamma - 1.0) * math.log(kappa) \
            - math.log(gamma * kappa * self.c)
        self.C1 = -self.C0 / gamma

    def zeta(self, t):
        return _binom2(t) + t * (self.c - self.gamma)

    def a(self, t, v):
        v = np.asarray(v, dtype=float)
        g = self.gamma
        L = np.log(v)
        corr = 1.0 + (self.zeta(t) / g ** 2) * np.log(L) / L + t * self.C1 / L
        return v * (L / self.kappa) ** (-t / g) * corr

    def b(self, t, v):
        v = np.asarray(v, dtype=float)
        return self.a(t, v) / np.log(v)


class NegativeHtScheme(NormingScheme):
    """Alternating canonical norming for negatively dependent chains."""

    def __init__(self, alpha_minus, alpha_plus, beta):
        for nm, a in (("alpha_minus", alpha_minus), ("alpha_plus", alpha_plus)):
            if not -1.0 < a < 0.0:
                raise ValidationError(f"{nm} must lie in (-1, 0)")
        if not 0.0 <= beta < 1.0:
            raise ValidationError("beta must lie in [0, 1)")
        super().__init__("negative_ht",
                         {"alpha_minus": alpha_minus, "alpha_plus": alpha_plus,
                          "beta": beta},
                         "laplace", alternating=True)
        self.alpha_minus = float(alpha_minus)
        self.alpha_plus = float(alpha_plus)
        self.beta = float(beta)

    def coef(self, t):
        if t % 2 == 1:
            return self.alpha_minus ** ((t + 1) // 2) * self.alpha_plus ** ((t - 1) // 2)
        return self.alpha_minus ** (t // 2) * self.alpha_plus ** (t // 2)

    def a(self, t, v):
        return self.coef(t) * np.asarray(v, dtype=float)

    def b(self, t, v):
        return np.abs(np.asarray(v, dtype=float)) ** self.beta

    def one_step_a(self, t, w):
        # from a lower-tail state (t odd) the relevant map is alpha_plus
        al = self.alpha_plus if t % 2 == 1 else self.alpha_minus
        return al * np.asarray(w, dtype=float)


class AlternatingGaussianScheme(NormingScheme):
    """Negatively dependent Gaussian copula chain on Laplace margins."""

    def __init__(self, rho):
        if not -1.0 < rho < 0.0:
            raise ValidationError("rho must lie in (-1, 0)")
        super().__init__("alternating_gaussian", {"rho": rho}, "laplace",
                         alternating=True)
        self.rho = float(rho)

    def a(self, t, v):
        return (-1.0) ** t * self.rho ** (2 * t) * np.asarray(v, dtype=float)

    def b(self, t, v):
        return np.sqrt(np.abs(np.asarray(v, dtype=float)))


_SCHEME_BUILDERS = {
    "ht_canonical": HtCanonicalScheme,
    "husler_reiss": HuslerReissScheme,
    "density_decay": DensityDecayScheme,
    "negative_ht": NegativeHtScheme,
    "alternating_gaussian": AlternatingGaussianScheme,
}

SCHEME_IDS = tuple(sorted(_SCHEME_BUILDERS))


def make_norming(scheme_id, **params):
    """Construct a validated norming scheme from the catalogue."""
    try:
        builder = _SCHEME_BUILDERS[scheme_id]
    except KeyError:
        raise UnsupportedSchemeError(
            f"unknown norming scheme '{scheme_id}'; known: {', '.join(SCHEME_IDS)}")
    return builder(**params)


@dataclass
class UpdateFunctions:
    """Update maps for the tail-chain recursion M_t = psi_a(t, M) + psi_b(t, M) eps."""

    psi_a: callable
    psi_b: callable
    scale_only: bool = False
    alternating: bool = False
    scheme_id: str = ""


def update_functions(scheme):
    """Closed-form update functions of a catalogued scheme."""
    if isinstance(scheme, HtCanonicalScheme):
        al, be = scheme.alpha, scheme.beta
        if al == 0.0:
            return UpdateFunctions(
                psi_a=lambda t, x: np.zeros_like(np.asarray(x, dtype=float)),
                psi_b=lambda t, x: np.asarray(x, dtype=float) ** be,
                scale_only=True, scheme_id=scheme.scheme_id)
        return UpdateFunctions(
            psi_a=lambda t, x: al * np.asarray(x, dtype=float),
            psi_b=lambda t, x: np.full_like(np.asarray(x, dtype=float),
                                            al ** ((t - 1) * be)),
            scheme_id=scheme.scheme_id)
    if isinstance(scheme, HuslerReissScheme):
        return UpdateFunctions(
            psi_a=lambda t, x: np.asarray(x, dtype=float),
            psi_b=lambda t, x: np.ones_like(np.asarray(x, dtype=float)),
            scheme_id=scheme.scheme_id)
    if isinstance(scheme, DensityDecayScheme):
        g, kap = scheme.gamma, scheme.kappa
        return UpdateFunctions(
            psi_a=lambda t, x: np.asarray(x, dtype=float)
            - ((t - 1) / g ** 2) * math.log(kap),
            psi_b=lambda t, x: np.ones_like(np.asarray(x, dtype=float)),
            scheme_id=scheme.scheme_id)
    if isinstance(scheme, NegativeHtScheme):
        am, ap, be = scheme.alpha_minus, scheme.alpha_plus, scheme.beta
        return UpdateFunctions(
            psi_a=lambda t, x: (ap if t % 2 == 0 else am) * np.asarray(x, dtype=float),
            psi_b=lambda t, x: np.full_like(np.asarray(x, dtype=float),
                                            abs(scheme.coef(t - 1)) ** be),
            alternating=True, scheme_id=scheme.scheme_id)
    if isinstance(scheme, AlternatingGaussianScheme):
        r = scheme.rho
        return UpdateFunctions(
            psi_a=lambda t, x: -r * r * np.asarray(x, dtype=float),
            psi_b=lambda t, x: np.full_like(np.asarray(x, dtype=float),
                                            abs(r) ** (t - 1)),
            alternating=True, scheme_id=scheme.scheme_id)
    raise UnsupportedSchemeError(f"no update functions for {scheme!r}")


# ---------------------------------------------------------------------------
# limit laws
# ---------------------------------------------------------------------------

@dataclass
class LimitLaw:
    """Limit law of a normalized kernel: continuous part plus atoms at +-inf.

    ``cdf``/``ppf`` describe the normalised continuous component; the atom
    masses are carried separately and never enter floating arithmetic.
    """

    name: str
    cdf: callable
    ppf: callable
    neg_mass: float = 0.0
    pos_mass: float = 0.0
    mean: float = field(default=np.nan)
    var: float = field(default=np.nan)
    support: tuple = (-np.inf, np.inf)

    @property
    def has_atoms(self):
        return self.neg_mass > 0.0 or self.pos_mass > 0.0

    def sample(self, n, rng):
        if self.has_atoms:
            raise RegimeError(
                f"{self.name} carries atoms at +-inf; use a hidden-chain simulator")
        return self.ppf(rng.uniform(size=n))


def _gaussian_law(sd, name):
    return LimitLaw(name=name,
                    cdf=lambda x: norm.cdf(np.asarray(x, dtype=float) / sd),
                    ppf=lambda p: sd * norm.ppf(p),
                    mean=0.0, var=sd * sd)


def _law_gaussian_exponential(rho):
    if not -1.0 < rho < 1.0 or rho == 0.0:
        raise ValidationError("rho must lie in (-1, 1), nonzero")
    sd = math.sqrt(2.0 * rho * rho * (1.0 - rho * rho))
    return _gaussian_law(sd, f"gaussian_exponential(rho={rho})")


def _law_gaussian_margins(rho):
    if not -1.0 < rho < 1.0 or rho == 0.0:
        raise ValidationError("rho must lie in (-1, 1), nonzero")
    return _gaussian_law(math.sqrt(1.0 - rho * rho), f"gaussian_margins(rho={rho})")


def _law_bev_logistic(gamma):
    """K(s) = (1 + e^{-s/gamma})^{gamma-1}: one-step limit of the logistic
    BEV chain under the identity norming."""
    if not 0.0 < gamma < 1.0:
        raise ValidationError("gamma must lie in (0, 1)")

    def cdf(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(over="ignore"):
            return (1.0 + np.exp(-x / gamma)) ** (gamma - 1.0)

    def ppf(p):
        p = np.asarray(p, dtype=float)
        return -gamma * np.log(p ** (1.0 / (gamma - 1.0)) - 1.0)

    return LimitLaw(name=f"bev_logistic(gamma={gamma})", cdf=cdf, ppf=ppf)


def _law_inverted_bev_logistic(gamma):
    """K(z) = 1 - exp(-gamma z^{1/gamma}) on (0, inf): scale-norming limit of
    the inverted logistic chain."""
    if not 0.0 < gamma < 1.0:
        raise ValidationError("gamma must lie in (0, 1)")

    def cdf(z):
        z = np.asarray(z, dtype=float)
        return np.where(z <= 0.0, 0.0, -np.expm1(-gamma * np.maximum(z, 0.0) ** (1.0 / gamma)))

    def ppf(p):
        p = np.asarray(p, dtype=float)
        return (-np.log1p(-p) / gamma) ** gamma

    return LimitLaw(name=f"inverted_bev_logistic(gamma={gamma})", cdf=cdf,
                    ppf=ppf, support=(0.0, np.inf))


def _law_husler_reiss(gamma):
    """K(x) = 1 - exp(-(8 pi)^{-1/2} gamma exp(sqrt(2) x / gamma))."""
    if gamma <= 0.0:
        raise ValidationError("gamma must be positive")
    theta = gamma / math.sqrt(8.0 * math.pi)
    rate = math.sqrt(2.0) / gamma

    def cdf(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(over="ignore"):
            return -np.expm1(-theta * np.exp(rate * x))

    def ppf(p):
        p = np.asarray(p, dtype=float)
        return np.log(-np.log1p(-p) / theta) / rate

    return LimitLaw(name=f"husler_reiss(gamma={gamma})", cdf=cdf, ppf=ppf)


def _law_density_decay(c=None, gamma=None, delta=None, kappa=None):
    """K(x) = 1 - exp(-c exp(gamma x)); c may be given or derived from delta."""
    if c is None:
        c = delta + 2.0 * (1.0 + gamma)
    if c <= 0.0 or gamma is None or gamma <= 0.0:
        raise ValidationError("need c > 0 and gamma > 0")

    def cdf(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(over="ignore"):
            return -np.expm1(-c * np.exp(gamma * x))

    def ppf(p):
        p = np.asarray(p, dtype=float)
        return np.log(-np.log1p(-p) / c) / gamma

    return LimitLaw(name=f"density_decay(c={c}, gamma={gamma})", cdf=cdf, ppf=ppf)


def _law_asym_logistic_g1(phi1, phi2, nu):
    """G1: continuous component of the extreme-following mode."""
    for nm, val in (("phi1", phi1), ("phi2", phi2), ("nu", nu)):
        if not 0.0 < val < 1.0:
            raise ValidationError(f"{nm} must lie in (0, 1)")
    ratio = phi2 / phi1

    def cdf(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(over="ignore"):
            return (1.0 + (ratio * np.exp(-x)) ** (1.0 / nu)) ** (nu - 1.0)

    def ppf(p):
        p = np.asarray(p, dtype=float)
        return -np.log((p ** (1.0 / (nu - 1.0)) - 1.0) ** nu / ratio)

    return LimitLaw(name=f"asym_logistic_g1({phi1},{phi2},{nu})", cdf=cdf, ppf=ppf)


def _law_asym_logistic_k1(phi1, phi2, nu):
    g1 = _law_asym_logistic_g1(phi1, phi2, nu)
    return LimitLaw(name=f"asym_logistic_k1({phi1},{phi2},{nu})", cdf=g1.cdf,
                    ppf=g1.ppf, neg_mass=1.0 - phi1)


def _law_exponential():
    def cdf(x):
        x = np.asarray(x, dtype=float)
        return np.where(x <= 0.0, 0.0, -np.expm1(-np.maximum(x, 0.0)))

    return LimitLaw(name="exponential", cdf=cdf,
                    ppf=lambda p: -np.log1p(-np.asarray(p, dtype=float)),
                    mean=1.0, var=1.0, support=(0.0, np.inf))


def _law_asym_logistic_k2(phi1):
    if not 0.0 < phi1 < 1.0:
        raise ValidationError("phi1 must lie in (0, 1)")
    e = _law_exponential()
    return LimitLaw(name=f"asym_logistic_k2(phi1={phi1})", cdf=e.cdf, ppf=e.ppf,
                    pos_mass=phi1, support=(0.0, np.inf))


def _law_arch_g_plus(theta1, kappa):
    if not 0.0 < theta1 <= 1.0:
        raise ValidationError("theta1 must lie in (0, 1]")
    rt = math.sqrt(theta1)

    def cdf(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(over="ignore"):
            return 2.0 * norm.cdf(np.exp(x / kappa) / rt) - 1.0

    def ppf(p):
        p = np.asarray(p, dtype=float)
        return kappa * np.log(rt * norm.ppf((1.0 + p) / 2.0))

    return LimitLaw(name=f"arch_g_plus(theta1={theta1})", cdf=cdf, ppf=ppf)


def _law_arch_g_minus(theta1, kappa):
    if not 0.0 < theta1 <= 1.0:
        raise ValidationError("theta1 must lie in (0, 1]")
    rt = math.sqrt(theta1)

    def cdf(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(over="ignore"):
            return 2.0 * norm.cdf(-np.exp(-x / kappa) / rt)

    def ppf(p):
        p = np.asarray(p, dtype=float)
        return -kappa * np.log(-rt * norm.ppf(p / 2.0))

    return LimitLaw(name=f"arch_g_minus(theta1={theta1})", cdf=cdf, ppf=ppf)


def _law_expar(**_):
    raise UnsupportedLawError(
        "no limiting kernel is available for the exponential autoregressive "
        "chain; simulate the actual chain instead")


_LAW_BUILDERS = {
    "gaussian_exponential": _law_gaussian_exponential,
    "gaussian_margins": _law_gaussian_margins,
    "bev_logistic": _law_bev_logistic,
    "inverted_bev_logistic": _law_inverted_bev_logistic,
    "husler_reiss": _law_husler_reiss,
    "density_decay": _law_density_decay,
    "asym_logistic_g1": _law_asym_logistic_g1,
    "asym_logistic_k1": _law_asym_logistic_k1,
    "asym_logistic_k2": _law_asym_logistic_k2,
    "exponential": _law_exponential,
    "arch_g_plus": _law_arch_g_plus,
    "arch_g_minus": _law_arch_g_minus,
    "expar": _law_expar,
}

LIMIT_LAW_IDS = tuple(sorted(_LAW_BUILDERS))


def limit_law(law_id, **params):
    """Construct a catalogued limit law; unknown ids raise UnsupportedLawError."""
    try:
        builder = _LAW_BUILDERS[law_id]
    except KeyError:
        raise UnsupportedLawError(
            f"unknown limit law '{law_id}'; known: {', '.join(LIMIT_LAW_IDS)}")
    return builder(**params)


# ---------------------------------------------------------------------------
# remainder diagnostics
# ---------------------------------------------------------------------------

def remainder_terms(scheme, t, v, x):
    """Remainder pair (r_a, r_b) of the t -> t+1 norming consistency.

    r_a = [a_{t+1}(v) - a(A) + b_{t+1}(v) psi_a(x)] / b(A) and
    r_b = 1 - b_{t+1}(v) psi_b(x) / b(A) with A = a_t(v) + b_t(v) x; both
    vanish as v grows when the scheme satisfies its convergence assumption.
    Scale-only schemes use A = b_t(v) x and have r_a = 0 identically.
    """
    upd = update_functions(scheme)
    v = np.asarray(v, dtype=float)
    x = np.asarray(x, dtype=float)
    if upd.scale_only:
        A = scheme.b(t, v) * x
        r_b = 1.0 - scheme.b(t + 1, v) * upd.psi_b(t + 1, x) / scheme.b(1, A)
        return np.zeros_like(r_b), r_b
    A = scheme.a(t, v) + scheme.b(t, v) * x
    bA = scheme.b(1, A)
    r_a = (scheme.a(t + 1, v) - scheme.one_step_a(t, A)
           + scheme.b(t + 1, v) * upd.psi_a(t + 1, x)) / bA
    r_b = 1.0 - scheme.b(t + 1, v) * upd.psi_b(t + 1, x) / bA
    return r_a, r_b


def remainder_table(scheme, t_values, v_values, x_values=(-5.0, 0.0, 5.0)):
    """Rows of (t, v, x, r_a, r_b) over a grid of steps, thresholds, points.

    Grid combinations whose norming argument a_t(v) + b_t(v) x falls outside
    the scheme's marginal support (possible at small thresholds with very
    negative x) are skipped: the remainder is defined only in range.
    """
    rows = []
    for t in t_values:
        for v in v_values:
            for x in x_values:
                if getattr(scheme, "scale_only", False):
                    if x <= 0.0:
                        continue
                    arg = float(scheme.b(int(t), float(v))) * x
                else:
                    arg = float(scheme.a(int(t), float(v))) \
                        + float(scheme.b(int(t), float(v))) * x
                if scheme.scale == "exponential" and arg <= 0.0:
                    continue
                r_a, r_b = remainder_terms(scheme, int(t), float(v), float(x))
                rows.append((int(t), float(v), float(x), float(r_a), float(r_b)))
    return rows


def remainder_table_to_csv(path, rows):
    import csv
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "v", "x", "r_a", "r_b"])
        for t, v, x, ra, rb in rows:
            writer.writerow([t, repr(v), repr(x), repr(ra), repr(rb)])


def update_limit_quotients(scheme, t, v, x):
    """Finite-v quotients whose limits define the update functions.

    Returns (psi_a_hat, psi_b_hat) evaluated at threshold ``v``; compare with
    ``update_functions`` closed forms to witness the convergence.
    """
    v = np.asarray(v, dtype=float)
    x = np.asarray(x, dtype=float)
    if getattr(scheme, "scale_only", False):
        A = scheme.b(t, v) * x
        psi_b_hat = scheme.b(1, A) / scheme.b(t + 1, v)
        return np.zeros_like(psi_b_hat), psi_b_hat
    A = scheme.a(t, v) + scheme.b(t, v) * x
    psi_a_hat = (scheme.one_step_a(t, A) - scheme.a(t + 1, v)) / scheme.b(t + 1, v)
    psi_b_hat = scheme.b(1, A) / scheme.b(t + 1, v)
    return psi_a_hat, psi_b_hat
