import math

import numpy as np
import pytest

from extreme_chains import norming
from extreme_chains.errors import (RegimeError, UnsupportedLawError,
                                   UnsupportedSchemeError, ValidationError)

from _oracles import ks_statistic


class TestMakeNorming:

    def test_canonical_substitution(self):
        s = norming.make_norming("ht_canonical", alpha=0.5, beta=0.3)
        assert s.a(3, 1.0) == pytest.approx(0.125)
        assert s.b(3, 16.0) == pytest.approx(16.0 ** 0.3)

    def test_random_walk_case(self):
        s = norming.make_norming("ht_canonical", alpha=1.0, beta=0.0)
        for t in (1, 4, 9):
            assert s.a(t, 7.5) == 7.5
            assert s.b(t, 7.5) == 1.0

    def test_scale_only_case(self):
        s = norming.make_norming("ht_canonical", alpha=0.0, beta=0.4)
        assert s.scale_only
        assert s.a(2, 9.0) == 0.0
        assert s.b(3, 9.0) == pytest.approx(9.0 ** (0.4 ** 3))

    def test_density_decay_zeta(self):
        # zeta carries the drift bookkeeping: C(t,2) + t (c - gamma)
        s = norming.make_norming("density_decay", kappa=1.0, gamma=1.0, delta=0.0)
        assert s.c == 4.0
        assert s.zeta(1) == pytest.approx(s.c - s.gamma)
        assert s.zeta(2) == pytest.approx(1.0 + 2.0 * (s.c - s.gamma))

    def test_parameter_boxes(self):
        with pytest.raises(ValidationError):
            norming.make_norming("ht_canonical", alpha=0.0, beta=0.0)
        with pytest.raises(ValidationError):
            norming.make_norming("ht_canonical", alpha=1.1, beta=0.2)
        with pytest.raises(ValidationError):
            norming.make_norming("husler_reiss", gamma=-1.0)
        with pytest.raises(ValidationError):
            norming.make_norming("negative_ht", alpha_minus=0.5,
                                 alpha_plus=-0.5, beta=0.2)
        with pytest.raises(ValidationError):
            norming.make_norming("alternating_gaussian", rho=0.8)
        with pytest.raises(UnsupportedSchemeError):
            norming.make_norming("mystery_scheme")

    def test_location_dominates_scale(self):
        # A2(a)/B2(a) witness: the normed value a_t(v) + b_t(v) x grows along
        # a threshold ladder and the location eventually dominates the scale.
        # The crossover threshold grows with t (already ~2e5 for the
        # canonical pair (0.64, 0.5) at t = 10, far beyond for the log-rate
        # schemes), so each scheme gets a ladder deep enough for t <= 10.
        cases = [
            (norming.make_norming("ht_canonical", alpha=1.0, beta=0.0),
             (1e8, 1e12), True),
            (norming.make_norming("ht_canonical", alpha=0.64, beta=0.5),
             (1e8, 1e12), True),
            (norming.make_norming("husler_reiss", gamma=1.0),
             (math.exp(100.0), math.exp(600.0)), False),
            (norming.make_norming("density_decay", kappa=1.0, gamma=1.0,
                                  delta=0.0),
             (math.exp(100.0), math.exp(400.0)), False),
        ]
        for s, (v_lo, v_hi), check_1000b in cases:
            for t in range(1, 11):
                for x in (-5.0, 0.0, 5.0):
                    lo = float(s.a(t, v_lo) + s.b(t, v_lo) * x)
                    hi = float(s.a(t, v_hi) + s.b(t, v_hi) * x)
                    assert hi > lo, (s.scheme_id, t, x)
                assert float(s.b(t, v_hi)) > 0.0
                if check_1000b:
                    assert float(s.a(t, v_hi)) > 1e3 * float(s.b(t, v_hi))
                else:
                    # log-rate schemes: the a/b ratio grows but reaches 1e3
                    # only beyond double range; witness the growth instead
                    r_lo = float(s.a(t, v_lo) / s.b(t, v_lo))
                    r_hi = float(s.a(t, v_hi) / s.b(t, v_hi))
                    assert r_hi > r_lo

    def test_scale_norming_grows(self):
        # B2(a) for the scale-only regime: b_t(v) -> infinity
        s = norming.make_norming("ht_canonical", alpha=0.0, beta=0.848)
        for t in range(1, 11):
            assert float(s.b(t, 1e12)) > float(s.b(t, 1e6)) > 1.0

    def test_alternating_sign(self):
        # C2(a): normed location alternates sign with t
        s = norming.make_norming("negative_ht", alpha_minus=-0.6,
                                 alpha_plus=-0.5, beta=0.3)
        for t in range(1, 9):
            val = float(s.a(t, 1e6))
            assert (val < 0.0) == (t % 2 == 1)


class TestUpdateFunctions:

    def test_random_walk(self):
        upd = norming.update_functions(
            norming.make_norming("ht_canonical", alpha=1.0, beta=0.0))
        x = np.array([0.3, -2.0])
        np.testing.assert_allclose(upd.psi_a(5, x), x)
        np.testing.assert_allclose(upd.psi_b(5, x), 1.0)

    def test_scale_only_power(self):
        upd = norming.update_functions(
            norming.make_norming("ht_canonical", alpha=0.0, beta=0.4))
        assert upd.scale_only
        np.testing.assert_allclose(upd.psi_b(3, np.array([2.0])), 2.0 ** 0.4)

    def test_scaled_autoregression(self):
        upd = norming.update_functions(
            norming.make_norming("ht_canonical", alpha=0.64, beta=0.5))
        # producing step t uses alpha^{(t-1) beta}
        np.testing.assert_allclose(upd.psi_a(2, np.array([1.0])), 0.64)
        np.testing.assert_allclose(upd.psi_b(2, np.array([0.0])), 0.8)
        np.testing.assert_allclose(upd.psi_b(3, np.array([0.0])), 0.64)

    def test_husler_reiss_is_random_walk(self):
        upd = norming.update_functions(norming.make_norming("husler_reiss", gamma=0.7))
        x = np.array([1.5])
        np.testing.assert_allclose(upd.psi_a(4, x), x)
        np.testing.assert_allclose(upd.psi_b(4, x), 1.0)

    def test_density_decay_drift(self):
        s = norming.make_norming("density_decay", kappa=2.0, gamma=1.0, delta=0.0)
        upd = norming.update_functions(s)
        # M_{t+1} = M_t - (t/gamma^2) log kappa + eps
        np.testing.assert_allclose(upd.psi_a(4, np.array([0.0])),
                                   -3.0 * math.log(2.0))

    def test_alternating_gaussian(self):
        upd = norming.update_functions(
            norming.make_norming("alternating_gaussian", rho=-0.8))
        np.testing.assert_allclose(upd.psi_a(2, np.array([1.0])), -0.64)
        np.testing.assert_allclose(upd.psi_b(2, np.array([0.0])), 0.8)
        np.testing.assert_allclose(upd.psi_b(4, np.array([0.0])), 0.8 ** 3)

    def test_negative_ht_parity(self):
        s = norming.make_norming("negative_ht", alpha_minus=-0.6,
                                 alpha_plus=-0.5, beta=0.3)
        upd = norming.update_functions(s)
        # producing an even step applies alpha_plus
        np.testing.assert_allclose(upd.psi_a(2, np.array([1.0])), -0.5)
        np.testing.assert_allclose(upd.psi_a(3, np.array([1.0])), -0.6)
        np.testing.assert_allclose(upd.psi_b(2, np.array([0.0])),
                                   abs(s.coef(1)) ** 0.3)

    def test_b2c_condition(self):
        # sup{x : x^beta <= c} = c^{1/beta} -> 0 as c -> 0
        beta = 0.848
        for c in (1e-1, 1e-3, 1e-6):
            assert c ** (1.0 / beta) == pytest.approx(
                max(0.0, c ** (1.0 / beta)))
        assert 1e-12 ** (1.0 / beta) < 1e-9


class TestSemigroup:

    def test_canonical_exact(self):
        s = norming.make_norming("ht_canonical", alpha=0.64, beta=0.5)
        for t in (1, 2, 5):
            v = 37.0
            assert s.a(t + 1, v) == pytest.approx(float(s.a(1, s.a(t, v))), rel=1e-14)

    def test_scale_only_exact(self):
        s = norming.make_norming("ht_canonical", alpha=0.0, beta=0.848)
        for t in (1, 2, 5):
            v = 11.0
            assert s.b(t + 1, v) == pytest.approx(float(s.b(1, s.b(t, v))), rel=1e-14)

    @pytest.mark.parametrize("scheme", [
        norming.make_norming("husler_reiss", gamma=1.0),
        norming.make_norming("density_decay", kappa=1.0, gamma=1.0, delta=0.0),
    ])
    def test_asymptotic_composition(self, scheme):
        # a(a_t(v)) / a_{t+1}(v) -> 1 along a growing threshold ladder
        # (loglog-rate convergence: the ladder has to reach deep)
        devs = []
        for L in (20.0, 100.0, 400.0):
            v = math.exp(L)
            ratio = float(scheme.a(1, scheme.a(1, v)) / scheme.a(2, v))
            devs.append(abs(ratio - 1.0))
        assert devs[2] < devs[1] < devs[0]
        assert devs[-1] < 0.01


class TestUpdateConsistency:
    """A2(b): finite-threshold quotients approach the closed-form updates."""

    @pytest.mark.parametrize("scheme,v", [
        (norming.make_norming("ht_canonical", alpha=1.0, beta=0.0), 1e6),
        (norming.make_norming("ht_canonical", alpha=0.64, beta=0.5), 1e6),
        (norming.make_norming("ht_canonical", alpha=0.3, beta=0.0), 1e6),
        (norming.make_norming("ht_canonical", alpha=0.0, beta=0.848), 1e6),
        (norming.make_norming("negative_ht", alpha_minus=-0.6, alpha_plus=-0.5,
                              beta=0.3), 1e6),
        (norming.make_norming("alternating_gaussian", rho=-0.8), 1e6),
    ])
    def test_polynomial_rate_schemes_within_2pct(self, scheme, v):
        upd = norming.update_functions(scheme)
        for t in (1, 2, 3):
            for x in (-2.0, 0.5, 3.0):
                if getattr(upd, "scale_only", False) and x <= 0.0:
                    continue
                pa_hat, pb_hat = norming.update_limit_quotients(scheme, t, v, x)
                pa = upd.psi_a(t + 1, x)
                pb = upd.psi_b(t + 1, x)
                assert abs(float(pa_hat) - float(pa)) <= 0.02 * max(1.0, abs(float(pa)))
                assert abs(float(pb_hat) / float(pb) - 1.0) <= 0.02

    @pytest.mark.parametrize("scheme", [
        norming.make_norming("husler_reiss", gamma=1.0),
        norming.make_norming("density_decay", kappa=1.0, gamma=1.0, delta=0.0),
    ])
    def test_log_rate_schemes_converge(self, scheme):
        # these schemes converge at (log v)^{-1/2} / loglog v / log v rates,
        # far slower than polynomial; witness decreasing deviation instead
        upd = norming.update_functions(scheme)
        devs = []
        for L in (10.0, 30.0, 90.0):
            v = math.exp(L)
            pa_hat, pb_hat = norming.update_limit_quotients(scheme, 1, v, 1.0)
            pa = float(upd.psi_a(2, 1.0))
            devs.append(abs(float(pa_hat) - pa) + abs(float(pb_hat) - 1.0))
        assert devs[2] < devs[1] < devs[0]


class TestRemainders:

    def test_exact_norming_zero_remainder(self):
        s = norming.make_norming("ht_canonical", alpha=1.0, beta=0.0)
        for v in (10.0, 1e5):
            ra, rb = norming.remainder_terms(s, 3, v, 2.5)
            assert float(ra) == 0.0
            assert float(rb) == 0.0

    def test_scaled_autoregression_rate(self):
        # r_b(v, x) = O(v^{beta-1}): doubling v scales it by 2^{beta-1}
        s = norming.make_norming("ht_canonical", alpha=0.64, beta=0.5)
        v = np.geomspace(1e4, 1e7, 7)
        rb = np.array([float(norming.remainder_terms(s, 1, vv, 1.0)[1]) for vv in v])
        ratios = rb[1:] / rb[:-1]
        step = (v[1] / v[0]) ** (0.5 - 1.0)
        np.testing.assert_allclose(ratios, step, rtol=0.02)

    def test_husler_reiss_boundedness(self):
        s = norming.make_norming("husler_reiss", gamma=1.0)
        vals = []
        for L in (10.0, 20.0, 30.0):
            ra, _ = norming.remainder_terms(s, 1, math.exp(L), 0.0)
            vals.append(float(ra) * math.sqrt(L))
        vals = np.array(vals)
        assert vals.max() - vals.min() < 0.5 * np.abs(vals).max()

    def test_negative_ht_exact_location(self):
        s = norming.make_norming("negative_ht", alpha_minus=-0.6,
                                 alpha_plus=-0.5, beta=0.3)
        for t in (1, 2, 3):
            ra, rb = norming.remainder_terms(s, t, 1e5, 1.5)
            assert abs(float(ra)) < 1e-10
            assert abs(float(rb)) < 1e-2


class TestLimitLaws:

    def test_gaussian_exponential_values(self):
        law = norming.limit_law("gaussian_exponential", rho=0.8)
        assert float(law.cdf(0.0)) == 0.5
        assert law.var == pytest.approx(0.4608)

    def test_g1_symmetric_point(self):
        law = norming.limit_law("asym_logistic_g1", phi1=0.5, phi2=0.5, nu=0.152)
        assert float(law.cdf(0.0)) == pytest.approx(2.0 ** (0.152 - 1.0), rel=1e-12)

    def test_husler_reiss_at_zero(self):
        # high-precision evaluation of 1 - exp(-(8 pi)^{-1/2})
        law = norming.limit_law("husler_reiss", gamma=1.0)
        assert float(law.cdf(0.0)) == pytest.approx(0.18083613862358883, abs=1e-14)

    def test_arch_g_identity(self):
        gp = norming.limit_law("arch_g_plus", theta1=0.7, kappa=3.172)
        gm = norming.limit_law("arch_g_minus", theta1=0.7, kappa=3.172)
        xs = np.linspace(-8.0, 8.0, 65)
        assert np.max(np.abs(gm.cdf(xs) - (1.0 - gp.cdf(-xs)))) < 1e-12

    def test_atom_bookkeeping(self):
        k1 = norming.limit_law("asym_logistic_k1", phi1=0.5, phi2=0.5, nu=0.152)
        assert k1.neg_mass == 0.5 and k1.has_atoms
        k2 = norming.limit_law("asym_logistic_k2", phi1=0.5)
        assert k2.pos_mass == 0.5
        rng = np.random.default_rng(0)
        with pytest.raises(RegimeError):
            k1.sample(10, rng)

    def test_expar_limit_unknown(self):
        with pytest.raises(UnsupportedLawError):
            norming.limit_law("expar")
        with pytest.raises(UnsupportedLawError):
            norming.limit_law("made_up_law")

    @pytest.mark.parametrize("law_id,params", [
        ("gaussian_exponential", {"rho": 0.8}),
        ("bev_logistic", {"gamma": 0.152}),
        ("inverted_bev_logistic", {"gamma": 0.152}),
        ("husler_reiss", {"gamma": 1.0}),
        ("density_decay", {"c": 4.0, "gamma": 1.0}),
        ("asym_logistic_g1", {"phi1": 0.3, "phi2": 0.6, "nu": 0.4}),
        ("exponential", {}),
        ("arch_g_plus", {"theta1": 0.7, "kappa": 3.172}),
        ("arch_g_minus", {"theta1": 0.7, "kappa": 3.172}),
    ])
    def test_sampler_matches_cdf(self, law_id, params):
        law = norming.limit_law(law_id, **params)
        rng = np.random.default_rng(17)
        sample = law.sample(100_000, rng)
        assert ks_statistic(sample, law.cdf) < 0.006
