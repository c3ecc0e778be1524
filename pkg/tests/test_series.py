import math

import numpy as np
import pytest

from bgw.series import (
    SeriesControl,
    SeriesNonConvergence,
    beta,
    digamma,
    gen_binom,
    log_gamma,
    sum_series,
)


class TestGenBinom:
    def test_trivial_values(self):
        assert gen_binom(1.0, 1) == 1.0
        assert gen_binom(0.5, 2) == pytest.approx(-0.125, abs=1e-15)
        assert gen_binom(0.7, 0) == 1.0

    def test_theta_one_vanishes_above_one(self):
        for j in range(2, 40):
            assert gen_binom(1.0, j) == 0.0

    def test_direct_product_oracle(self):
        # oracle: theta (theta-1) ... (theta-24) / 25!
        expected = 0.003547562220690122
        assert gen_binom(0.3, 25) == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize("alpha", [-1.4, -1.0, -0.5, 0.3, 0.9])
    def test_matches_direct_product_small_j(self, alpha):
        for j in range(0, 12):
            prod = 1.0
            for i in range(j):
                prod *= alpha - i
            prod /= math.factorial(j)
            assert gen_binom(alpha, j) == pytest.approx(prod, rel=1e-12, abs=1e-300)

    def test_sign_pattern(self):
        # C(theta, j)(-1)^(j+1) > 0 for theta in (0,1), all j >= 1
        for theta in (0.1, 0.25, 0.5, 0.75, 0.9):
            j = np.arange(1, 200)
            vals = gen_binom(theta, j) * (-1.0) ** (j + 1)
            assert np.all(vals > 0)

    def test_vectorized_matches_scalar(self):
        j = np.arange(0, 50)
        vec = gen_binom(0.42, j)
        sc = np.array([gen_binom(0.42, int(k)) for k in j])
        np.testing.assert_allclose(vec, sc, rtol=1e-14)

    def test_rejects_negative_j(self):
        with pytest.raises(ValueError):
            gen_binom(0.5, -1)


class TestSpecialFunctions:
    def test_beta_trivials(self):
        assert beta(1.0, 1.0) == pytest.approx(1.0, rel=1e-14)
        assert beta(0.5, 2.0) == pytest.approx(4.0 / 3.0, rel=1e-13)

    def test_digamma_recurrence(self):
        assert digamma(2.0) - digamma(3.0) == pytest.approx(-0.5, abs=1e-13)

    def test_log_gamma_against_factorials(self):
        for n in range(1, 20):
            assert log_gamma(n + 1) == pytest.approx(math.log(math.factorial(n)), rel=1e-13)

    def test_accuracy_on_range(self):
        # spot checks against 50-digit references
        assert log_gamma(37.5) == pytest.approx(97.52177522288820, rel=1e-14)
        assert digamma(49.25) == pytest.approx(3.8867227284783609, rel=1e-13)

    @pytest.mark.parametrize("fn", [log_gamma, digamma])
    def test_domain_errors(self, fn):
        with pytest.raises(ValueError):
            fn(0.0)
        with pytest.raises(ValueError):
            fn(-1.2)

    def test_beta_domain_error(self):
        with pytest.raises(ValueError):
            beta(0.0, 1.0)


class TestSumSeries:
    def test_geometric(self):
        res = sum_series(lambda j: 0.5 ** np.asarray(j, dtype=float), SeriesControl(tol=1e-12))
        assert res.value == pytest.approx(1.0, abs=1e-11)
        assert res.stopped_by == "tol"

    def test_theta_one_collapses_to_first_term(self):
        # C(1, j) = 0 for j >= 2, so only the j = 1 term contributes
        def term(j):
            jf = np.asarray(j, dtype=float)
            return gen_binom(1.0, j) * (-1.0) ** (jf + 1) * 0.37**jf

        res = sum_series(term)
        assert res.value == 0.37

    def test_brute_force_partial_sum_oracle(self):
        # frozen oracle: direct 10^7-term partial sum of
        # sum_j C(0.5, j)(-1)^(j+1) j^(-2)  ->  0.5433832387483943
        def term(j):
            jf = np.asarray(j, dtype=float)
            return gen_binom(0.5, j) * (-1.0) ** (jf + 1) / jf**2

        res = sum_series(term, SeriesControl(tol=1e-14, max_terms=2_000_000))
        assert res.value == pytest.approx(0.5433832387483943, abs=1e-8)

    def test_tol_insensitivity(self):
        # holds for geometric-type decay, where the truncated tail is O(tol);
        # power-law tails leave O(tol * J) behind by nature
        def term(j):
            return 0.6 ** np.asarray(j, dtype=float)

        v1 = sum_series(term, SeriesControl(tol=1e-10)).value
        v2 = sum_series(term, SeriesControl(tol=1e-12)).value
        assert abs(v1 - v2) <= 10 * 1e-10

    def test_non_convergence_signals(self):
        with pytest.raises(SeriesNonConvergence):
            sum_series(lambda j: 1.0 / np.asarray(j, dtype=float), SeriesControl(tol=1e-12, max_terms=5000))

    def test_scalar_term_fn_fallback(self):
        res = sum_series(lambda j: 0.25**j, SeriesControl(tol=1e-12))
        assert res.value == pytest.approx(1.0 / 3.0, abs=1e-11)

    def test_control_validation(self):
        with pytest.raises(ValueError):
            SeriesControl(tol=0.0)
        with pytest.raises(ValueError):
            SeriesControl(max_terms=0)
