import math

import numpy as np
import pytest
from scipy.stats import kendalltau

import bgw
from bgw import BgwParams
from bgw.copula import _partial_s
from bgw.series import SeriesControl, SeriesNonConvergence


def gauss01(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1), 0.5 * w


def copula_oracle(theta, s, t):
    """Independent re-implementation used as the quadrature oracle."""
    u = s ** (1.0 / theta)
    v = t ** (1.0 / theta)
    return s + t - (u + v - u * v) ** theta


class TestCopulaCdf:
    def test_independence(self):
        ss = np.linspace(0, 1, 11)
        for t in (0.0, 0.3, 1.0):
            np.testing.assert_allclose(bgw.copula_cdf(1.0, ss, t), ss * t, atol=1e-14)

    def test_uniform_margin(self):
        assert bgw.copula_cdf(0.5, 0.3, 1.0) == 0.3

    def test_boundaries_exact(self):
        for th in (0.2, 0.7, 1.0):
            assert bgw.copula_cdf(th, 0.4, 0.0) == 0.0
            assert bgw.copula_cdf(th, 0.0, 0.9) == 0.0
            assert bgw.copula_cdf(th, 0.4, 1.0) == 0.4
            assert bgw.copula_cdf(th, 1.0, 0.9) == 0.9
            assert bgw.copula_cdf(th, 1.0, 1.0) == 1.0

    def test_empirical_copula_oracle(self, big_sample_half):
        from bgw import EwParams, marginal_cdf

        s_emp = np.asarray(marginal_cdf(EwParams(1, 1, 0.5), big_sample_half.x))
        t_emp = np.asarray(marginal_cdf(EwParams(1, 1, 0.5), big_sample_half.y))
        emp = float(np.mean((s_emp <= 0.4) & (t_emp <= 0.7)))
        assert bgw.copula_cdf(0.5, 0.4, 0.7) == pytest.approx(emp, abs=0.003)

    def test_two_increasing_on_grid(self):
        grid = np.linspace(0.0, 1.0, 31)
        for th in (0.15, 0.5, 0.9):
            c = np.asarray(bgw.copula_cdf(th, *np.meshgrid(grid, grid, indexing="ij")))
            rect = c[1:, 1:] - c[1:, :-1] - c[:-1, 1:] + c[:-1, :-1]
            assert np.min(rect) >= -1e-12

    def test_frechet_bounds(self):
        grid = np.linspace(0.0, 1.0, 41)
        gs, gt = np.meshgrid(grid, grid, indexing="ij")
        for th in (0.1, 0.6, 1.0):
            c = np.asarray(bgw.copula_cdf(th, gs, gt))
            assert np.all(c <= np.minimum(gs, gt) + 1e-12)
            assert np.all(c >= np.maximum(gs + gt - 1, 0.0) - 1e-12)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            bgw.copula_cdf(0.5, -0.1, 0.5)
        with pytest.raises(ValueError):
            bgw.copula_cdf(0.5, 0.2, 1.2)
        with pytest.raises(ValueError):
            bgw.copula_cdf(1.5, 0.2, 0.2)


class TestClosedFormMeasures:
    def test_vanish_at_independence(self):
        assert abs(bgw.spearman_rho(1.0)) < 1e-10
        assert abs(bgw.footrule_phi(1.0)) < 1e-10
        assert abs(bgw.blest_measure(1.0)) < 1e-10
        assert abs(bgw.regression_dependence_r(1.0)) < 1e-10

    def test_rho_against_quadrature(self):
        s, w = gauss01(400)
        gs, gt = np.meshgrid(s, s, indexing="ij")
        ww = np.outer(w, w)
        oracle = 12 * float(np.sum(ww * copula_oracle(0.5, gs, gt))) - 3
        assert bgw.spearman_rho(0.5) == pytest.approx(oracle, abs=1e-4)

    def test_phi_against_diagonal_quadrature(self):
        s, w = gauss01(2000)
        oracle = 6 * float(np.sum(w * copula_oracle(0.5, s, s))) - 2
        assert bgw.footrule_phi(0.5) == pytest.approx(oracle, abs=1e-4)

    def test_blest_against_quadrature(self):
        s, w = gauss01(400)
        gs, gt = np.meshgrid(s, s, indexing="ij")
        ww = np.outer(w, w)
        oracle = 24 * float(np.sum(ww * (1 - gs) * copula_oracle(0.5, gs, gt))) - 2
        assert bgw.blest_measure(0.5) == pytest.approx(oracle, abs=1e-4)

    def test_r_against_quadrature(self):
        # oracle: 6 iint (dC/ds)^2 - 2 with the derivative written out directly
        s, w = gauss01(1200)
        gs, gt = np.meshgrid(s, s, indexing="ij")
        ww = np.outer(w, w)
        u = gs ** (1 / 0.5)
        v = gt ** (1 / 0.5)
        g = u + v - u * v
        dcds = 1.0 - gs ** (1 / 0.5 - 1) * (1 - v) * g ** (0.5 - 1)
        oracle = 6 * float(np.sum(ww * dcds**2)) - 2
        assert bgw.regression_dependence_r(0.5) == pytest.approx(oracle, abs=1e-4)

    def test_series_and_exact_methods_agree(self):
        # the truncated series leave ~tol * J of summed tail behind, so the
        # agreement scale here is 1e-5, well inside the 1e-4 oracle gates
        for th in (0.45, 0.7, 0.95):
            assert bgw.spearman_rho(th) == pytest.approx(bgw.spearman_rho(th, method="exact"), abs=1e-5)
            assert bgw.footrule_phi(th) == pytest.approx(bgw.footrule_phi(th, method="exact"), abs=5e-5)
            assert bgw.blest_measure(th) == pytest.approx(bgw.blest_measure(th, method="exact"), abs=5e-5)
            assert bgw.regression_dependence_r(th) == pytest.approx(
                bgw.regression_dependence_r(th, method="exact"), abs=5e-5
            )

    def test_r_range_over_theta_grid(self):
        thetas = np.arange(0.05, 1.0001, 0.05)
        vals = [bgw.regression_dependence_r(th, method="exact") for th in thetas]
        assert all(0.0 <= v <= 1.0 for v in vals)
        # monotone decreasing toward independence
        assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))

    def test_measures_nonnegative_and_vanishing(self):
        thetas = np.arange(0.1, 1.0001, 0.1)
        for fn in (bgw.spearman_rho, bgw.footrule_phi, bgw.blest_measure, bgw.regression_dependence_r):
            vals = [fn(th, method="exact") for th in thetas]
            assert all(v >= -1e-12 for v in vals)
            assert vals[-1] == pytest.approx(0.0, abs=1e-10)

    def test_series_non_convergence_propagates(self):
        with pytest.raises(SeriesNonConvergence):
            bgw.spearman_rho(0.05, SeriesControl(tol=1e-12, max_terms=10_000))


class TestKendallTau:
    def test_formula_known_issue_at_independence(self):
        # the quoted closed form gives 5/6 at theta = 1 where tau must be 0;
        # kept verbatim and documented, with the numeric version correct
        assert bgw.kendall_tau(1.0) == pytest.approx(5.0 / 6.0, abs=1e-12)
        assert bgw.kendall_tau_numeric(1.0) == 0.0

    def test_formula_disagrees_with_simulation(self, big_sample_half):
        tau_emp = float(kendalltau(big_sample_half.x, big_sample_half.y).statistic)
        assert abs(bgw.kendall_tau(0.5) - tau_emp) > 0.5

    def test_numeric_matches_simulation(self, big_sample_half):
        tau_emp = float(kendalltau(big_sample_half.x, big_sample_half.y).statistic)
        assert bgw.kendall_tau_numeric(0.5) == pytest.approx(tau_emp, abs=0.005)

    def test_rho_exceeds_tau(self, big_sample_half):
        tau_emp = float(kendalltau(big_sample_half.x, big_sample_half.y).statistic)
        assert bgw.spearman_rho(0.5) > tau_emp


class TestTailDependence:
    def test_independence(self):
        assert bgw.tail_dependence(1.0) == (0.0, 0.0)

    def test_half(self):
        lower, upper = bgw.tail_dependence(0.5)
        assert lower == pytest.approx(2 - math.sqrt(2), rel=1e-15)
        assert upper == 0.0

    def test_limit_approximation_oracle(self):
        # diagonal ratio of the analytic copula at t = 1e-3
        t = 1e-3
        ratio = bgw.copula_cdf(0.3, t, t) / t
        lower, _ = bgw.tail_dependence(0.3)
        assert ratio == pytest.approx(lower, abs=0.01)

    def test_upper_tail_limit_vanishes(self):
        t = 1.0 - 1e-6
        val = (1 - 2 * t + bgw.copula_cdf(0.4, t, t)) / (1 - t)
        assert val == pytest.approx(0.0, abs=1e-3)


class TestDependenceSweep:
    def test_rows_and_csv(self, tmp_path):
        rows = bgw.dependence_sweep(thetas=[0.2, 0.6, 1.0], tau_nodes=64)
        assert len(rows) == 3
        th, rho, tauf, taun, phi, blest, r = rows[-1]
        assert th == 1.0
        assert abs(rho) < 1e-10 and abs(taun) < 1e-10
        out = tmp_path / "sweep.csv"
        from bgw.copula import write_dependence_csv

        write_dependence_csv(out, thetas=[0.2, 0.6])
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "theta,rho,tau_formula,tau_numeric,phi,blest,r"
        assert len(lines) == 3
