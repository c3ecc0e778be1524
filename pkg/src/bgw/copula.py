"""The copula of the BGW family and its dependence measures.

The copula is

    C(s, t) = s + t - (1 - (1 - s^(1/theta)) (1 - t^(1/theta)))^theta

for theta in (0, 1] (independence copula at theta = 1).  Spearman's rho,
Spearman's footrule, Blest's measure, and the regression-dependence index r
have binomial-series closed forms; each also reduces exactly to a 3F2
hypergeometric value at unit argument, which is what the ``exact`` method
evaluates.  The series converge like j^(-(1 + c*theta)), painfully slowly
for small theta, hence the two methods.

Kendall's tau is special: the closed form circulating for this family,

    tau = 1 + 4 theta B(2, 2 theta + 1) (psi(2) - psi(2 theta + 1)),

does not vanish at theta = 1 (it gives 5/6 where independence forces 0) and
disagrees with simulation everywhere in (0, 1).  It is kept verbatim as
:func:`kendall_tau` for reference, flagged in its docstring, and paired with
:func:`kendall_tau_numeric`, a quadrature of the defining integral that does
agree with simulation.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

import mpmath as mp
import numpy as np

from .series import SeriesControl, beta, digamma, gen_binom, sum_series

__all__ = [
    "COPULA_SERIES_CONTROL",
    "copula_cdf",
    "spearman_rho",
    "footrule_phi",
    "blest_measure",
    "kendall_tau",
    "kendall_tau_numeric",
    "tail_dependence",
    "regression_dependence_r",
    "dependence_sweep",
    "write_dependence_csv",
]


# The measure series decay like j^(-(1 + c*theta)) with c in {2, 3}; around
# theta = 0.5 that is j^(-2), so a 1e-12 cutoff is unreachable in any sane
# term count while 1e-10 stops near 1e5 terms with ~1e-5 summed tail.
COPULA_SERIES_CONTROL = SeriesControl(tol=1e-10, max_terms=2_000_000)


def _check_theta(theta):
    theta = float(theta)
    if not (0.0 < theta <= 1.0):
        raise ValueError(f"theta must lie in (0, 1], got {theta!r}")
    return theta


def _unit_interval(v, name):
    arr = np.asarray(v, dtype=float)
    if np.any(arr < 0) or np.any(arr > 1) or np.any(np.isnan(arr)):
        raise ValueError(f"{name} must lie in [0, 1]")
    return arr


def copula_cdf(theta, s, t):
    """C(s, t) on the closed unit square.

    The inner bracket is computed as u + v - u*v with u = s^(1/theta),
    v = t^(1/theta); the algebraically equal form 1 - (1-u)(1-v) cancels
    catastrophically for small u, v, which is exactly the lower-tail region
    the tail-dependence checks probe.
    """
    theta = _check_theta(theta)
    s = _unit_interval(s, "s")
    t = _unit_interval(t, "t")
    with np.errstate(divide="ignore"):
        u = np.where(s > 0, np.exp(np.log(np.where(s > 0, s, 1.0)) / theta), 0.0)
        v = np.where(t > 0, np.exp(np.log(np.where(t > 0, t, 1.0)) / theta), 0.0)
    g = u + v - u * v
    out = s + t - g**theta
    # boundaries made bit-exact rather than trusting the s**(1/theta) roundtrip
    out = np.where((s == 0) | (t == 0), 0.0, out)
    out = np.where(s == 1, t, out)
    out = np.where(t == 1, np.where(s == 1, 1.0, s), out)
    return float(out) if out.ndim == 0 else out


def _partial_s(theta, s, t):
    """dC/ds, used by the numerical tau and available to oracles."""
    u = s ** (1.0 / theta)
    v = t ** (1.0 / theta)
    g = u + v - u * v
    return 1.0 - s ** (1.0 / theta - 1.0) * (1.0 - v) * g ** (theta - 1.0)


# ---------------------------------------------------------------------------
# series forms and their hypergeometric accelerations
# ---------------------------------------------------------------------------

def _measure(theta, series_fn, hyp_fn, ctrl, method):
    theta = _check_theta(theta)
    if method == "series":
        return series_fn(theta, ctrl if ctrl is not None else COPULA_SERIES_CONTROL)
    if method == "exact":
        return hyp_fn(theta)
    raise ValueError("method must be 'series' or 'exact'")


def _rho_series(theta, ctrl):
    def term(j):
        # shifted to start at j = 0
        j0 = np.asarray(j) - 1
        jf = j0.astype(float)
        return -12.0 * theta**2 * (-1.0) ** jf * gen_binom(theta, j0) * beta(theta, jf + 1.0) ** 2

    return 9.0 + sum_series(term, ctrl).value


def _rho_hyp(theta):
    return float(9 - 12 * mp.hyp3f2(-theta, 1, 1, 1 + theta, 1 + theta, 1))


def spearman_rho(theta, ctrl: SeriesControl | None = None, method: str = "series") -> float:
    """Spearman's rho: 9 - 12 theta^2 sum_j (-1)^j C(theta, j) B(theta, j+1)^2."""
    return _measure(theta, _rho_series, _rho_hyp, ctrl, method)


def _phi_series(theta, ctrl):
    def term(j):
        j0 = np.asarray(j) - 1
        jf = j0.astype(float)
        return -6.0 * theta * (-1.0) ** jf * gen_binom(theta, j0) * beta(theta, 2.0 * jf + 1.0)

    return 4.0 + sum_series(term, ctrl).value


def _phi_hyp(theta):
    return float(4 - 6 * mp.hyp3f2(-theta, mp.mpf(1) / 2, 1, (1 + theta) / 2, (2 + theta) / 2, 1))


def footrule_phi(theta, ctrl: SeriesControl | None = None, method: str = "series") -> float:
    """Spearman's footrule: 4 - 6 theta sum_j (-1)^j C(theta, j) B(theta, 2j+1)."""
    return _measure(theta, _phi_series, _phi_hyp, ctrl, method)


def _blest_series(theta, ctrl):
    def term(j):
        j0 = np.asarray(j) - 1
        jf = j0.astype(float)
        bj = beta(theta, jf + 1.0)
        return -24.0 * theta**2 * (-1.0) ** jf * gen_binom(theta, j0) * bj * (bj - beta(2.0 * theta, jf + 1.0))

    return 8.0 + sum_series(term, ctrl).value


def _blest_hyp(theta):
    return float(
        8
        - 24 * mp.hyp3f2(-theta, 1, 1, 1 + theta, 1 + theta, 1)
        + 12 * mp.hyp3f2(-theta, 1, 1, 1 + theta, 1 + 2 * theta, 1)
    )


def blest_measure(theta, ctrl: SeriesControl | None = None, method: str = "series") -> float:
    """Blest's measure: 8 - 24 theta^2 sum_j (-1)^j C(theta,j) B(theta,j+1) [B(theta,j+1) - B(2 theta,j+1)]."""
    return _measure(theta, _blest_series, _blest_hyp, ctrl, method)


def _r_series(theta, ctrl):
    # 6 * iint (dC/ds)^2 - 2 expands into two binomial series.  The cross
    # term integrates in closed form to exactly -1 for every theta; the
    # squared bracket carries exponent 2(theta - 1), so its expansion uses
    # C(2 theta - 2, j) -- not C(theta - 1, j), which is sometimes quoted and
    # fails the defining integral (e.g. -0.562 instead of 0.192 at theta 0.5).
    def term(j):
        j0 = np.asarray(j) - 1
        jf = j0.astype(float)
        return (
            6.0
            * theta**2
            * (-1.0) ** jf
            * gen_binom(2.0 * theta - 2.0, j0)
            * beta(2.0 - theta, jf + 1.0)
            * beta(theta, jf + 3.0)
        )

    return -2.0 + sum_series(term, ctrl).value


def _r_hyp(theta):
    ic = (
        theta**2
        * (2 * mp.gamma(theta) / ((2 - theta) * mp.gamma(3 + theta)))
        * mp.hyp3f2(2 - 2 * theta, 1, 3, 3 - theta, 3 + theta, 1)
    )
    return float(-2 + 6 * ic)


def regression_dependence_r(theta, ctrl: SeriesControl | None = None, method: str = "series") -> float:
    """Regression-dependence index r = 6 iint (dC/ds)^2 ds dt - 2, in [0, 1]."""
    return _measure(theta, _r_series, _r_hyp, ctrl, method)


# ---------------------------------------------------------------------------
# Kendall's tau
# ---------------------------------------------------------------------------

def kendall_tau(theta) -> float:
    """Closed-form tau as usually quoted for this copula.  Known to be wrong.

    Evaluates to 5/6 at theta = 1 (independence requires 0) and to 1 at
    theta = 1/2; kept only so the discrepancy is visible and testable.  Use
    :func:`kendall_tau_numeric` for a value that matches simulation.
    """
    theta = _check_theta(theta)
    return 1.0 + 4.0 * theta * beta(2.0, 2.0 * theta + 1.0) * (digamma(2.0) - digamma(2.0 * theta + 1.0))


def kendall_tau_numeric(theta, n_nodes: int = 256) -> float:
    """tau = 1 - 4 iint dC/ds * dC/dt ds dt by tensor Gauss-Legendre."""
    theta = _check_theta(theta)
    if theta == 1.0:
        return 0.0
    x, w = np.polynomial.legendre.leggauss(n_nodes)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    s, t = np.meshgrid(x, x, indexing="ij")
    ww = np.outer(w, w)
    integral = float(np.sum(ww * _partial_s(theta, s, t) * _partial_s(theta, t, s)))
    return 1.0 - 4.0 * integral


def tail_dependence(theta):
    """(lower, upper) tail-dependence coefficients: (2 - 2^theta, 0)."""
    theta = _check_theta(theta)
    return 2.0 - 2.0**theta, 0.0


# ---------------------------------------------------------------------------
# dependence sweep (the measures as functions of theta, CSV-ready)
# ---------------------------------------------------------------------------

def dependence_sweep(thetas=None, tau_nodes: int = 128):
    """Rows (theta, rho, tau_formula, tau_numeric, phi, blest, r).

    Uses the exact hypergeometric evaluators so the sweep stays accurate down
    to theta = 0.01, where the raw series are far from converged.
    """
    if thetas is None:
        thetas = np.arange(1, 101) / 100.0
    rows = []
    for th in np.asarray(thetas, dtype=float):
        rows.append(
            (
                th,
                spearman_rho(th, method="exact"),
                kendall_tau(th),
                kendall_tau_numeric(th, n_nodes=tau_nodes),
                footrule_phi(th, method="exact"),
                blest_measure(th, method="exact"),
                regression_dependence_r(th, method="exact"),
            )
        )
    return rows


def write_dependence_csv(path_or_file, thetas=None, tau_nodes: int = 128) -> None:
    rows = dependence_sweep(thetas, tau_nodes=tau_nodes)
    own = isinstance(path_or_file, (str, Path))
    fh = open(path_or_file, "w", newline="", encoding="utf-8") if own else path_or_file
    try:
        writer = csv.writer(fh)
        writer.writerow(["theta", "rho", "tau_formula", "tau_numeric", "phi", "blest", "r"])
        for row in rows:
            writer.writerow([f"{v:.10g}" for v in row])
    finally:
        if own:
            fh.close()
