"""Log-likelihood, analytic score, maximum-likelihood fitting, information
criteria, likelihood-ratio tests, and one-sample Kolmogorov-Smirnov
goodness of fit for the EW marginals.

Optimization runs in unconstrained coordinates (logs for the positive
parameters, a scaled logit for theta) with multistart Nelder-Mead followed
by a gradient polish, since the likelihood can be multimodal in the shape
parameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special
from scipy.stats import chi2

from .distribution import _log1mexp, marginal_cdf
from .params import BgwParams, BivariateSample, EwParams

__all__ = [
    "FitResult",
    "log_likelihood",
    "score",
    "fit_mle",
    "fit_ew_mle",
    "lr_test",
    "ks_test_ew",
    "standard_errors",
]

_THETA_EPS = 1e-6


@dataclass(frozen=True)
class FitResult:
    """Point estimates plus fit diagnostics.

    ``aic = 2 p - 2 log_lik`` and ``bic = p ln(n) - 2 log_lik`` with ``p``
    the number of free parameters (3 when the shape was held fixed).
    """

    params: BgwParams
    log_lik: float
    aic: float
    bic: float
    n_iter: int
    converged: bool
    gradient_norm: float
    n_obs: int
    n_free: int
    fixed_a: float | None = None
    theta_boundary: bool = False


def _data_arrays(data: BivariateSample):
    return data.x, data.y


def log_likelihood(p: BgwParams, data: BivariateSample) -> float:
    """Log-likelihood of the sample; -inf when the density underflows."""
    x, y = _data_arrays(data)
    n = x.size
    z = p.z(x, y)
    with np.errstate(divide="ignore", invalid="ignore"):
        ll = (
            n * (math.log(p.theta) + 2.0 * math.log(p.a) + math.log(p.b1) + math.log(p.b2))
            + (p.a - 1.0) * float(np.sum(np.log(x) + np.log(y)))
            - float(np.sum(z))
            + (p.theta - 2.0) * float(np.sum(_log1mexp(z)))
            + float(np.sum(np.log1p(-p.theta * np.exp(-z))))
        )
    return ll if math.isfinite(ll) else -math.inf


def score(p: BgwParams, data: BivariateSample) -> np.ndarray:
    """Gradient of the log-likelihood in (a, b1, b2, theta).

    Obtained by differentiating the five-term log-likelihood directly; the
    theta component is n/theta + sum ln(1 - w) - sum w / (1 - theta w) with
    w = e^(-Z).  (Standard write-ups drop the minus sign on the last term;
    the finite-difference checks in the test suite arbitrate.)
    """
    x, y = _data_arrays(data)
    n = x.size
    z = p.z(x, y)
    w = np.exp(-z)
    one_m_w = -np.expm1(-z)
    denom2 = 1.0 - p.theta * w
    lx, ly = np.log(x), np.log(y)
    za = p.b1 * x**p.a * lx + p.b2 * y**p.a * ly  # dZ/da

    ratio1 = w / one_m_w
    ratio2 = w / denom2
    d_a = (
        2.0 * n / p.a
        + float(np.sum(lx + ly))
        - float(np.sum(za))
        + (p.theta - 2.0) * float(np.sum(ratio1 * za))
        + p.theta * float(np.sum(ratio2 * za))
    )
    d_b1 = (
        n / p.b1
        - float(np.sum(x**p.a))
        + (p.theta - 2.0) * float(np.sum(x**p.a * ratio1))
        + p.theta * float(np.sum(x**p.a * ratio2))
    )
    d_b2 = (
        n / p.b2
        - float(np.sum(y**p.a))
        + (p.theta - 2.0) * float(np.sum(y**p.a * ratio1))
        + p.theta * float(np.sum(y**p.a * ratio2))
    )
    d_theta = (
        n / p.theta
        + float(np.sum(np.log(one_m_w)))
        - float(np.sum(ratio2))
    )
    return np.array([d_a, d_b1, d_b2, d_theta])


# ---------------------------------------------------------------------------
# reparameterization
# ---------------------------------------------------------------------------

def _theta_to_u(theta):
    frac = (theta - _THETA_EPS) / (1.0 - _THETA_EPS)
    frac = min(max(frac, 1e-12), 1.0 - 1e-16)
    return math.log(frac / (1.0 - frac))


def _u_to_theta(u):
    sig = 1.0 / (1.0 + math.exp(-u)) if u < 36 else 1.0 - math.exp(-u)
    return _THETA_EPS + (1.0 - _THETA_EPS) * sig


def _pack(a, b1, b2, theta):
    return np.array([math.log(a), math.log(b1), math.log(b2), _theta_to_u(theta)])


def _unpack(u, fixed_a=None):
    a = fixed_a if fixed_a is not None else math.exp(u[0])
    return a, math.exp(u[1]), math.exp(u[2]), _u_to_theta(u[3])


def _free_mask(fixed_a):
    return np.array([fixed_a is None, True, True, True])


def _reparam_gradient(p: BgwParams, data, fixed_a=None) -> np.ndarray:
    """Score chain-ruled into the unconstrained coordinates."""
    g = score(p, data)
    sig = (p.theta - _THETA_EPS) / (1.0 - _THETA_EPS)
    dtheta_du = (1.0 - _THETA_EPS) * sig * (1.0 - sig)
    full = np.array([g[0] * p.a, g[1] * p.b1, g[2] * p.b2, g[3] * dtheta_du])
    return full[_free_mask(fixed_a)]


def _heuristic_starts(data: BivariateSample, fixed_a, n_starts, rng):
    """Median-matched EW initializers over a small grid with jitter."""
    med_x = float(np.median(data.x))
    med_y = float(np.median(data.y))
    a_grid = [fixed_a] if fixed_a is not None else [0.8, 1.0, 2.0, 4.0]
    theta_grid = [0.3, 0.7, 1.0 - 1e-3]
    starts = []
    for a0 in a_grid:
        for th0 in theta_grid:
            # EW median m satisfies (1 - e^(-b m^a))^theta = 1/2
            c = -math.log(1.0 - 0.5 ** (1.0 / th0))
            starts.append((a0, c / med_x**a0, c / med_y**a0, th0))
    while len(starts) < n_starts * 4:
        base = starts[rng.integers(0, len(starts))]
        jit = np.exp(rng.normal(0.0, 0.4, size=3))
        th = min(1.0 - 1e-4, max(0.05, base[3] * math.exp(rng.normal(0.0, 0.3))))
        starts.append((base[0] if fixed_a is not None else base[0] * jit[0],
                       base[1] * jit[1], base[2] * jit[2], th))
    return starts


def fit_mle(
    data: BivariateSample,
    init: BgwParams | None = None,
    fixed_a: float | None = None,
    n_starts: int = 5,
    seed: int = 0,
    xtol: float = 1e-10,
    max_iter: int = 4000,
) -> FitResult:
    """Maximum-likelihood fit of (a, b1, b2, theta).

    ``fixed_a`` restricts the shape (1 and 2 give the generalized-exponential
    and generalized-Rayleigh sub-models).  The best of ``n_starts`` local
    searches is polished with L-BFGS-B on the analytic gradient; a fit whose
    theta lands at the upper boundary is reported with ``theta_boundary``
    (independence) and still counts as converged.
    """
    if data.n < 5:
        raise ValueError("need at least 5 pairs to fit 4 parameters")
    if np.all(data.x == data.x[0]) or np.all(data.y == data.y[0]):
        raise ValueError("degenerate data: a coordinate is constant")
    if fixed_a is not None and fixed_a <= 0:
        raise ValueError("fixed_a must be positive")

    rng = np.random.default_rng(seed)
    mask = _free_mask(fixed_a)

    def neg_ll_u(ufree):
        u = np.zeros(4)
        u[mask] = ufree
        try:
            p = BgwParams(*_unpack(u, fixed_a))
        except (ValueError, OverflowError):
            return math.inf
        ll = log_likelihood(p, data)
        return -ll if math.isfinite(ll) else math.inf

    def neg_grad_u(ufree):
        u = np.zeros(4)
        u[mask] = ufree
        p = BgwParams(*_unpack(u, fixed_a))
        return -_reparam_gradient(p, data, fixed_a)

    candidates = []
    if init is not None:
        candidates.append(init.as_tuple())
    candidates.extend(_heuristic_starts(data, fixed_a, n_starts, rng))
    # keep the requested number of distinct starts, heuristics first
    candidates = candidates[: max(n_starts, 1) + (0 if init is None else 1) + 11]

    best = None
    total_iter = 0
    for cand in candidates:
        a0, b10, b20, th0 = cand
        u0 = _pack(a0 if fixed_a is None else fixed_a, b10, b20, th0)[mask]
        res = optimize.minimize(
            neg_ll_u,
            u0,
            method="Nelder-Mead",
            options=dict(xatol=xtol, fatol=1e-12, maxiter=max_iter, maxfev=max_iter * 2),
        )
        total_iter += res.nit
        if best is None or res.fun < best.fun:
            best = res

    # gradient polish from the best simplex result
    polish = optimize.minimize(
        neg_ll_u, best.x, jac=neg_grad_u, method="L-BFGS-B",
        options=dict(maxiter=500, ftol=1e-14, gtol=1e-10),
    )
    total_iter += polish.nit
    if polish.fun <= best.fun:
        best_x, best_fun = polish.x, polish.fun
    else:
        best_x, best_fun = best.x, best.fun

    u = np.zeros(4)
    u[mask] = best_x
    p_hat = BgwParams(*_unpack(u, fixed_a))
    grad_norm = float(np.linalg.norm(_reparam_gradient(p_hat, data, fixed_a)))
    n_free = int(mask.sum())
    ll = -best_fun
    aic = 2.0 * n_free - 2.0 * ll
    bic = n_free * math.log(data.n) - 2.0 * ll
    boundary = p_hat.theta > 1.0 - 1e-4
    converged = bool(math.isfinite(ll) and (grad_norm < 1e-3 or boundary))
    return FitResult(
        params=p_hat,
        log_lik=ll,
        aic=aic,
        bic=bic,
        n_iter=int(total_iter),
        converged=converged,
        gradient_norm=grad_norm,
        n_obs=data.n,
        n_free=n_free,
        fixed_a=fixed_a,
        theta_boundary=boundary,
    )


# ---------------------------------------------------------------------------
# EW marginal fitting (used by the real-data pipeline)
# ---------------------------------------------------------------------------

def _ew_log_likelihood(e: EwParams, t: np.ndarray) -> float:
    v = e.b * t**e.a
    with np.errstate(divide="ignore", invalid="ignore"):
        ll = (
            t.size * (math.log(e.theta) + math.log(e.a) + math.log(e.b))
            + (e.a - 1.0) * float(np.sum(np.log(t)))
            - float(np.sum(v))
            + (e.theta - 1.0) * float(np.sum(_log1mexp(v)))
        )
    return ll if math.isfinite(ll) else -math.inf


def fit_ew_mle(data_1d, n_starts: int = 4, seed: int = 0) -> tuple[EwParams, float]:
    """Univariate EW maximum-likelihood fit; returns (params, log_lik)."""
    t = np.asarray(data_1d, dtype=float)
    if t.ndim != 1 or t.size < 3:
        raise ValueError("need a 1-D sample with at least 3 values")
    if np.any(t <= 0):
        raise ValueError("data must be strictly positive")
    rng = np.random.default_rng(seed)
    med = float(np.median(t))

    def neg_ll(u):
        try:
            e = EwParams(math.exp(u[0]), math.exp(u[1]), _u_to_theta(u[2]))
        except (ValueError, OverflowError):
            return math.inf
        ll = _ew_log_likelihood(e, t)
        return -ll if math.isfinite(ll) else math.inf

    best = None
    for a0 in (0.8, 1.0, 2.0, 4.0)[: max(n_starts, 1)]:
        for th0 in (0.5, 1.0 - 1e-3):
            c = -math.log(1.0 - 0.5 ** (1.0 / th0))
            u0 = np.array([math.log(a0), math.log(c / med**a0), _theta_to_u(th0)])
            u0 += rng.normal(0.0, 1e-3, size=3)
            res = optimize.minimize(neg_ll, u0, method="Nelder-Mead",
                                    options=dict(xatol=1e-10, fatol=1e-12, maxiter=3000))
            if best is None or res.fun < best.fun:
                best = res
    e_hat = EwParams(math.exp(best.x[0]), math.exp(best.x[1]), _u_to_theta(best.x[2]))
    return e_hat, -float(best.fun)


# ---------------------------------------------------------------------------
# tests built on fits
# ---------------------------------------------------------------------------

def lr_test(full: FitResult, restricted: FitResult, df: int):
    """Likelihood-ratio statistic -2 (LL_restricted - LL_full) and its
    chi-square p-value.  A negative statistic means the optimizer failed on
    one of the models and is reported as an error, never clamped."""
    if df < 1:
        raise ValueError("df must be >= 1")
    stat = -2.0 * (restricted.log_lik - full.log_lik)
    if stat < 0:
        raise ValueError(
            f"negative LR statistic ({stat:.6g}): restricted fit beat the full fit"
        )
    return stat, float(chi2.sf(stat, df))


def ks_test_ew(data_1d, e: EwParams):
    """One-sample Kolmogorov-Smirnov distance against the EW CDF.

    The p-value uses the asymptotic Kolmogorov series at sqrt(n) * D, which
    is the intended regime for the data sizes here (n > 35).
    """
    t = np.asarray(data_1d, dtype=float)
    if t.ndim != 1 or t.size < 1:
        raise ValueError("need a non-empty 1-D sample")
    if np.any(t <= 0):
        raise ValueError("data must be strictly positive")
    n = t.size
    ts = np.sort(t)
    f = np.asarray(marginal_cdf(e, ts))
    ecdf_hi = np.arange(1, n + 1) / n
    ecdf_lo = np.arange(0, n) / n
    d = float(max(np.max(ecdf_hi - f), np.max(f - ecdf_lo)))
    p_value = float(special.kolmogorov(math.sqrt(n) * d))
    return d, p_value


def standard_errors(p: BgwParams, data: BivariateSample, h: float = 1e-5) -> np.ndarray:
    """Observed-information standard errors by finite differences of the score.

    Offered for orientation only; no reference values exist for them, so they
    are not asserted anywhere.
    """
    x0 = np.array(p.as_tuple())
    hess = np.zeros((4, 4))
    for i in range(4):
        step = h * max(abs(x0[i]), 1e-3)
        lo, hi = x0.copy(), x0.copy()
        lo[i] -= step
        hi[i] += step
        hi[3] = min(hi[3], 1.0)
        g_hi = score(BgwParams(*hi), data)
        g_lo = score(BgwParams(*lo), data)
        hess[i] = (g_hi - g_lo) / (hi[i] - lo[i])
    hess = 0.5 * (hess + hess.T)
    cov = np.linalg.inv(-hess)
    return np.sqrt(np.clip(np.diag(cov), 0.0, None))
