"""Generalized binomial coefficients, special functions, and adaptive series summation.

Everything in this module is a pure function; all of it is safe to call
concurrently.  The infinite sums that appear throughout the package are
alternating binomial expansions whose terms decay like a slow power of the
index, so truncation is controlled explicitly through :class:`SeriesControl`
and a non-convergence signal instead of a silent cutoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special as _sp

__all__ = [
    "SeriesControl",
    "SeriesSum",
    "SeriesNonConvergence",
    "gen_binom",
    "log_gamma",
    "digamma",
    "beta",
    "sum_series",
]


class SeriesNonConvergence(RuntimeError):
    """Raised when a series hits its term cap before meeting the tolerance."""


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy for the package's infinite series.

    Parameters
    ----------
    tol : float
        Absolute tail tolerance.  Summation stops once two consecutive terms
        fall below this value.
    max_terms : int
        Hard cap on the number of terms.  Reaching it with the last term
        still at or above ``tol`` raises :class:`SeriesNonConvergence`.
    """

    tol: float = 1e-12
    max_terms: int = 100_000

    def __post_init__(self):
        if not (self.tol > 0):
            raise ValueError("tol must be > 0")
        if self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")


@dataclass(frozen=True)
class SeriesSum:
    """Partial sum plus a record of which stopping rule fired."""

    value: float
    n_terms: int
    stopped_by: str  # "tol" or "max_terms"
    last_term: float


def gen_binom(alpha, j):
    """Generalized binomial coefficient ``C(alpha, j)`` for real ``alpha``.

    Computed as the exponential of log-gamma differences with explicit sign
    tracking, which stays stable out to very large ``j`` where the direct
    product ``alpha (alpha-1) ... (alpha-j+1) / j!`` would under/overflow.

    ``j`` may be a nonnegative integer or an integer array.
    """
    j_arr = np.asarray(j)
    if np.any(j_arr < 0):
        raise ValueError("j must be >= 0")
    alpha = float(alpha)

    if float(alpha).is_integer() and alpha >= 0:
        n = int(alpha)
        if j_arr.ndim == 0:
            jj = int(j_arr)
            return float(math.comb(n, jj)) if jj <= n else 0.0
        out = np.zeros(j_arr.shape)
        small = j_arr <= n
        out[small] = [math.comb(n, int(k)) for k in j_arr[small]]
        return out

    # Non-integer (or negative integer) alpha: factors alpha - i, i = 0..j-1.
    # The first max(floor(alpha)+1, 0) of them are positive, the rest negative;
    # neither group contains a zero, so magnitudes split into two gamma ratios.
    jf = j_arr.astype(float)
    pos = np.clip(math.floor(alpha) + 1, 0, jf)
    neg = jf - pos
    ln = -_sp.gammaln(jf + 1)
    ln = ln + np.where(pos > 0, _sp.gammaln(alpha + 1) - _sp.gammaln(alpha + 1 - pos), 0.0)
    ln = ln + np.where(neg > 0, _sp.gammaln(jf - alpha) - _sp.gammaln(pos - alpha), 0.0)
    res = np.where(jf == 0, 1.0, (-1.0) ** neg * np.exp(ln))
    return float(res) if j_arr.ndim == 0 else res


def log_gamma(u):
    """Natural log of the gamma function for strictly positive arguments."""
    u = np.asarray(u, dtype=float)
    if np.any(u <= 0):
        raise ValueError("log_gamma requires u > 0")
    out = _sp.gammaln(u)
    return float(out) if out.ndim == 0 else out


def digamma(u):
    """Logarithmic derivative of the gamma function, u > 0."""
    u = np.asarray(u, dtype=float)
    if np.any(u <= 0):
        raise ValueError("digamma requires u > 0")
    out = _sp.psi(u)
    return float(out) if out.ndim == 0 else out


def beta(a, b):
    """Beta function B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b), a, b > 0."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(a <= 0) or np.any(b <= 0):
        raise ValueError("beta requires strictly positive arguments")
    out = np.exp(_sp.gammaln(a) + _sp.gammaln(b) - _sp.gammaln(a + b))
    return float(out) if out.ndim == 0 else out


_BLOCK = 4096


def sum_series(term_fn, ctrl: SeriesControl | None = None) -> SeriesSum:
    """Sum ``term_fn(j)`` over j = 1, 2, ... under a truncation policy.

    Stops when two consecutive terms are below ``ctrl.tol`` in absolute value,
    or when ``ctrl.max_terms`` is reached.  In the latter case, if the final
    term is still at or above the tolerance, :class:`SeriesNonConvergence`
    is raised.

    ``term_fn`` is evaluated on numpy integer blocks when it supports array
    input, falling back to per-index scalar calls otherwise.
    """
    if ctrl is None:
        ctrl = SeriesControl()

    total = 0.0
    below = 0  # consecutive sub-tolerance terms
    n_done = 0
    last = math.inf
    while n_done < ctrl.max_terms:
        hi = min(n_done + _BLOCK, ctrl.max_terms)
        idx = np.arange(n_done + 1, hi + 1)
        try:
            terms = np.asarray(term_fn(idx), dtype=float)
            if terms.shape != idx.shape:
                raise TypeError
        except (TypeError, ValueError):
            terms = np.array([float(term_fn(int(k))) for k in idx])
        small = np.abs(terms) < ctrl.tol
        stop_at = None
        if below >= 1 and small.size and small[0]:
            stop_at = 0
        else:
            hits = np.nonzero(small[:-1] & small[1:])[0]
            if hits.size:
                stop_at = int(hits[0]) + 1
        if stop_at is not None:
            total += float(np.sum(terms[: stop_at + 1]))
            n_done += stop_at + 1
            last = float(terms[stop_at])
            return SeriesSum(total, n_done, "tol", last)
        total += float(np.sum(terms))
        n_done = hi
        last = float(terms[-1])
        below = 1 if small[-1] else 0

    if abs(last) >= ctrl.tol:
        raise SeriesNonConvergence(
            f"series did not meet tol={ctrl.tol:g} within {ctrl.max_terms} terms "
            f"(last term {last:g})"
        )
    return SeriesSum(total, n_done, "max_terms", last)
