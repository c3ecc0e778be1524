"""Bivariate generalized Weibull (BGW) distribution toolkit.

Evaluation of the joint law and its exponentiated-Weibull marginals,
copula-based dependence measures, exact simulation, maximum-likelihood and
MCMC Bayesian estimation, and a Monte Carlo study harness.
"""

from .bayes import Chain, PriorConfig, ge_estimate, log_full_conditional, log_posterior_kernel, run_mcmc
from .copula import (
    blest_measure,
    copula_cdf,
    dependence_sweep,
    footrule_phi,
    kendall_tau,
    kendall_tau_numeric,
    regression_dependence_r,
    spearman_rho,
    tail_dependence,
)
from .distribution import (
    cdf,
    cond_cdf,
    cond_pdf,
    cond_survival,
    density_grid,
    hazard,
    hazard_gradient,
    local_dependence,
    log_pdf,
    marginal,
    marginal_cdf,
    marginal_pdf,
    marginal_survival,
    pdf,
    regression,
    survival,
)
from .harness import (
    BiasMseRow,
    ExperimentConfig,
    real_data_pipeline,
    run_experiment,
    sample_blest,
    sample_footrule,
)
from .mle import FitResult, fit_ew_mle, fit_mle, ks_test_ew, log_likelihood, lr_test, score
from .moments import correlation, ew_moment, min_law, prob_x_less_y, product_moment
from .params import BgwParams, BivariateSample, EwParams
from .sampling import K_CAP, RngHandle, sample_k, sample_n, sample_pair
from .series import SeriesControl, SeriesNonConvergence, SeriesSum, gen_binom, sum_series

__version__ = "0.1.0"
