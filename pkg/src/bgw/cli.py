"""Command-line interface.

Subcommands: sample, fit, bayes, dependence, simulate, analyze, gof,
density-grid.  Exit codes: 0 success, 1 usage error, 2 data error,
3 numerical failure.  CSV is comma-separated UTF-8 with a header row and
'.' decimals; JSON field names are stable for downstream scripts.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import bayes, copula, distribution, harness, mle, sampling
from .params import BgwParams, BivariateSample
from .series import SeriesNonConvergence

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _parse_params(text) -> BgwParams:
    parts = text.split(",")
    if len(parts) != 4:
        raise _UsageError("--params expects a,b1,b2,theta")
    try:
        return BgwParams(*(float(v) for v in parts))
    except ValueError as exc:
        raise _UsageError(str(exc)) from None


def _emit_json(obj, out):
    json.dump(obj, out, indent=2)
    out.write("\n")


def _open_out(path):
    return open(path, "w", newline="", encoding="utf-8") if path else None


# ---------------------------------------------------------------------------
# subcommand implementations
# ---------------------------------------------------------------------------

def _cmd_sample(args, out):
    p = _parse_params(args.params)
    rng = sampling.RngHandle(args.seed)
    data = sampling.sample_n(p, args.n, rng)
    data.to_csv(out)
    return EXIT_OK


def _cmd_fit(args, out):
    data = BivariateSample.from_csv(args.data)
    if args.scale != 1.0:
        data = data.scaled(args.scale)
    fit = mle.fit_mle(data, fixed_a=args.fix_a, n_starts=args.starts, seed=args.seed)
    _emit_json(
        dict(
            a=fit.params.a,
            b1=fit.params.b1,
            b2=fit.params.b2,
            theta=fit.params.theta,
            loglik=fit.log_lik,
            aic=fit.aic,
            bic=fit.bic,
            converged=fit.converged,
            n_iter=fit.n_iter,
        ),
        out,
    )
    if not fit.converged:
        return EXIT_NUMERIC
    return EXIT_OK


def _cmd_bayes(args, out):
    data = BivariateSample.from_csv(args.data)
    if args.scale != 1.0:
        data = data.scaled(args.scale)
    vals = [float(v) for v in args.prior.split(",")]
    if len(vals) == 2:
        prior = bayes.PriorConfig.flat(vals[0], vals[1])
    elif len(vals) == 8:
        prior = bayes.PriorConfig(tuple(vals[0::2]), tuple(vals[1::2]))
    else:
        raise _UsageError("--prior expects d,z or d1,z1,d2,z2,d3,z3,d4,z4")
    chain = bayes.run_mcmc(
        data, prior, n_iter=args.iters, burn_in=args.burnin, seed=args.seed
    )
    est = bayes.ge_estimate(chain, args.c)
    trace_path = args.trace
    if trace_path:
        chain.to_csv(trace_path)
    _emit_json(
        dict(
            a=est.a,
            b1=est.b1,
            b2=est.b2,
            theta=est.theta,
            c=args.c,
            iters=args.iters,
            burnin=args.burnin,
            acceptance_rates=dict(
                zip(("a", "b1", "b2", "theta"), (float(v) for v in chain.acceptance_rates))
            ),
            warnings=chain.warnings,
            trace_csv=trace_path,
        ),
        out,
    )
    return EXIT_OK


def _cmd_dependence(args, out):
    th = args.theta
    rng = sampling.RngHandle(args.seed)
    sample = sampling.sample_n(BgwParams(1.0, 1.0, 1.0, th), args.mc_n, rng) if th < 1 else None
    if sample is None:
        tau_mc = 0.0
    else:
        from scipy.stats import kendalltau

        tau_mc = float(kendalltau(sample.x, sample.y).statistic)
    lower, upper = copula.tail_dependence(th)
    _emit_json(
        dict(
            theta=th,
            rho=copula.spearman_rho(th, method="exact"),
            tau_formula=copula.kendall_tau(th),
            tau_monte_carlo=tau_mc,
            tau_numeric=copula.kendall_tau_numeric(th),
            phi=copula.footrule_phi(th, method="exact"),
            blest=copula.blest_measure(th, method="exact"),
            r=copula.regression_dependence_r(th, method="exact"),
            tail_lower=lower,
            tail_upper=upper,
        ),
        out,
    )
    return EXIT_OK


def _cmd_simulate(args, out):
    cfg = harness.load_experiment_config(args.config)
    if args.reps is not None:
        cfg = harness.ExperimentConfig(
            true_params=cfg.true_params,
            sample_sizes=cfg.sample_sizes,
            replications=args.reps,
            estimator=cfg.estimator,
            prior=cfg.prior,
            ge_c=cfg.ge_c,
            mcmc_iter=cfg.mcmc_iter,
            mcmc_burn_in=cfg.mcmc_burn_in,
            master_seed=cfg.master_seed,
            n_starts=cfg.n_starts,
        )
    rows = harness.run_experiment(cfg)
    harness.rows_to_csv(rows, out)
    return EXIT_OK


def _cmd_analyze(args, out):
    report = harness.real_data_pipeline(args.data, fit_scale=args.scale, seed=args.seed)
    _emit_json(report, out)
    return EXIT_OK


def _cmd_gof(args, out):
    data = BivariateSample.from_csv(args.data)
    v = data.x if args.column == "x" else data.y
    if args.scale != 1.0:
        v = v * args.scale
    parts = [float(s) for s in args.ew_params.split(",")]
    if len(parts) != 3:
        raise _UsageError("--ew-params expects a,b,theta")
    from .params import EwParams

    d, p_val = mle.ks_test_ew(v, EwParams(*parts))
    _emit_json(dict(column=args.column, ks_distance=d, ks_pvalue=p_val, n=int(v.size)), out)
    return EXIT_OK


def _cmd_density_grid(args, out):
    p = _parse_params(args.params)
    xs = np.linspace(args.x_min, args.x_max, args.nx)
    ys = np.linspace(args.y_min, args.y_max, args.ny)
    distribution.write_density_grid(p, xs, ys, out)
    return EXIT_OK


def _cmd_dependence_sweep(args, out):
    thetas = np.arange(args.start, args.stop + 1e-12, args.step)
    copula.write_dependence_csv(out, thetas)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser wiring
# ---------------------------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="bgw", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("sample", help="draw pairs, write CSV (x,y)")
    sp.add_argument("--params", required=True, help="a,b1,b2,theta")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default=None)
    sp.set_defaults(fn=_cmd_sample)

    sp = sub.add_parser("fit", help="maximum-likelihood fit of a CSV")
    sp.add_argument("--data", required=True)
    sp.add_argument("--fix-a", type=float, default=None, dest="fix_a")
    sp.add_argument("--starts", type=int, default=5)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--scale", type=float, default=1.0, help="multiply data before fitting")
    sp.add_argument("--out", default=None)
    sp.set_defaults(fn=_cmd_fit)

    sp = sub.add_parser("bayes", help="MCMC Bayes estimates")
    sp.add_argument("--data", required=True)
    sp.add_argument("--prior", default="1.5,1.5", help="d,z or d1,z1,...,d4,z4")
    sp.add_argument("--c", type=float, default=0.5, help="entropy-loss exponent")
    sp.add_argument("--iters", type=int, default=10_000)
    sp.add_argument("--burnin", type=int, default=2_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--scale", type=float, default=1.0)
    sp.add_argument("--trace", default=None, help="write the chain to this CSV")
    sp.add_argument("--out", default=None)
    sp.set_defaults(fn=_cmd_bayes)

    sp = sub.add_parser("dependence", help="dependence measures at one theta")
    sp.add_argument("--theta", type=float, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--mc-n", type=int, default=200_000, dest="mc_n")
    sp.add_argument("--out", default=None)
    sp.set_defaults(fn=_cmd_dependence)

    sp = sub.add_parser("dependence-sweep", help="measures over a theta grid, CSV")
    sp.add_argument("--start", type=float, default=0.01)
    sp.add_argument("--stop", type=float, default=1.0)
    sp.add_argument("--step", type=float, default=0.01)
    sp.add_argument("--out", default=None)
    sp.set_defaults(fn=_cmd_dependence_sweep)

    sp = sub.add_parser("simulate", help="bias/MSE Monte Carlo study")
    sp.add_argument("--config", required=True, help="JSON or key=value file")
    sp.add_argument("--reps", type=int, default=None, help="override replication count")
    sp.add_argument("--out", default=None)
    sp.set_defaults(fn=_cmd_simulate)

    sp = sub.add_parser("analyze", help="full real-data report (JSON)")
    sp.add_argument("--data", required=True)
    sp.add_argument("--scale", type=float, default=0.1, help="fitting scale, see docs")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default=None)
    sp.set_defaults(fn=_cmd_analyze)

    sp = sub.add_parser("gof", help="one-sample KS test against an EW law")
    sp.add_argument("--data", required=True)
    sp.add_argument("--column", choices=("x", "y"), required=True)
    sp.add_argument("--ew-params", required=True, dest="ew_params", help="a,b,theta")
    sp.add_argument("--scale", type=float, default=1.0)
    sp.add_argument("--out", default=None)
    sp.set_defaults(fn=_cmd_gof)

    sp = sub.add_parser("density-grid", help="CDF/PDF values on a grid, CSV")
    sp.add_argument("--params", required=True, help="a,b1,b2,theta")
    sp.add_argument("--x-min", type=float, default=0.05)
    sp.add_argument("--x-max", type=float, default=5.0)
    sp.add_argument("--y-min", type=float, default=0.05)
    sp.add_argument("--y-max", type=float, default=5.0)
    sp.add_argument("--nx", type=int, default=50)
    sp.add_argument("--ny", type=int, default=50)
    sp.add_argument("--out", default=None)
    sp.set_defaults(fn=_cmd_density_grid)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    out_path = getattr(args, "out", None)
    out = _open_out(out_path) or sys.stdout
    try:
        return args.fn(args, out)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (SeriesNonConvergence, RuntimeError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    finally:
        if out is not sys.stdout:
            out.close()


if __name__ == "__main__":
    sys.exit(main())
