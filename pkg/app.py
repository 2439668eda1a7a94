import argparse
import asyncio
import json
import logging
import sys
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional

import numpy as np
from pydantic import ValidationError

from agents import experiments
from agents.orchestrator import ExperimentOrchestrator
from agents.report import ExperimentReport, ReportRow, write_report
from agents.run_config import SUBCOMMANDS, RunConfig
from config.settings import settings
from tools.beatty import beatty_terms, hit_count, is_member
from tools.diophantine import dirichlet_approx_mod, estimate_type, lower_range_bound, satisfies_dirichlet
from tools.errors import DomainError, ParameterError, ToolkitError
from tools.mangoldt import build_mangoldt_table
from tools.sums import sequence_discrepancy, twisted_sum
from tools.trigapprox import sandwich_violation, smoothed_indicator, vaaler_poly

logger = logging.getLogger("beatty_primes")

# --- Help texts (the result each subcommand exercises) ---
HELP = {
    "sieve-stats": "Build the von Mangoldt table; report prime count, Chebyshev psi(N) and memory use.",
    "beatty": "Print the Beatty terms floor(alpha*n + beta), n = 1..N.",
    "member": "Beatty membership criterion 0 < {(m-beta+1)/alpha} <= 1/alpha for a single m.",
    "expsum": "Twisted von Mangoldt sum over n <= N, n = c (mod d), with phase e(theta*n).",
    "discrepancy": "Extreme discrepancy of {alpha*m + beta}, m <= N (closed form).",
    "vaaler-check": "Vaaler polynomial sandwich: |psi* - psi| <= Fejer envelope on a grid, plus coefficient decay.",
    "psi-delta-check": "Vinogradov smoothed indicator: range, equality regions and Fourier coefficient decay.",
    "dirichlet": "Dirichlet approximation of alpha*w/d with denominator q <= K, and the lower-range check.",
    "type": "Irrationality type estimate from partial quotients (exact for quadratic irrationals).",
    "verify-th1": "Main theorem for integer beta: Beatty-restricted Chebyshev sum in a progression "
                  "against alpha^-1 psi(N; c, d), error exponent 1 - 1/(3tau+2).",
    "verify-th2": "Theorem for the progression d*floor(alpha*n+beta)+c, any real beta: error O(N^(1-eps)).",
    "lemma24-scan": "Exponential-sum bound at theta = k/alpha for k = 1..k_max, with the K-selection diagnostic.",
    "decay-scan": "Discrepancy decay D(M) <= M^(-1/tau + o(1)) over a grid of M.",
    "decomposition-check": "Exact sawtooth decomposition of the Beatty-restricted sum through the hit-count identity.",
    "pipeline-check": "Smoothing pipeline: sharp versus smoothed indicator sums, exceptional count V(I, M).",
    "sd": "Sawtooth sums S_0, S_1 of the decomposition, bracketed by the Vaaler sandwich and its brute-force bound.",
    "bound-comparison": "Twisted sum at theta near a convergent a/q of alpha (10 <= q <= sqrt(x)) against the (a, q) bound.",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="beatty-primes",
        description="Numerical toolkit for primes in Beatty sequences.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, help=HELP[name], description=HELP[name])
        p.add_argument("--alpha", help="rat:p/q | quad:p,r,D,q | sqrt:D | dec:<digits>")
        p.add_argument("--beta", default="0")
        p.add_argument("--c", type=int, default=0)
        p.add_argument("--d", type=int, default=1)
        p.add_argument("--N", "--x", "--M", dest="N", type=int)
        p.add_argument("--grid", help="start:stop:ratio (geometric)")
        p.add_argument("--m", type=int)
        p.add_argument("--theta")
        p.add_argument("--gamma")
        p.add_argument("--w", type=int, default=1)
        p.add_argument("--K", type=int)
        p.add_argument("--k-max", dest="k_max", type=int)
        p.add_argument("--depth", type=int, default=settings.TYPE_ESTIMATE_DEPTH)
        p.add_argument("--epsilon", type=float, default=settings.EPSILON)
        p.add_argument("--delta", type=float)
        p.add_argument("--H", type=int)
        p.add_argument("--J", type=int)
        p.add_argument("--fourier-J", dest="fourier_J", type=int)
        p.add_argument("--method", choices=["enumeration", "identity"], default="identity")
        p.add_argument("--bits", type=int, default=settings.DECIMAL_PRECISION_BITS)
        p.add_argument("--out")
        p.add_argument("--format", choices=["json", "csv"], default="json")
        p.add_argument("--threads", type=int, default=settings.THREADS)
        p.add_argument("--seed", type=int, default=settings.SEED)
    return parser


def _emit(payload: Any) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True, default=str))


def _primitive_report(cfg: RunConfig, results: Dict[str, Any]) -> ExperimentReport:
    return ExperimentReport(experiment=cfg.subcommand, parameters={"alpha": cfg.alpha, "beta": cfg.beta},
                            extras=results)


# --- Primitive subcommands ---
def cmd_sieve_stats(cfg: RunConfig) -> ExperimentReport:
    stats = build_mangoldt_table(cfg.N).stats()
    _emit(stats)
    return _primitive_report(cfg, stats)


def cmd_beatty(cfg: RunConfig) -> ExperimentReport:
    terms = beatty_terms(cfg.params(), cfg.N).tolist()
    print(" ".join(str(t) for t in terms))
    return _primitive_report(cfg, {"terms": terms})


def cmd_member(cfg: RunConfig) -> ExperimentReport:
    params = cfg.params()
    member = is_member(params, cfg.m)
    print("true" if member else "false")
    results = {"m": cfg.m, "member": member}
    if params.beta_is_integer:
        results["hit_count"] = hit_count(params, cfg.m)
    return _primitive_report(cfg, results)


def cmd_expsum(cfg: RunConfig) -> ExperimentReport:
    table = build_mangoldt_table(cfg.N)
    result = twisted_sum(table, cfg.N, cfg.real("theta"), cfg.c, cfg.d)
    _emit(result.model_dump())
    return _primitive_report(cfg, result.model_dump())


def cmd_discrepancy(cfg: RunConfig) -> ExperimentReport:
    result = sequence_discrepancy(cfg.real("alpha"), cfg.real("beta"), cfg.N)
    _emit(result.model_dump())
    return _primitive_report(cfg, result.model_dump())


def _vaaler_grid(H: int, points: int = 10_000) -> np.ndarray:
    near_zero = np.linspace(-1.0 / (10 * H), 1.0 / (10 * H), 101)
    return np.concatenate([np.linspace(0.0, 1.0, points, endpoint=False), np.mod(near_zero, 1.0)])


def cmd_vaaler_check(cfg: RunConfig) -> ExperimentReport:
    grid = _vaaler_grid(cfg.H)
    poly = vaaler_poly(cfg.H)
    results = {
        "H": cfg.H,
        "bound_constant": poly.bound_constant,
        "decay_ratio": poly.decay_ratio(),
        "violation_proof_weights": sandwich_violation(cfg.H, grid, "proof"),
        "violation_stated_weights": sandwich_violation(cfg.H, grid, "stated"),
    }
    results["sandwich_holds"] = results["violation_proof_weights"] <= 1e-9
    results["stated_weights_hold"] = results["violation_stated_weights"] <= 1e-9
    _emit(results)
    report = _primitive_report(cfg, results)
    if not results["stated_weights_hold"]:
        report.warn("the envelope with weights (1 - |h|/H) fails on the grid")
    return report


def cmd_psi_delta_check(cfg: RunConfig) -> ExperimentReport:
    gamma = float(cfg.real("gamma"))
    indicator = smoothed_indicator(gamma, cfg.delta, cfg.J)
    x = np.linspace(0.0, 1.0, 10_001)[:-1]
    values = indicator.evaluate(x)
    flat = (x >= cfg.delta) & (x <= gamma - cfg.delta) | (x >= gamma + cfg.delta) & (x <= 1 - cfg.delta)
    j = np.arange(1, 10_001)
    coeff = np.maximum(np.abs(indicator.g(j)), np.abs(indicator.h(j)))
    truncated = indicator.poly().evaluate(x)
    results = {
        "gamma": gamma,
        "delta": cfg.delta,
        "J": indicator.J,
        "min": float(values.min()),
        "max": float(values.max()),
        "equality_holds": bool(np.all(values[flat] == indicator.sharp(x[flat]))),
        "coefficient_bound_holds": bool(np.all(coeff <= indicator.coefficient_bound(j) * (1 + 1e-12))),
        "truncation_error": float(np.max(np.abs(truncated - values))),
        "truncation_bound": indicator.truncation_bound(),
    }
    _emit(results)
    return _primitive_report(cfg, results)


def cmd_dirichlet(cfg: RunConfig) -> ExperimentReport:
    alpha = cfg.real("alpha")
    approx = dirichlet_approx_mod(alpha, cfg.w, cfg.d, cfg.K)
    estimate = estimate_type(alpha, cfg.depth)
    floor = lower_range_bound(cfg.K, cfg.w, cfg.d, estimate.tau_hat, settings.LOWER_RANGE_EPSILON)
    target = alpha.affine(Fraction(cfg.w, cfg.d), 0)
    results = {
        "a": approx.a,
        "q": approx.q,
        "err": approx.err,
        "satisfies": satisfies_dirichlet(target, approx, cfg.K),
        "lower_range_bound": floor,
        "lower_range_holds": approx.q > floor,
        "tau": estimate.tau_hat,
    }
    _emit(results)
    return _primitive_report(cfg, results)


def cmd_type(cfg: RunConfig) -> ExperimentReport:
    estimate = estimate_type(cfg.real("alpha"), cfg.depth)
    _emit(estimate.model_dump())
    return _primitive_report(cfg, estimate.model_dump())


# --- Experiment subcommands ---
def cmd_verify_th1(cfg: RunConfig) -> ExperimentReport:
    orchestrator = ExperimentOrchestrator(threads=cfg.threads)
    return asyncio.run(orchestrator.verify_th1(cfg.params(), cfg.c, cfg.d, cfg.grid_points(), cfg.epsilon))


def cmd_verify_th2(cfg: RunConfig) -> ExperimentReport:
    orchestrator = ExperimentOrchestrator(threads=cfg.threads)
    return asyncio.run(orchestrator.verify_th2(cfg.params(), cfg.c, cfg.d, cfg.grid_points(), cfg.epsilon))


def cmd_lemma24_scan(cfg: RunConfig) -> ExperimentReport:
    orchestrator = ExperimentOrchestrator(threads=cfg.threads)
    return asyncio.run(orchestrator.lemma24_scan(cfg.params(), cfg.c, cfg.d, cfg.N, cfg.k_max))


def cmd_decay_scan(cfg: RunConfig) -> ExperimentReport:
    orchestrator = ExperimentOrchestrator(threads=cfg.threads)
    return asyncio.run(orchestrator.decay_scan(cfg.params(), cfg.grid_points()))


def cmd_decomposition_check(cfg: RunConfig) -> ExperimentReport:
    params = cfg.params()
    table = build_mangoldt_table(cfg.N)
    defect = experiments.decomposition_check(params, cfg.c, cfg.d, cfg.N, table)
    report = ExperimentReport(
        experiment="decomposition-check",
        parameters=experiments.parameter_block(params, cfg.c, cfg.d, N=cfg.N),
        rows=[ReportRow.measured(cfg.N, defect, 0.0, 1e-6)],
    )
    if defect > 1e-6:
        report.warn(f"decomposition defect {defect:.3g} exceeds 1e-6")
    print(f"{defect:.3e}")
    return report


def cmd_pipeline_check(cfg: RunConfig) -> ExperimentReport:
    table = build_mangoldt_table(cfg.table_limit())
    return experiments.vinogradov_pipeline_check(cfg.params(), cfg.c, cfg.d, cfg.N, cfg.delta, table,
                                                 fourier_J=cfg.fourier_J)


def cmd_sd(cfg: RunConfig) -> ExperimentReport:
    table = build_mangoldt_table(cfg.table_limit())
    return experiments.sd_bound_check(cfg.params(), cfg.c, cfg.d, cfg.N, table, cfg.epsilon)


def cmd_bound_comparison(cfg: RunConfig) -> ExperimentReport:
    table = build_mangoldt_table(cfg.table_limit())
    return experiments.bound_comparison_scan(cfg.real("alpha"), cfg.grid_points(), table)


COMMANDS: Dict[str, Callable[[RunConfig], ExperimentReport]] = {
    "sieve-stats": cmd_sieve_stats,
    "beatty": cmd_beatty,
    "member": cmd_member,
    "expsum": cmd_expsum,
    "discrepancy": cmd_discrepancy,
    "vaaler-check": cmd_vaaler_check,
    "psi-delta-check": cmd_psi_delta_check,
    "dirichlet": cmd_dirichlet,
    "type": cmd_type,
    "verify-th1": cmd_verify_th1,
    "verify-th2": cmd_verify_th2,
    "lemma24-scan": cmd_lemma24_scan,
    "decay-scan": cmd_decay_scan,
    "decomposition-check": cmd_decomposition_check,
    "pipeline-check": cmd_pipeline_check,
    "sd": cmd_sd,
    "bound-comparison": cmd_bound_comparison,
}

# Subcommands whose report is written even without --out.
EXPERIMENTS = (
    "verify-th1", "verify-th2", "lemma24-scan", "decay-scan", "decomposition-check", "pipeline-check",
    "sd", "bound-comparison",
)


def _validation_message(e: ValidationError) -> str:
    return "; ".join(err["msg"].removeprefix("Value error, ") for err in e.errors())


def run(argv: Optional[List[str]] = None) -> int:
    """Parse, validate, execute. Returns 0 on success, 2 on invalid input, 1 on computation errors."""
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        cfg = RunConfig(**vars(args))
    except ValidationError as e:
        print(f"error: {_validation_message(e)}", file=sys.stderr)
        return 2
    except (ParameterError, DomainError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2

    settings.THREADS = cfg.threads
    try:
        report = COMMANDS[cfg.subcommand](cfg)
        report.run_config = cfg.model_dump()
        report.threads = cfg.threads
        if cfg.out or cfg.subcommand in EXPERIMENTS:
            path = write_report(report, cfg.out, cfg.format)
            logger.info("Report written to %s", path)
    except ValidationError as e:
        print(f"error: {_validation_message(e)}", file=sys.stderr)
        return 2
    except (ParameterError, DomainError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except ToolkitError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    except Exception as e:
        logger.exception("%s failed", cfg.subcommand)
        print(f"error: unexpected {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    logging.basicConfig(
        level=settings.LOG_LEVEL,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    sys.exit(run())


if __name__ == "__main__":
    main()
