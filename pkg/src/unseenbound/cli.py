"""Command-line harness: bound computation on incidence files, simulation
sweeps, stopping-rule experiments, and plot-ready CSV/JSON emission.

Conventions, shared by every subcommand:

- every logarithm is natural;
- all randomness derives from --seed through a documented 64-bit mix
  (splitmix64 over an FNV-1a grid-point hash and the replicate index), so
  outputs are byte-identical across runs and adding grid points never
  perturbs existing rows;
- CSV cells use 10 significant digits and never contain commas;
- exit codes: 0 success, 2 usage error, 3 data (parse) error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Optional, Sequence

import numpy as np

from .bounded import BoundedConfig, _bounded_raw, _m_b_from_counts, bonferroni_bound, bounded_dd_bound, worst_case_bound
from .estimators import COVERAGE_FORMULA, accumulation_curve, coverage_estimate
from .io import IncidenceParseError, fmt_float, load_matrix, parse_incidence
from .model import BoundEstimate, IncidenceSample, SeededStream, derive_stream, sample_stats
from .sampler import make_prevalences
from .selector import heuristic_threshold, recommend_regime
from .stopping import StoppingPolicy, stopping_experiment
from .unbounded import UnboundedConfig, _unbounded_raw, unbounded_bound

__all__ = ["main"]

EPILOG = (
    "All logarithms are natural. Randomness: replicate r of grid point K uses "
    "the PCG64 stream splitmix64(fnv1a64(K) XOR splitmix64(r)) under the master "
    "seed, so results are reproducible and independent of execution order."
)


class UsageError(Exception):
    """Bad flag combination or out-of-range argument (exit code 2)."""


def _float_list(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise UsageError(f"expected a comma-separated list of numbers, got {text!r}") from None


def _write_csv(path: str, header: Sequence[str], rows: Sequence[Sequence[object]]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            cells = []
            for cell in row:
                if isinstance(cell, float):
                    cells.append(fmt_float(cell))
                else:
                    text = str(cell)
                    if "," in text:
                        raise ValueError(f"CSV cell may not contain a comma: {text!r}")
                    cells.append(text)
            fh.write(",".join(cells) + "\n")


def _estimate_json(est) -> dict:
    return {
        "method": est.method,
        "alpha": est.alpha,
        **({"delta": est.delta} if est.delta is not None else {}),
        **({"beta": est.beta} if est.beta is not None else {}),
        "raw_value": float(est.raw_value),
        "reported_value": float(est.reported_value),
        "diagnostics": {k: _plain(v) for k, v in est.diagnostics.items()},
    }


def _plain(v):
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    return v


# ---------------------------------------------------------------------------
# bound
# ---------------------------------------------------------------------------

def _load_sample(args) -> IncidenceSample:
    sample = parse_incidence(args.input, args.format, n_override=args.n)
    if args.M is not None:
        distinct = sample_stats(sample).distinct
        if args.M < distinct:
            raise UsageError(
                f"--M {args.M} is smaller than the {distinct} distinct species observed"
            )
        sample = IncidenceSample(n=sample.n, counts=sample.counts, declared_M=args.M)
    return sample


def cmd_bound(args) -> int:
    sample = _load_sample(args)
    alpha = args.alpha
    delta = args.delta if args.delta is not None else 0.01 * alpha
    beta = args.beta
    needs_m = args.method in ("bonferroni", "worstcase", "bounded")
    if needs_m and args.M is None:
        raise UsageError(f"--M is required for method {args.method!r}")
    out: dict
    if args.method == "bonferroni":
        raw = bonferroni_bound(sample.n, args.M, alpha)
        est = BoundEstimate("bonferroni", alpha, raw, diagnostics={"M": args.M, "n": sample.n})
        out = _estimate_json(est)
    elif args.method == "worstcase":
        raw = worst_case_bound(sample.n, args.M, alpha)
        est = BoundEstimate(
            "worst_case", alpha, raw,
            diagnostics={"M": args.M, "n": sample.n, "r_star": math.log(args.M / alpha)},
        )
        out = _estimate_json(est)
    elif args.method == "bounded":
        est = bounded_dd_bound(sample, args.M, BoundedConfig(alpha=alpha, delta=delta))
        out = _estimate_json(est)
    elif args.method == "unbounded":
        est = unbounded_bound(sample, UnboundedConfig(alpha=alpha, beta=beta))
        out = _estimate_json(est)
    else:  # auto
        rec = recommend_regime(sample, args.M, alpha)
        bounds = {"unbounded_rnorm": _estimate_json(unbounded_bound(sample, UnboundedConfig(alpha, beta)))}
        if args.M is not None:
            bounds["bonferroni"] = _estimate_json(
                BoundEstimate(
                    "bonferroni", alpha, bonferroni_bound(sample.n, args.M, alpha),
                    diagnostics={"M": args.M, "n": sample.n},
                )
            )
            bounds["bounded_dd"] = _estimate_json(
                bounded_dd_bound(sample, args.M, BoundedConfig(alpha=alpha, delta=delta))
            )
        out = {
            "method": "auto",
            "n": sample.n,
            "alpha": alpha,
            "recommendation": {
                "regime": rec.regime,
                "s_hat": rec.s_hat,
                "threshold": rec.threshold,
                "m_inversion": rec.m_inversion,
                "reason": rec.reason,
            },
            "bounds": bounds,
        }
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


# ---------------------------------------------------------------------------
# simulate-intervals
# ---------------------------------------------------------------------------

def _three_bounds(counts: np.ndarray, n: int, M: int, alpha: float, beta: float) -> dict[str, float]:
    """Reported values of the three bounds from a raw count vector."""
    delta = 0.01 * alpha
    b = math.log(n)
    nz = counts[counts > 0].astype(np.float64)
    m_b = _m_b_from_counts(nz, n, M, b)
    raw_bdd, _ = _bounded_raw(n, m_b, M, alpha, delta, b)
    raw_unb, _, _ = _unbounded_raw(n, float(counts.sum()) / n, alpha, beta)
    return {
        "bonferroni": min(bonferroni_bound(n, M, alpha), 1.0),
        "bounded": min(raw_bdd, 1.0),
        "unbounded": min(raw_unb, 1.0),
    }


def cmd_simulate_intervals(args) -> int:
    if (args.n is None) == (args.n_grid is None):
        raise UsageError("exactly one of --n / --n-grid must be given")
    if (args.M is None) == (args.M_grid is None):
        raise UsageError("exactly one of --M / --M-grid must be given")
    if (args.n_grid is None) == (args.M_grid is None):
        raise UsageError("exactly one of n and M must vary (one grid, one fixed value)")
    n_values = [int(v) for v in (args.n_grid if args.n_grid is not None else [args.n])]
    m_values = [int(v) for v in (args.M_grid if args.M_grid is not None else [args.M])]

    rows = []
    for n in n_values:
        for M in m_values:
            model = make_prevalences(args.scenario, args.param, M)
            key = f"intervals|{args.scenario}|{args.param:.10g}|{n}|{M}"
            for rep in range(args.reps):
                gen = derive_stream(args.seed, key, rep).generator()
                counts = gen.binomial(n, model.probs)
                unseen = counts == 0
                mmax = float(model.probs[unseen].max()) if unseen.any() else 0.0
                vals = _three_bounds(counts, n, M, args.alpha, args.beta)
                for method in ("bonferroni", "bounded", "unbounded"):
                    v = vals[method]
                    rows.append(
                        (args.scenario, float(args.param), n, M, rep, method,
                         v, int(mmax <= v), mmax)
                    )
    _write_csv(
        args.out,
        ["scenario", "param", "n", "M", "rep", "method", "value", "covered", "mmax_true"],
        rows,
    )
    return 0


# ---------------------------------------------------------------------------
# compare-regimes
# ---------------------------------------------------------------------------

REGIME_SWEEP = [
    ("zipf", [1.05, 1.02, 1.0, 0.95, 0.9, 0.85, 0.825, 0.8, 0.75]),
    ("geometric", [0.25, 0.1, 0.08, 0.05, 0.02]),
    ("homogeneous", [1000.0, 200.0, 100.0, 200.0 / 3.0, 50.0]),
]

OVERSHOOT_GRID = [0, 10, 100, 1000, 10_000, 100_000, 1_000_000]


def cmd_compare_regimes(args) -> int:
    n, M, alpha, beta = args.n, args.M, args.alpha, args.beta
    rows = []
    thr = heuristic_threshold(n, M, alpha, simplified=True)
    for scenario, params in REGIME_SWEEP:
        for param in params:
            model = make_prevalences(scenario, param, M)
            key = f"regimes|{scenario}|{param:.10g}|{n}|{M}"
            sums = {"bonferroni": 0.0, "bounded": 0.0, "unbounded": 0.0}
            for rep in range(args.reps):
                gen = derive_stream(args.seed, key, rep).generator()
                counts = gen.binomial(n, model.probs)
                vals = _three_bounds(counts, n, M, alpha, beta)
                for k, v in vals.items():
                    sums[k] += v
            for method in ("bonferroni", "bounded", "unbounded"):
                rows.append(
                    (scenario, float(param), n, M, model.s_true, thr, method,
                     sums[method] / args.reps)
                )
    _write_csv(
        args.out,
        ["scenario", "param", "n", "M", "S_true", "threshold", "method", "mean_value"],
        rows,
    )
    if args.overshoot_out:
        _write_overshoot(args)
    return 0


def _write_overshoot(args) -> None:
    """Bounded-bound sensitivity to an inflated alphabet size, on common draws."""
    n, M_true = args.overshoot_n, args.overshoot_M
    alpha, beta = args.alpha, args.beta
    delta = 0.01 * alpha
    model = make_prevalences("zipf", args.overshoot_gamma, M_true)
    key = f"overshoot|zipf|{args.overshoot_gamma:.10g}|{n}|{M_true}"
    b = math.log(n)
    grid = [int(v) for v in args.m_add] if args.m_add else OVERSHOOT_GRID
    sums = {m_add: 0.0 for m_add in grid}
    unb_sum = 0.0
    for rep in range(args.reps):
        gen = derive_stream(args.seed, key, rep).generator()
        counts = gen.binomial(n, model.probs)
        nz = counts[counts > 0].astype(np.float64)
        raw_unb, _, _ = _unbounded_raw(n, float(counts.sum()) / n, alpha, beta)
        unb_sum += min(raw_unb, 1.0)
        for m_add in grid:
            m_decl = M_true + m_add
            m_b = _m_b_from_counts(nz, n, m_decl, b)
            raw, _ = _bounded_raw(n, m_b, m_decl, alpha, delta, b)
            sums[m_add] += min(raw, 1.0)
    rows = []
    for m_add in grid:
        rows.append(("zipf", float(args.overshoot_gamma), n, M_true, m_add, "bounded",
                     sums[m_add] / args.reps))
    for m_add in grid:
        rows.append(("zipf", float(args.overshoot_gamma), n, M_true, m_add, "unbounded",
                     unb_sum / args.reps))
    _write_csv(
        args.overshoot_out,
        ["scenario", "param", "n", "M_true", "m_add", "method", "mean_value"],
        rows,
    )


# ---------------------------------------------------------------------------
# simulate-stopping
# ---------------------------------------------------------------------------

STOPPING_SCENARIOS = {
    "zipf": ("zipf", 1.05),
    "homog-0.006": ("homogeneous", 1.0 / 0.006),
    "homog-0.05": ("homogeneous", 1.0 / 0.05),
    "tgeom": ("truncated-geometric", 0.05),
}
STOPPING_POLICIES = ("bounded", "unbounded", "coverage")
DEFAULT_Q_GRID = [0.0, 1e-4, 5e-4, 1e-3, 2.5e-3, 5e-3]


def _build_policies(names, eps, alpha, target, n_max):
    policies = []
    for name in names:
        if name == "bounded":
            policies.append((name, StoppingPolicy("mmax_bounded", n_max, epsilon=eps, alpha=alpha)))
        elif name == "unbounded":
            policies.append((name, StoppingPolicy("mmax_unbounded", n_max, epsilon=eps, alpha=alpha)))
        elif name == "coverage":
            policies.append((name, StoppingPolicy("coverage", n_max, coverage_target=target)))
        else:
            raise UsageError(f"unknown policy {name!r}")
    return policies


def cmd_simulate_stopping(args) -> int:
    scen_names = args.scenarios.split(",") if args.scenarios else list(STOPPING_SCENARIOS)
    scenarios = []
    for name in scen_names:
        if name not in STOPPING_SCENARIOS:
            raise UsageError(f"unknown scenario {name!r}; expected one of {sorted(STOPPING_SCENARIOS)}")
        kind, param = STOPPING_SCENARIOS[name]
        scenarios.append((name, make_prevalences(kind, param, args.M)))
    pol_names = args.policies.split(",") if args.policies else list(STOPPING_POLICIES)
    policies = _build_policies(pol_names, args.epsilon, args.alpha, args.coverage_target, args.n_max)
    q_values = args.q_grid if args.q_grid is not None else DEFAULT_Q_GRID
    rows = stopping_experiment(
        scenarios,
        policies,
        q_values,
        reps=args.reps,
        n_max=args.n_max,
        master_seed=args.seed,
        relevance_eps=args.epsilon,
        workers=args.workers,
    )
    _write_csv(
        args.out,
        ["scenario", "policy", "q", "mean_nstop", "mean_missed", "type1", "mean_extra"],
        [(r.scenario, r.policy, r.q, r.mean_nstop, r.mean_missed, r.type1, r.mean_extra) for r in rows],
    )
    return 0


# ---------------------------------------------------------------------------
# diagnose
# ---------------------------------------------------------------------------

def cmd_diagnose(args) -> int:
    sample = _load_sample(args)
    stats = sample_stats(sample)
    rec = recommend_regime(sample, args.M, args.alpha)
    out = {
        "n": sample.n,
        "u_total": stats.u_total,
        "distinct": stats.distinct,
        "q1": stats.q1,
        "q2": stats.q2,
        "s_hat": stats.u_total / sample.n,
        "coverage_estimate": coverage_estimate(sample) if sample.n >= 2 else None,
        "coverage_formula": COVERAGE_FORMULA,
        "recommendation": {
            "regime": rec.regime,
            "s_hat": rec.s_hat,
            "threshold": rec.threshold,
            "m_inversion": rec.m_inversion,
            "reason": rec.reason,
        },
    }
    if args.M is not None:
        out["threshold"] = heuristic_threshold(sample.n, args.M, args.alpha, simplified=False)
        out["threshold_simplified"] = heuristic_threshold(sample.n, args.M, args.alpha, simplified=True)
    if args.curve_out:
        if args.format == "counts":
            raise UsageError("accumulation curve requires unit-level data (dense or sparse)")
        matrix, _ids = load_matrix(args.input, args.format)
        curve = accumulation_curve(matrix, n_perms=args.perms, rng=SeededStream(args.seed, 0))
        _write_csv(args.curve_out, ["k", "mean_distinct"],
                   [(k + 1, float(v)) for k, v in enumerate(curve)])
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="unseenbound",
        description="Upper confidence bounds for unseen-category prevalences, "
        "with simulation sweeps and sequential stopping experiments.",
        epilog=EPILOG,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", help="compute a bound from an incidence file", epilog=EPILOG)
    p.add_argument("--input", required=True)
    p.add_argument("--format", required=True, choices=["dense", "sparse", "counts"])
    p.add_argument("--method", required=True,
                   choices=["bonferroni", "worstcase", "bounded", "unbounded", "auto"])
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--delta", type=float, default=None, help="defaults to alpha/100")
    p.add_argument("--beta", type=float, default=1e-5)
    p.add_argument("--M", type=int, default=None, help="alphabet size (required for bounded methods)")
    p.add_argument("--n", type=int, default=None, help="number of units (counts format only)")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("simulate-intervals", help="bound-length sweep over an n or M grid", epilog=EPILOG)
    p.add_argument("--scenario", required=True, choices=["zipf", "geometric", "homogeneous"])
    p.add_argument("--param", type=float, required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--n-grid", dest="n_grid", type=_float_list, default=None)
    p.add_argument("--M", type=int, default=None)
    p.add_argument("--M-grid", dest="M_grid", type=_float_list, default=None)
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--beta", type=float, default=1e-5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate_intervals)

    p = sub.add_parser("compare-regimes", help="bound lengths across the regime sweep, with threshold", epilog=EPILOG)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--M", type=int, default=1500)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--beta", type=float, default=1e-5)
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--overshoot-out", dest="overshoot_out", default=None,
                   help="also write the alphabet-overshoot sweep to this CSV")
    p.add_argument("--overshoot-n", dest="overshoot_n", type=int, default=1000)
    p.add_argument("--overshoot-M", dest="overshoot_M", type=int, default=5000)
    p.add_argument("--overshoot-gamma", dest="overshoot_gamma", type=float, default=1.02)
    p.add_argument("--m-add", dest="m_add", type=_float_list, default=None,
                   help="overshoot grid, default 0,10,...,10^6")
    p.set_defaults(func=cmd_compare_regimes)

    p = sub.add_parser("simulate-stopping", help="stopping-rule experiment grid", epilog=EPILOG)
    p.add_argument("--reps", type=int, default=200)
    p.add_argument("--n-max", dest="n_max", type=int, default=10_000)
    p.add_argument("--M", type=int, default=1500)
    p.add_argument("--epsilon", type=float, default=0.005)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--coverage-target", dest="coverage_target", type=float, default=0.99)
    p.add_argument("--q-grid", dest="q_grid", type=_float_list, default=None)
    p.add_argument("--scenarios", default=None, help="comma list; default all four")
    p.add_argument("--policies", default=None, help="comma list; default bounded,unbounded,coverage")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate_stopping)

    p = sub.add_parser("diagnose", help="sample summaries, accumulation curve, regime recommendation", epilog=EPILOG)
    p.add_argument("--input", required=True)
    p.add_argument("--format", required=True, choices=["dense", "sparse", "counts"])
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--M", type=int, default=None)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--perms", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--curve-out", dest="curve_out", default=None)
    p.set_defaults(func=cmd_diagnose)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (IncidenceParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
