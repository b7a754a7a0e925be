"""The r-norm upper confidence bound for the maximum unseen prevalence over
summable prevalence sequences (no alphabet-size assumption), with a
data-driven total-mass plug-in, plus the constructive demonstration that no
data-independent bound can be valid in this regime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .model import (
    BoundEstimate,
    IncidenceSample,
    PrevalenceModel,
    _require_unit_interval,
    sample_stats,
)

__all__ = [
    "UnboundedConfig",
    "u_r",
    "oracle_r_star",
    "total_mass_ucb",
    "total_mass_lcb",
    "condition_check",
    "unbounded_bound",
    "worstcase_impossibility_demo",
]


@dataclass(frozen=True)
class UnboundedConfig:
    """Confidence split for the unbounded-alphabet bound: beta of the budget
    goes to the total-mass upper confidence bound, the rest to the r-norm
    tail bound, for overall level 1 - alpha."""

    alpha: float
    beta: float = 1e-5

    def __post_init__(self) -> None:
        _require_unit_interval("alpha", self.alpha)
        if not 0.0 < self.beta < self.alpha:
            raise ValueError(
                f"beta must satisfy 0 < beta < alpha, got beta={self.beta}, alpha={self.alpha}"
            )


def u_r(n: int, r: float, S: float, level: float) -> float:
    """r-norm tail bound for the maximum unseen prevalence at known total mass.

    Returns (S/level)^(1/r) * ((r-1)/(n+r-1))^((r-1)/r) * (n/(n+r-1))^(n/r),
    evaluated in log space; at r = 1 this reduces to S/level (Markov on the
    total mass, using the convention 0^0 = 1).
    """
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    if r < 1.0:
        raise ValueError(f"r must be >= 1, got {r}")
    if S <= 0.0:
        raise ValueError(f"S must be positive, got {S}")
    _require_unit_interval("level", level)
    if r == 1.0:
        return S / level
    log_u = (
        math.log(S / level) / r
        + (r - 1.0) / r * (math.log(r - 1.0) - math.log(n + r - 1.0))
        + n / r * (math.log(n) - math.log(n + r - 1.0))
    )
    return math.exp(log_u)


def oracle_r_star(n: int, S: float, level: float) -> float:
    """Rate-optimal exponent log(S/level) + log n - log log n (needs n >= 3)."""
    if n < 3:
        raise ValueError(f"n must be >= 3 so that log log n is positive, got {n}")
    if S <= 0.0:
        raise ValueError(f"S must be positive, got {S}")
    _require_unit_interval("level", level)
    return math.log(S / level) + math.log(n) - math.log(math.log(n))


def total_mass_ucb(sample: IncidenceSample, beta: float) -> float:
    """Level 1-beta upper confidence bound for the total mass sum(p_j).

    With the unbiased estimate S_hat = U_total/n and c = log(1/beta)/(2n),
    returns (sqrt(c) + sqrt(c + S_hat))^2, never below S_hat.
    """
    _require_unit_interval("beta", beta)
    s_hat = sample_stats(sample).u_total / sample.n
    return _total_mass_ucb_from(s_hat, sample.n, beta)


def _total_mass_ucb_from(s_hat: float, n: int, beta: float) -> float:
    c = math.log(1.0 / beta) / (2.0 * n)
    return (math.sqrt(c) + math.sqrt(c + s_hat)) ** 2


def total_mass_lcb(sample: IncidenceSample, beta: float) -> float:
    """Mirrored lower confidence bound (max{0, sqrt(S_hat + c) - sqrt(c)})^2."""
    _require_unit_interval("beta", beta)
    s_hat = sample_stats(sample).u_total / sample.n
    return _total_mass_lcb_from(s_hat, sample.n, beta)


def _total_mass_lcb_from(s_hat: float, n: int, beta: float) -> float:
    c = math.log(1.0 / beta) / (2.0 * n)
    root = math.sqrt(c + s_hat) - math.sqrt(c)
    return max(0.0, root) ** 2


def condition_check(n: int, r: float) -> bool:
    """True iff (r-1) + log(r-1) >= 1 + log log n (boundary inclusive).

    This is the mild exponent condition under which enlarging (r, S) can only
    enlarge the bound, so plugging upper confidence values keeps validity.
    """
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    if r <= 1.0:
        raise ValueError(f"r must be > 1, got {r}")
    return (r - 1.0) + math.log(r - 1.0) >= 1.0 + math.log(math.log(n))


def _unbounded_raw(n: int, s_hat: float, alpha: float, beta: float) -> tuple[float, float, float]:
    """Raw bound, total-mass UCB, and exponent for the plug-in procedure."""
    s_star = _total_mass_ucb_from(s_hat, n, beta)
    level = alpha - beta
    r_star = math.log(s_star / level) + math.log(n) - math.log(math.log(n))
    if r_star < 1.0:
        raise ValueError(
            f"degenerate configuration: plug-in exponent {r_star:.4f} < 1 "
            f"(n={n}, S_hat={s_hat}); no valid r-norm bound"
        )
    return u_r(n, r_star, s_star, level), s_star, r_star


def unbounded_bound(sample: IncidenceSample, cfg: UnboundedConfig) -> BoundEstimate:
    """Fully data-dependent r-norm bound at overall level 1 - alpha.

    Plugs the total-mass upper confidence bound S* (level 1-beta) and the
    exponent R* = log(S*/(alpha-beta)) + log n - log log n into :func:`u_r`
    at level alpha - beta.  Diagnostics carry S*, R*, and ``condition_ok``,
    the exponent condition evaluated conservatively at the mirrored
    total-mass lower confidence bound; a failed check is a warning flag,
    never an error.
    """
    n = sample.n
    if n < 3:
        raise ValueError(f"n must be >= 3 for the unbounded bound, got {n}")
    s_hat = sample_stats(sample).u_total / n
    raw, s_star, r_star = _unbounded_raw(n, s_hat, cfg.alpha, cfg.beta)
    s_lcb = _total_mass_lcb_from(s_hat, n, cfg.beta)
    level = cfg.alpha - cfg.beta
    if s_lcb > 0.0:
        r_at_lcb = math.log(s_lcb / level) + math.log(n) - math.log(math.log(n))
        condition_ok = r_at_lcb > 1.0 and condition_check(n, r_at_lcb)
    else:
        condition_ok = False
    # Large-n simplification (r/(e*n)) * (S/level)^(1/r), reported for
    # comparison only; the exact form above is always the bound.
    asymptotic = r_star / (math.e * n) * (s_star / level) ** (1.0 / r_star)
    return BoundEstimate(
        method="unbounded_rnorm",
        alpha=cfg.alpha,
        beta=cfg.beta,
        raw_value=raw,
        diagnostics={
            "S_star": s_star,
            "R_star": r_star,
            "S_hat": s_hat,
            "condition_ok": condition_ok,
            "asymptotic_form": asymptotic,
        },
    )


_DEMO_MAX_SPECIES = 10**6


def worstcase_impossibility_demo(
    n: int, alpha: float, candidate_U: float
) -> Tuple[PrevalenceModel, float]:
    """Adversarial prevalence vector defeating a candidate constant bound.

    Given any data-independent candidate U in (0, 1), constructs a summable
    prevalence vector under which P(max unseen prevalence >= U) = c*alpha
    for some c > 1, and returns the vector with that exact exceedance
    probability.

    When (1-U)^n > alpha a single species at x = 1 - (c*alpha)^(1/n) >= U
    (next to two always-seen species) suffices, with c the midpoint of the
    feasible interval (1, (1-U)^n / alpha).  Otherwise one species cannot be
    unseen often enough and the construction replicates k species at U until
    the exceedance clears alpha; k grows like alpha/(1-U)^n, and a vector
    that would need more than 10^6 species raises instead of silently
    returning an invalid refutation.
    """
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    _require_unit_interval("alpha", alpha)
    _require_unit_interval("candidate_U", candidate_U)

    log_miss = n * math.log1p(-candidate_U)  # log P(one species at U unseen)
    if log_miss > math.log(alpha):
        # Single rare species: exceedance is exactly P(N = 0) = c*alpha.
        c_hi = math.exp(log_miss) / alpha
        c = (1.0 + c_hi) / 2.0
        x = -math.expm1(math.log(c * alpha) / n)
        probs = np.array([1.0, 1.0, x])
        exceed = c * alpha
    else:
        target = min(2.0 * alpha, (1.0 + alpha) / 2.0)
        per = math.exp(log_miss)  # P(a species at U stays unseen)
        needed = -math.log1p(-target)
        if per <= 0.0 or needed / per > _DEMO_MAX_SPECIES:
            approx = "inf" if per <= 0.0 else f"~{needed / per:.3g}"
            raise ValueError(
                f"candidate_U={candidate_U} at n={n} needs {approx} replicated species "
                f"to defeat; not materializable (limit {_DEMO_MAX_SPECIES})"
            )
        k = math.ceil(math.log1p(-target) / math.log1p(-per))
        probs = np.concatenate([[1.0, 1.0], np.full(k, candidate_U)])
        exceed = -math.expm1(k * math.log1p(-per))
    model = PrevalenceModel(
        kind="explicit",
        params={"candidate_U": float(candidate_U), "alpha": float(alpha)},
        M=probs.size,
        probs=probs,
    )
    assert exceed > alpha
    return model, exceed
