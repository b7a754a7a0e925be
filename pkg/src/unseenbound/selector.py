"""Choice between the bounded- and unbounded-alphabet bounds: the total-mass
threshold heuristic, its numeric alphabet-size inversion, and the Lambert W
special function used for comparison."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .model import IncidenceSample, _require_unit_interval, sample_stats

__all__ = [
    "lambert_w0",
    "heuristic_threshold",
    "invert_threshold_m",
    "recommend_regime",
    "RegimeRecommendation",
    "INDIFFERENCE_TAU",
]

# Relative half-width of the indifference band around the threshold; near the
# threshold the two bounds are practically interchangeable, and a dead band
# avoids flip-flopping in sequential use.
INDIFFERENCE_TAU = 0.05


def lambert_w0(x: float) -> float:
    """Principal branch of the Lambert W function: w with w * e^w = x.

    Defined for x >= -1/e.  Halley iteration from a branch-point series or
    log-log asymptotic start; converges to residual
    |w*e^w - x| <= 1e-12 * max(1, |x|) in a handful of steps.
    """
    if math.isnan(x):
        raise ValueError("x must be a real number")
    if x < -1.0 / math.e:
        raise ValueError(f"lambert_w0 requires x >= -1/e, got {x}")
    if x == 0.0:
        return 0.0
    if x > 1e300:
        raise ValueError(f"x too large for float evaluation, got {x}")
    # Initial guess: series near the branch point, asymptotic for large x,
    # crude rational form in between.
    if x < -0.25:
        w = -1.0 + math.sqrt(2.0 * (math.e * x + 1.0))
    elif x < math.e:
        w = x / (1.0 + x) if x > 0 else x * math.exp(-x)
    else:
        lx = math.log(x)
        w = lx - math.log(lx)
    tol = 1e-13 * max(1.0, abs(x))
    for _ in range(100):
        ew = math.exp(w)
        f = w * ew - x
        if abs(f) <= tol:
            break
        wp1 = w + 1.0
        # Halley step; the second-order correction keeps the branch point stable
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        w -= f / denom
    return w


def heuristic_threshold(n: int, M: int, alpha: float, simplified: bool = False) -> float:
    """Total-mass threshold below which the unbounded bound is favoured.

    Full form: (-log(1-alpha)/alpha) * (M/n) * log(M/alpha).  With
    ``simplified=True`` the near-unit prefactor at alpha = 0.05 is dropped,
    giving (M/n) * log(20*M).
    """
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    if M < 1:
        raise ValueError(f"M must be a positive integer, got {M}")
    _require_unit_interval("alpha", alpha)
    if simplified:
        return (M / n) * math.log(20.0 * M)
    return (-math.log1p(-alpha) / alpha) * (M / n) * math.log(M / alpha)


def invert_threshold_m(s: float, n: int, alpha: float) -> float:
    """Alphabet size at which the threshold equals the given total mass.

    Solves M * log(M/alpha) = s * n * alpha / (-log(1-alpha)) for M >= 1 by
    bisection (the left side is strictly increasing in M); for total masses
    below the M = 1 threshold, returns 1.0.
    """
    if s <= 0.0:
        raise ValueError(f"total mass must be positive, got {s}")
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    _require_unit_interval("alpha", alpha)
    rhs = s * n * alpha / (-math.log1p(-alpha))

    def lhs(m: float) -> float:
        return m * math.log(m / alpha)

    lo = 1.0
    if lhs(lo) >= rhs:
        return 1.0
    hi = 2.0
    while lhs(hi) < rhs:
        hi *= 2.0
        if hi > 1e15:
            raise ValueError("threshold inversion out of range")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if lhs(mid) < rhs:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-9 * hi:
            break
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class RegimeRecommendation:
    regime: str  # "bounded" | "unbounded" | "indifferent"
    s_hat: float
    threshold: Optional[float]
    m_inversion: Optional[float]
    reason: str


def recommend_regime(
    sample: IncidenceSample, M: Optional[int], alpha: float
) -> RegimeRecommendation:
    """Pick a bound family from the empirical total mass.

    Without an alphabet size the bounded bound is inapplicable, so the
    answer is always "unbounded".  Otherwise S_hat is compared to the full
    threshold with a +-5% indifference band; the rationale carries S_hat,
    the threshold, and the alphabet size at which the threshold would sit
    exactly at S_hat.
    """
    _require_unit_interval("alpha", alpha)
    shat = sample_stats(sample).u_total / sample.n
    if M is None:
        return RegimeRecommendation(
            regime="unbounded",
            s_hat=shat,
            threshold=None,
            m_inversion=None,
            reason="no alphabet size declared; bounded bound inapplicable",
        )
    thr = heuristic_threshold(sample.n, M, alpha, simplified=False)
    m_inv = invert_threshold_m(shat, sample.n, alpha) if shat > 0 else 1.0
    if shat < thr * (1.0 - INDIFFERENCE_TAU):
        regime = "unbounded"
        reason = f"S_hat={shat:.4g} below threshold band [{thr * (1 - INDIFFERENCE_TAU):.4g}, {thr * (1 + INDIFFERENCE_TAU):.4g}]"
    elif shat > thr * (1.0 + INDIFFERENCE_TAU):
        regime = "bounded"
        reason = f"S_hat={shat:.4g} above threshold band [{thr * (1 - INDIFFERENCE_TAU):.4g}, {thr * (1 + INDIFFERENCE_TAU):.4g}]"
    else:
        regime = "indifferent"
        reason = f"S_hat={shat:.4g} inside threshold band [{thr * (1 - INDIFFERENCE_TAU):.4g}, {thr * (1 + INDIFFERENCE_TAU):.4g}]; bounds nearly coincide"
    return RegimeRecommendation(
        regime=regime, s_hat=shat, threshold=thr, m_inversion=m_inv, reason=reason
    )
