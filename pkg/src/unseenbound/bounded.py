"""Upper confidence bounds for the maximum unseen prevalence when the
alphabet size M is finite and known (or safely over-stated).

All bounds hold simultaneously over every unobserved species: with the
stated probability, every species with zero observed count has prevalence
at most the returned value.  Natural logarithms throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .model import BoundEstimate, IncidenceSample, _require_unit_interval, sample_stats

__all__ = [
    "BoundedConfig",
    "bonferroni_bound",
    "worst_case_bound",
    "homogeneous_bound",
    "m_b_statistic",
    "bounded_dd_bound",
    "least_favourable_threshold",
]


@dataclass(frozen=True)
class BoundedConfig:
    """Confidence split and smoothing-exponent rule for the data-dependent bound.

    ``b_rule`` is either "log_n" (b = log n at call time) or "explicit"
    with a fixed ``b`` that must stay below n.  The bound holds at level
    1 - alpha - delta.
    """

    alpha: float
    delta: float
    b_rule: str = "log_n"
    b: Optional[float] = None

    def __post_init__(self) -> None:
        _require_unit_interval("alpha", self.alpha)
        _require_unit_interval("delta", self.delta)
        if self.alpha + self.delta >= 1.0:
            raise ValueError(
                f"alpha + delta must be < 1, got {self.alpha} + {self.delta}"
            )
        if self.b_rule not in ("log_n", "explicit"):
            raise ValueError(f"unknown b_rule {self.b_rule!r}")
        if self.b_rule == "explicit":
            if self.b is None or self.b < 1.0:
                raise ValueError(f"explicit b must be >= 1, got {self.b}")
        elif self.b is not None:
            raise ValueError("b is only allowed with b_rule='explicit'")

    @classmethod
    def default(cls, alpha: float = 0.05) -> "BoundedConfig":
        """b = log n and delta = alpha/100, the reference configuration."""
        return cls(alpha=alpha, delta=0.01 * alpha)

    def b_for(self, n: int) -> float:
        b = math.log(n) if self.b_rule == "log_n" else float(self.b)
        if b >= n:
            raise ValueError(f"smoothing exponent b={b} must be < n={n}")
        return b


def bonferroni_bound(n: int, M: int, alpha: float) -> float:
    """Multiplicity-corrected rule-of-three bound log(M/alpha)/n.

    Data independent; valid at level 1 - alpha for any prevalence vector on
    an alphabet of size M.
    """
    _check_n_m(n, M)
    _require_unit_interval("alpha", alpha)
    return math.log(M / alpha) / n


def worst_case_bound(n: int, M: int, alpha: float) -> float:
    """Sharpened data-independent bound via an r-norm relaxation.

    With r = log(M/alpha), returns (M/alpha)^(1/r) * r/(r+n) * exp(-n/(n+r)),
    which matches log(M/alpha)/n to O(1/n^2).  Intended regime: log M small
    relative to n (not enforced).
    """
    _check_n_m(n, M)
    _require_unit_interval("alpha", alpha)
    r = math.log(M / alpha)
    # (M/alpha)^(1/r) == e identically for this r; keep the general form.
    return (M / alpha) ** (1.0 / r) * r / (r + n) * math.exp(-n / (n + r))


def homogeneous_bound(n: int, M: int, alpha: float, r: float) -> float:
    """r-norm bound when all prevalences sit at the least-favourable constant.

    Returns (M/alpha)^(1/r) * r/(n+r) * (n/(n+r))^(n/r); minimized near
    r = log(M/alpha) and never above :func:`worst_case_bound` there.
    """
    _check_n_m(n, M)
    _require_unit_interval("alpha", alpha)
    if r < 1.0:
        raise ValueError(f"r must be >= 1, got {r}")
    return (M / alpha) ** (1.0 / r) * r / (n + r) * (n / (n + r)) ** (n / r)


def m_b_statistic(sample: IncidenceSample, M: int, b: float) -> float:
    """Effective alphabet size: sum over all M categories of (1 - N_j/n)^b.

    The M - distinct never-observed categories each contribute 1, so the
    statistic always lies in [0, M] and shrinks as counts grow.
    """
    if b < 1.0:
        raise ValueError(f"b must be >= 1, got {b}")
    stats = sample_stats(sample)
    if M < stats.distinct:
        raise ValueError(
            f"M={M} is smaller than the {stats.distinct} distinct species observed"
        )
    nz = np.array([c for c in sample.counts.values() if c > 0], dtype=np.float64)
    return _m_b_from_counts(nz, sample.n, M, b)


def _m_b_from_counts(nonzero_counts: np.ndarray, n: int, M: int, b: float) -> float:
    """Array core shared with the sequential engine."""
    observed = float(np.power(1.0 - nonzero_counts / n, b).sum()) if nonzero_counts.size else 0.0
    return (M - nonzero_counts.size) + observed


def _bounded_raw(n: int, m_b: float, M: int, alpha: float, delta: float, b: float) -> tuple[float, float]:
    """Raw data-dependent bound and its concentration correction term."""
    eps_corr = b * math.sqrt((M / n) * math.log(1.0 / delta))
    raw = math.log(m_b / alpha + eps_corr / alpha) / (n - b)
    return raw, eps_corr


def bounded_dd_bound(sample: IncidenceSample, M: int, cfg: BoundedConfig) -> BoundEstimate:
    """Data-dependent bound log(m_b/alpha + eps/alpha)/(n - b) at level 1-alpha-delta.

    ``m_b`` is :func:`m_b_statistic` at b = cfg.b_for(n) and
    eps = b * sqrt((M/n) * log(1/delta)) corrects for estimating m_b from
    the empirical frequencies (bounded-differences concentration).
    """
    n = sample.n
    b = cfg.b_for(n)
    m_b = m_b_statistic(sample, M, b)
    raw, eps_corr = _bounded_raw(n, m_b, M, cfg.alpha, cfg.delta, b)
    return BoundEstimate(
        method="bounded_dd",
        alpha=cfg.alpha,
        delta=cfg.delta,
        raw_value=raw,
        diagnostics={"m_b": m_b, "eps_corr": eps_corr, "b": b, "M": M},
    )


def least_favourable_threshold(n: int, k0: int, alpha: float, as_printed: bool = False) -> float:
    """Exact threshold for the two-point least-favourable configuration.

    Returns the unique t with (1 - (1-t)^n)^k0 = 1 - alpha, i.e.
    t = 1 - (1 - (1-alpha)^(1/k0))^(1/n).  For k0 = 1 this is the classical
    zero-success binomial bound 1 - alpha^(1/n), and t ~ log(k0/alpha)/n for
    small alpha.

    ``as_printed=True`` instead evaluates the variant
    t = 1 - (1 - alpha^(1/k0))^(1/n), kept only for side-by-side comparison;
    it does not satisfy the coverage identity above for k0 > 1.
    """
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    if k0 < 1:
        raise ValueError(f"k0 must be a positive integer, got {k0}")
    _require_unit_interval("alpha", alpha)
    if as_printed:
        inner = alpha ** (1.0 / k0)
        return -math.expm1(math.log1p(-inner) / n)
    # inner = 1 - (1-alpha)^(1/k0), computed without cancellation
    inner = -math.expm1(math.log1p(-alpha) / k0)
    return -math.expm1(math.log(inner) / n)


def _check_n_m(n: int, M: int) -> None:
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    if M < 1:
        raise ValueError(f"M must be a positive integer, got {M}")
