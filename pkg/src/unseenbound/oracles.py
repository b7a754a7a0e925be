"""Exact least-favourable constructions used to validate the bounds.

These are validation oracles, not estimators: configurations under which the
distribution of the maximum unseen prevalence is computable in closed form,
so the tightness of the confidence bounds can be certified without Monte
Carlo, plus the minimal-threshold functional for the unbounded regime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import PrevalenceModel, _require_unit_interval

__all__ = [
    "LeastFavourableFinite",
    "least_favourable_coverage",
    "mmax_exact",
    "phi_eps",
    "epsilon_star",
]


@dataclass(frozen=True)
class LeastFavourableFinite:
    """k0 species at prevalence q, the remaining M - k0 at prevalence 1.

    Under this configuration the maximum unseen prevalence takes only the
    values 0 and q, which makes the coverage of any threshold rule exact.
    """

    n: int
    M: int
    k0: int
    q: float

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")
        if not 1 <= self.k0 <= self.M:
            raise ValueError(f"k0 must satisfy 1 <= k0 <= M, got k0={self.k0}, M={self.M}")
        _require_unit_interval("q", self.q)

    def to_model(self) -> PrevalenceModel:
        probs = np.full(self.M, 1.0)
        probs[: self.k0] = self.q
        return PrevalenceModel(
            kind="explicit",
            params={"q": self.q, "k0": float(self.k0)},
            M=self.M,
            probs=probs,
        )


def least_favourable_coverage(model: LeastFavourableFinite, t: float) -> float:
    """Exact coverage of the rule "report t when any of the k0 is unseen".

    Equals 1 when q <= t (the rule always covers) and
    (1 - (1-q)^n)^k0 when q > t (covers exactly when all k0 appear).
    """
    if not 0.0 <= t < 1.0:
        raise ValueError(f"t must be in [0, 1), got {t}")
    if model.q <= t:
        return 1.0
    return math.exp(model.k0 * math.log(-math.expm1(model.n * math.log1p(-model.q))))


def mmax_exact(model: PrevalenceModel, counts: np.ndarray) -> float:
    """Maximum prevalence among species with zero count; 0 if all were seen.

    The empty-set convention matches the stopping-event algebra: when every
    species has been observed, nothing is unseen and the target is 0.
    """
    counts = np.asarray(counts)
    if counts.shape != (model.M,):
        raise ValueError(
            f"counts must align with the model's {model.M} species, got shape {counts.shape}"
        )
    unseen = counts == 0
    if not unseen.any():
        return 0.0
    return float(model.probs[unseen].max())


def phi_eps(n: int, S: float, eps: float) -> float:
    """Probability that all floor(S/eps) species at prevalence eps are seen.

    Phi(eps) = (1 - (1-eps)^n)^K with K = floor(S/eps); equals 1 when the
    construction is empty (eps > S).
    """
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    if S <= 0.0:
        raise ValueError(f"S must be positive, got {S}")
    _require_unit_interval("eps", eps)
    K = math.floor(S / eps)
    if K == 0:
        return 1.0
    return math.exp(K * math.log(-math.expm1(n * math.log1p(-eps))))


_GRID_POINTS = 10_000
_GRID_LO = 1e-8


def epsilon_star(n: int, S: float, alpha: float) -> float:
    """Smallest eps with phi_eps(n, S, eps) >= 1 - alpha.

    This is the shortest threshold any valid procedure can report under the
    equal-prevalence family, hence a lower-bound oracle for the unbounded
    regime.  A geometric grid first brackets the crossing (phi has upward
    jumps where floor(S/eps) drops), then bisection refines the bracket
    below 1e-10 absolute width.
    """
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    if S <= 0.0:
        raise ValueError(f"S must be positive, got {S}")
    _require_unit_interval("alpha", alpha)
    target = 1.0 - alpha
    grid = np.geomspace(_GRID_LO, 1.0 - 1e-12, _GRID_POINTS)
    lo = None
    hi = None
    for g in grid:
        if phi_eps(n, S, float(g)) >= target:
            hi = float(g)
            break
        lo = float(g)
    if hi is None:
        raise ValueError(f"no threshold below 1 reaches coverage {target}")
    if lo is None:
        return hi
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if phi_eps(n, S, mid) >= target:
            hi = mid
        else:
            lo = mid
    return hi
