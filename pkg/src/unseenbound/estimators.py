"""Sample-based summaries: total-mass estimate, incidence-based sample
coverage, and species accumulation curves."""

from __future__ import annotations

import math
from itertools import permutations
from typing import Optional

import numpy as np

from .model import IncidenceSample, SeededStream, sample_stats

__all__ = [
    "s_hat",
    "coverage_estimate",
    "accumulation_curve",
    "COVERAGE_FORMULA",
]

# Exact formula string, emitted by the diagnostics command for auditability.
COVERAGE_FORMULA = "1 - (Q1/U) * ((n-1)*Q1 / ((n-1)*Q1 + 2*Q2))"

EXHAUSTIVE_LIMIT = 8
DEFAULT_PERMUTATIONS = 50


def s_hat(sample: IncidenceSample) -> float:
    """Unbiased total-mass estimate U_total / n."""
    return sample_stats(sample).u_total / sample.n


def coverage_estimate(sample: IncidenceSample) -> Optional[float]:
    """Incidence-based sample coverage from singleton/doubleton counts.

    C_hat = 1 - (Q1/U) * ((n-1)*Q1 / ((n-1)*Q1 + 2*Q2)), clamped to [0, 1].
    Returns None when no presence has been recorded (U_total = 0); requires
    at least two sampling units.
    """
    if sample.n < 2:
        raise ValueError(f"coverage_estimate needs n >= 2, got n={sample.n}")
    stats = sample_stats(sample)
    return _coverage_from(stats.n, stats.u_total, stats.q1, stats.q2)


def _coverage_from(n: int, u_total: int, q1: int, q2: int) -> Optional[float]:
    if u_total < 1:
        return None
    if q1 == 0:
        return 1.0
    chat = 1.0 - (q1 / u_total) * ((n - 1) * q1 / ((n - 1) * q1 + 2.0 * q2))
    return min(1.0, max(0.0, chat))


def accumulation_curve(
    matrix: np.ndarray,
    n_perms: int = DEFAULT_PERMUTATIONS,
    rng: Optional[SeededStream] = None,
) -> np.ndarray:
    """Expected number of distinct species in the first k units, k = 1..n.

    Averages over random orderings of the units (``n_perms`` of them, drawn
    from ``rng``).  For n <= 8 the exact average over all n! orderings is
    returned instead; it equals the hypergeometric closed form
    E[distinct at k] = sum_j (1 - C(n - c_j, k)/C(n, k)) with c_j the column
    sums, so no enumeration is needed.
    """
    matrix = np.asarray(matrix)
    if matrix.ndim != 2:
        raise ValueError("incidence matrix must be 2-dimensional (units x species)")
    if n_perms < 1:
        raise ValueError(f"n_perms must be >= 1, got {n_perms}")
    n = matrix.shape[0]
    if n == 0:
        raise ValueError("incidence matrix must contain at least one unit")
    if n <= EXHAUSTIVE_LIMIT:
        return _exact_curve(matrix)
    if rng is None:
        raise ValueError("a SeededStream is required when sampling permutations")
    gen = rng.generator()
    present = matrix > 0
    total = np.zeros(n, dtype=np.float64)
    for _ in range(n_perms):
        order = gen.permutation(n)
        seen = np.cumsum(present[order], axis=0) > 0
        total += seen.sum(axis=1)
    return total / n_perms


def _exact_curve(matrix: np.ndarray) -> np.ndarray:
    """Exact permutation-averaged curve via the hypergeometric identity."""
    n = matrix.shape[0]
    colsums = (np.asarray(matrix) > 0).sum(axis=0)
    ks = np.arange(1, n + 1)
    curve = np.zeros(n, dtype=np.float64)
    for c in colsums:
        if c == 0:
            continue
        # P(species with c presences absent from a random k-subset of units)
        absent = np.array(
            [math.comb(n - int(c), k) / math.comb(n, k) if k <= n - c else 0.0 for k in ks]
        )
        curve += 1.0 - absent
    return curve


def brute_force_curve(matrix: np.ndarray) -> np.ndarray:
    """Average over all n! unit orderings by direct enumeration.

    Independent reference for :func:`accumulation_curve`; factorial cost, so
    only usable for very small matrices.
    """
    matrix = np.asarray(matrix) > 0
    n = matrix.shape[0]
    total = np.zeros(n, dtype=np.float64)
    count = 0
    for order in permutations(range(n)):
        seen = np.cumsum(matrix[list(order)], axis=0) > 0
        total += seen.sum(axis=1)
        count += 1
    return total / count
