"""Prevalence generators, Bernoulli-product sampling, and the singleton-error
contamination process.

Counts are drawn per species with numpy's exact binomial sampler when only
counts are needed, and per cell when a unit-by-species matrix (or
contamination, which acts on individual presences) is required.  The two
routes produce identically distributed column sums at O(M) versus O(nM) cost.
"""

from __future__ import annotations

from typing import Tuple

import numpy as np

from .model import IncidenceSample, PrevalenceModel, SeededStream

__all__ = [
    "make_prevalences",
    "draw_sample",
    "draw_incidence_matrix",
    "contaminate",
]


def make_prevalences(kind: str, param: float, M: int) -> PrevalenceModel:
    """Build one of the benchmark prevalence vectors.

    kind="zipf"                p_j = (j+1)^(-gamma), gamma > 0
    kind="geometric"           p_j = a^j,            a in (0, 1)
    kind="homogeneous"         p_j = 1/c,            c >= 1
    kind="truncated-geometric" p_j = (1-a)^(j-1),    a in (0, 1)

    with j = 1..M in every case.
    """
    if M < 1:
        raise ValueError(f"M must be a positive integer, got {M}")
    j = np.arange(1, M + 1, dtype=np.float64)
    if kind == "zipf":
        if param <= 0:
            raise ValueError(f"gamma must be > 0 for zipf, got {param}")
        probs = (j + 1.0) ** (-param)
        params = {"gamma": float(param)}
    elif kind == "geometric":
        if not 0.0 < param < 1.0:
            raise ValueError(f"a must be in (0, 1) for geometric, got {param}")
        probs = param ** j
        params = {"a": float(param)}
    elif kind == "homogeneous":
        if param < 1.0:
            raise ValueError(f"c must be >= 1 for homogeneous, got {param}")
        probs = np.full(M, 1.0 / param)
        params = {"c": float(param)}
    elif kind == "truncated-geometric":
        if not 0.0 < param < 1.0:
            raise ValueError(f"a must be in (0, 1) for truncated-geometric, got {param}")
        probs = (1.0 - param) ** (j - 1.0)
        params = {"a": float(param)}
    else:
        raise ValueError(f"unknown prevalence kind {kind!r}")
    return PrevalenceModel(kind=kind, params=params, M=M, probs=probs)


def draw_sample(model: PrevalenceModel, n: int, rng: SeededStream) -> IncidenceSample:
    """Draw per-species counts N_j ~ Binomial(n, p_j), independent across species.

    Only species with a positive count are materialized; the declared
    alphabet size is the model's M.
    """
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    gen = rng.generator()
    counts = gen.binomial(n, model.probs)
    nz = np.nonzero(counts)[0]
    observed = {f"s{j + 1}": int(counts[j]) for j in nz}
    return IncidenceSample(n=n, counts=observed, declared_M=model.M)


def draw_counts(model: PrevalenceModel, n: int, rng: SeededStream) -> np.ndarray:
    """Array variant of :func:`draw_sample`: the full length-M count vector."""
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    return rng.generator().binomial(n, model.probs)


def draw_incidence_matrix(model: PrevalenceModel, n: int, rng: SeededStream) -> np.ndarray:
    """Dense n-by-M 0/1 matrix with independent Bernoulli(p_j) entries."""
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    gen = rng.generator()
    u = gen.random((n, model.M))
    return (u < model.probs).astype(np.uint8)


def contaminate(matrix: np.ndarray, q: float, rng: SeededStream) -> Tuple[np.ndarray, int]:
    """Apply the singleton-error process to an incidence matrix.

    Independently for each 1-entry, with probability ``q`` the entry is
    zeroed and a new single-presence error column is appended at its row.
    The total number of 1s is conserved; appended columns are ordered by the
    row-major position of the flipped entries.  Returns the widened matrix
    and the number of error columns appended.
    """
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must be in [0, 1], got {q}")
    matrix = np.asarray(matrix)
    if matrix.ndim != 2:
        raise ValueError("incidence matrix must be 2-dimensional (units x species)")
    if q == 0.0:
        return matrix.copy(), 0
    gen = rng.generator()
    flips = (gen.random(matrix.shape) < q) & (matrix == 1)
    kept = np.where(flips, 0, matrix).astype(matrix.dtype)
    rows, _ = np.nonzero(flips)
    n_errors = rows.size
    if n_errors == 0:
        return kept, 0
    error_cols = np.zeros((matrix.shape[0], n_errors), dtype=matrix.dtype)
    error_cols[rows, np.arange(n_errors)] = 1
    return np.hstack([kept, error_cols]), int(n_errors)
