"""Core domain types shared by every module.

The data model is deliberately small: a prevalence vector with its generator
recipe, a per-species incidence count table, a confidence-bound result
carrier, and a reproducible random-stream handle.  All types are immutable
after construction and safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

__all__ = [
    "PrevalenceModel",
    "IncidenceSample",
    "BoundEstimate",
    "SeededStream",
    "SampleStats",
    "sample_stats",
    "sample_from_matrix",
    "derive_stream",
    "splitmix64",
    "fnv1a64",
]

_MASK64 = 0xFFFFFFFFFFFFFFFF

# splitmix64 increment and multipliers (Steele, Lea, Flood 2014); fnv-1a
# offset basis and prime.  These constants define the documented seed mix:
# adding grid points to a sweep never perturbs the streams of existing rows.
_SPLITMIX_GAMMA = 0x9E3779B97F4A7C15
_SPLITMIX_M1 = 0xBF58476D1CE4E5B9
_SPLITMIX_M2 = 0x94D049BB133111EB
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def splitmix64(x: int) -> int:
    """One splitmix64 step: a 64-bit finalizing mix of ``x``."""
    x = (x + _SPLITMIX_GAMMA) & _MASK64
    x = ((x ^ (x >> 30)) * _SPLITMIX_M1) & _MASK64
    x = ((x ^ (x >> 27)) * _SPLITMIX_M2) & _MASK64
    return (x ^ (x >> 31)) & _MASK64


def fnv1a64(key: str) -> int:
    """FNV-1a hash of a UTF-8 string, reduced to 64 bits."""
    h = _FNV_OFFSET
    for byte in key.encode("utf-8"):
        h = ((h ^ byte) * _FNV_PRIME) & _MASK64
    return h


@dataclass(frozen=True)
class SeededStream:
    """Handle for one reproducible random stream.

    Two streams with equal ``(master_seed, stream_index)`` produce identical
    draw sequences; streams with distinct ``stream_index`` are statistically
    independent (PCG64 seeded through ``SeedSequence`` spawn keys).  A stream
    is owned by exactly one worker at a time: call :meth:`generator` once and
    draw from the returned generator.
    """

    master_seed: int
    stream_index: int = 0

    def __post_init__(self) -> None:
        if self.stream_index < 0:
            raise ValueError(f"stream_index must be nonnegative, got {self.stream_index}")

    def generator(self) -> np.random.Generator:
        """Fresh generator for this stream; identical draws on every call."""
        ss = np.random.SeedSequence(
            entropy=self.master_seed & _MASK64, spawn_key=(self.stream_index,)
        )
        return np.random.Generator(np.random.PCG64(ss))

    def child(self, index: int) -> "SeededStream":
        """Derived independent stream, e.g. one per permutation or replicate."""
        mixed = splitmix64(self.stream_index ^ splitmix64(index & _MASK64))
        return SeededStream(self.master_seed, mixed)


def derive_stream(master_seed: int, key: str, rep: int) -> SeededStream:
    """Per-replicate stream for grid point ``key`` and replicate ``rep``.

    The stream index is ``splitmix64(fnv1a64(key) ^ splitmix64(rep))``, so
    every (key, rep) pair maps to a fixed stream regardless of execution
    order or of which other grid points are present in the sweep.
    """
    return SeededStream(master_seed, splitmix64(fnv1a64(key) ^ splitmix64(rep)))


@dataclass(frozen=True)
class PrevalenceModel:
    """A finite vector of per-species incidence probabilities.

    ``kind`` and ``params`` record the generator recipe; ``probs`` holds the
    realized vector.  ``s_true`` caches the total mass sum(probs).
    """

    kind: str
    params: Mapping[str, float]
    M: int
    probs: np.ndarray
    s_true: float = field(init=False)

    _KINDS = ("zipf", "geometric", "homogeneous", "truncated-geometric", "explicit")

    def __post_init__(self) -> None:
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown prevalence kind {self.kind!r}")
        probs = np.asarray(self.probs, dtype=np.float64)
        if probs.ndim != 1 or probs.shape[0] != self.M:
            raise ValueError(f"probs must be a length-{self.M} vector")
        if self.M < 1:
            raise ValueError(f"M must be a positive integer, got {self.M}")
        if np.any((probs < 0.0) | (probs > 1.0)):
            raise ValueError("every prevalence must lie in [0, 1]")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "s_true", float(probs.sum()))

    def species_ids(self) -> list[str]:
        """Opaque simulated identifiers ``s1 .. sM``."""
        return [f"s{j}" for j in range(1, self.M + 1)]


@dataclass(frozen=True)
class IncidenceSample:
    """Per-species counts out of ``n`` sampling units.

    ``counts`` maps species id to the number of units in which the species
    was present.  Species never observed are not materialized; when the
    alphabet size is known it is carried in ``declared_M``.
    """

    n: int
    counts: Mapping[str, int]
    declared_M: Optional[int] = None

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")
        for sid, c in self.counts.items():
            if not (0 <= c <= self.n):
                raise ValueError(f"count for species {sid!r} must be in [0, n], got {c}")
        if self.declared_M is not None:
            if self.declared_M < 1:
                raise ValueError(f"declared_M must be positive, got {self.declared_M}")
            distinct = sum(1 for c in self.counts.values() if c > 0)
            if distinct > self.declared_M:
                raise ValueError(
                    f"declared_M={self.declared_M} is smaller than the "
                    f"{distinct} distinct species observed"
                )
        object.__setattr__(self, "counts", dict(self.counts))


@dataclass(frozen=True)
class SampleStats:
    n: int
    u_total: int
    distinct: int
    k_unseen: Optional[int]
    q1: int
    q2: int
    p_hat: Mapping[str, float]


def sample_stats(sample: IncidenceSample) -> SampleStats:
    """Summary statistics of an incidence sample.

    ``u_total`` is the total presence count, ``q1``/``q2`` the number of
    species seen in exactly one/two units, and ``k_unseen`` the number of
    never-observed species relative to ``declared_M`` (absent when the
    alphabet size is unknown).
    """
    u_total = 0
    distinct = 0
    q1 = 0
    q2 = 0
    p_hat: dict[str, float] = {}
    for sid, c in sample.counts.items():
        u_total += c
        if c > 0:
            distinct += 1
        if c == 1:
            q1 += 1
        elif c == 2:
            q2 += 1
        p_hat[sid] = c / sample.n
    k_unseen = None if sample.declared_M is None else sample.declared_M - distinct
    return SampleStats(sample.n, u_total, distinct, k_unseen, q1, q2, p_hat)


def sample_from_matrix(
    matrix: np.ndarray,
    species_ids: Optional[list[str]] = None,
    declared_M: Optional[int] = None,
) -> IncidenceSample:
    """Build an :class:`IncidenceSample` from a dense 0/1 unit-by-species matrix."""
    matrix = np.asarray(matrix)
    if matrix.ndim != 2:
        raise ValueError("incidence matrix must be 2-dimensional (units x species)")
    n, m = matrix.shape
    if species_ids is None:
        species_ids = [f"s{j}" for j in range(1, m + 1)]
    if len(species_ids) != m:
        raise ValueError(f"expected {m} species ids, got {len(species_ids)}")
    if len(set(species_ids)) != m:
        raise ValueError("species ids must be unique")
    colsums = matrix.sum(axis=0)
    counts = {sid: int(c) for sid, c in zip(species_ids, colsums)}
    return IncidenceSample(n=n, counts=counts, declared_M=declared_M)


_METHODS = ("bonferroni", "worst_case", "bounded_dd", "unbounded_rnorm", "least_favourable_oracle")


@dataclass(frozen=True)
class BoundEstimate:
    """Result of one upper-confidence-bound computation.

    ``raw_value`` is the bound as computed; ``reported_value`` is clamped to
    [0, 1] (a probability bound above 1 is vacuous but valid).  ``delta`` is
    present exactly for the data-dependent bounded-alphabet method and
    ``beta`` exactly for the unbounded-alphabet method.
    """

    method: str
    alpha: float
    raw_value: float
    delta: Optional[float] = None
    beta: Optional[float] = None
    diagnostics: Mapping[str, object] = field(default_factory=dict)
    reported_value: float = field(init=False)

    def __post_init__(self) -> None:
        if self.method not in _METHODS:
            raise ValueError(f"unknown bound method {self.method!r}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.raw_value < 0.0:
            raise ValueError(f"raw_value must be nonnegative, got {self.raw_value}")
        if (self.delta is not None) != (self.method == "bounded_dd"):
            raise ValueError("delta is present exactly for method 'bounded_dd'")
        if (self.beta is not None) != (self.method == "unbounded_rnorm"):
            raise ValueError("beta is present exactly for method 'unbounded_rnorm'")
        if self.delta is not None and not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must be in (0, 1), got {self.delta}")
        if self.beta is not None and not 0.0 < self.beta < 1.0:
            raise ValueError(f"beta must be in (0, 1), got {self.beta}")
        object.__setattr__(self, "diagnostics", dict(self.diagnostics))
        object.__setattr__(self, "reported_value", min(self.raw_value, 1.0))


def _require_unit_interval(name: str, value: float) -> None:
    if not (0.0 < value < 1.0) or math.isnan(value):
        raise ValueError(f"{name} must be in (0, 1), got {value}")
