"""Sequential stopping rules driven by the confidence bounds or by sample
coverage, with per-run metrics and a reproducible experiment driver.

Units are drawn one at a time; after each unit the rule's criterion is
evaluated on the cumulative observed sample (including contamination
singletons).  A bound-based rule stops once its reported value falls to the
prevalence threshold; the coverage rule stops once estimated coverage
exceeds its target.  No multiplicity correction is applied across the
repeated looks: the fixed-n bound is checked as-is at every n, matching the
protocol the rules are designed for.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .bounded import BoundedConfig, _bounded_raw
from .estimators import _coverage_from
from .model import PrevalenceModel, SeededStream, derive_stream, _require_unit_interval
from .unbounded import UnboundedConfig, _total_mass_ucb_from

__all__ = [
    "StoppingPolicy",
    "StoppingOutcome",
    "ResultRow",
    "run_stopping",
    "stopping_experiment",
]

_KINDS = ("mmax_bounded", "mmax_unbounded", "coverage")
_BLOCK = 128  # units drawn per batch; stream consumption is position-aligned


@dataclass(frozen=True)
class StoppingPolicy:
    """One stopping rule.  Exactly the fields for its kind are present:

    - "mmax_bounded"  : epsilon, alpha, n_max, bound_cfg (BoundedConfig)
    - "mmax_unbounded": epsilon, alpha, n_max, bound_cfg (UnboundedConfig)
    - "coverage"      : coverage_target, n_max
    """

    kind: str
    n_max: int
    epsilon: Optional[float] = None
    alpha: Optional[float] = None
    coverage_target: Optional[float] = None
    bound_cfg: Optional[object] = None

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown stopping rule kind {self.kind!r}")
        if self.n_max < 1:
            raise ValueError(f"n_max must be a positive integer, got {self.n_max}")
        if self.kind == "coverage":
            if self.coverage_target is None:
                raise ValueError("coverage rule requires coverage_target")
            _require_unit_interval("coverage_target", self.coverage_target)
            if self.epsilon is not None or self.alpha is not None or self.bound_cfg is not None:
                raise ValueError("coverage rule takes only coverage_target and n_max")
            return
        if self.epsilon is None or self.alpha is None:
            raise ValueError(f"{self.kind} rule requires epsilon and alpha")
        _require_unit_interval("epsilon", self.epsilon)
        _require_unit_interval("alpha", self.alpha)
        if self.coverage_target is not None:
            raise ValueError(f"{self.kind} rule does not take coverage_target")
        cfg = self.bound_cfg
        if self.kind == "mmax_bounded":
            if cfg is None:
                cfg = BoundedConfig.default(self.alpha)
                object.__setattr__(self, "bound_cfg", cfg)
            if not isinstance(cfg, BoundedConfig):
                raise ValueError("mmax_bounded requires a BoundedConfig")
        else:
            if cfg is None:
                cfg = UnboundedConfig(self.alpha)
                object.__setattr__(self, "bound_cfg", cfg)
            if not isinstance(cfg, UnboundedConfig):
                raise ValueError("mmax_unbounded requires an UnboundedConfig")


@dataclass(frozen=True)
class StoppingOutcome:
    """Result of one sequential run.

    ``missed_fraction`` is the share of truly relevant species (prevalence at
    or above the evaluation threshold) never observed before stopping;
    ``type1_indicator`` is True only for a premature stop (a run that hits
    n_max made no decision).  ``extra_species`` counts contamination
    singletons observed.
    """

    stopped: bool
    n_stop: int
    missed_fraction: float
    type1_indicator: bool
    extra_species: int

    def __post_init__(self) -> None:
        if not 0.0 <= self.missed_fraction <= 1.0:
            raise ValueError("missed_fraction must be in [0, 1]")


@dataclass(frozen=True)
class ResultRow:
    scenario: str
    policy: str
    q: float
    mean_nstop: float
    mean_missed: float
    type1: float
    mean_extra: float


def _bounded_criterion(n: int, counts: np.ndarray, E: int, M_true: int, cfg: BoundedConfig, eps: float) -> bool:
    b = math.log(n) if cfg.b_rule == "log_n" else float(cfg.b)
    if b >= n:
        return False
    # Declared alphabet: true size plus observed error species (each an
    # always-singleton extra category, so its m_b term is (1 - 1/n)^b).
    M_decl = M_true + E
    m_b = float(np.power(1.0 - counts / n, b).sum()) + E * (1.0 - 1.0 / n) ** b
    raw, _ = _bounded_raw(n, m_b, M_decl, cfg.alpha, cfg.delta, b)
    return min(raw, 1.0) <= eps


def _unbounded_criterion(n: int, u_total: int, cfg: UnboundedConfig, eps: float) -> bool:
    if n < 3:
        return False
    s_star = _total_mass_ucb_from(u_total / n, n, cfg.beta)
    level = cfg.alpha - cfg.beta
    r = math.log(s_star / level) + math.log(n) - math.log(math.log(n))
    if r <= 1.0:
        return False
    log_u = (
        math.log(s_star / level) / r
        + (r - 1.0) / r * (math.log(r - 1.0) - math.log(n + r - 1.0))
        + n / r * (math.log(n) - math.log(n + r - 1.0))
    )
    return min(math.exp(log_u), 1.0) <= eps


def run_stopping(
    model: PrevalenceModel,
    policy: StoppingPolicy,
    q: float,
    rng: SeededStream,
    relevance_eps: Optional[float] = None,
) -> StoppingOutcome:
    """Run one contaminated sequential sampling path under a stopping rule.

    Each unit is drawn from the Bernoulli product model and contaminated
    independently at rate ``q`` (a flipped presence becomes a fresh
    singleton error species); the rule is re-checked after every unit.
    ``relevance_eps`` sets the prevalence threshold for the missed/type-I
    metrics; it defaults to the policy's epsilon and must be given
    explicitly for coverage rules.
    """
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"q must be in [0, 1], got {q}")
    if relevance_eps is None:
        if policy.epsilon is None:
            raise ValueError("relevance_eps is required for coverage rules")
        relevance_eps = policy.epsilon
    _require_unit_interval("relevance_eps", relevance_eps)

    gen = rng.generator()
    probs = model.probs
    pq = probs * q
    counts = np.zeros(model.M, dtype=np.int64)
    E = 0  # distinct error species observed (all singletons by construction)
    u_total = 0
    n = 0
    stopped = False
    while n < policy.n_max and not stopped:
        nb = min(_BLOCK, policy.n_max - n)
        u = gen.random((nb, model.M))
        pres = u < probs
        err = u < pq  # subset of pres: flip the presence into an error species
        kept = pres & ~err
        pres_sum = pres.sum(axis=1)
        err_sum = err.sum(axis=1)
        for i in range(nb):
            n += 1
            counts += kept[i]
            E += int(err_sum[i])
            u_total += int(pres_sum[i])
            if policy.kind == "mmax_bounded":
                stopped = _bounded_criterion(n, counts, E, model.M, policy.bound_cfg, policy.epsilon)
            elif policy.kind == "mmax_unbounded":
                stopped = _unbounded_criterion(n, u_total, policy.bound_cfg, policy.epsilon)
            else:
                if n >= 2 and u_total >= 1:
                    q1 = int((counts == 1).sum()) + E
                    q2 = int((counts == 2).sum())
                    chat = _coverage_from(n, u_total, q1, q2)
                    stopped = chat is not None and chat > policy.coverage_target
            if stopped:
                break

    relevant = probs >= relevance_eps
    n_relevant = int(relevant.sum())
    if n_relevant == 0:
        missed = 0.0
    else:
        missed = int((relevant & (counts == 0)).sum()) / n_relevant
    return StoppingOutcome(
        stopped=stopped,
        n_stop=n,
        missed_fraction=missed,
        type1_indicator=bool(stopped and missed > 0.0),
        extra_species=E,
    )


def _cell_key(scenario: str, policy: str, q: float) -> str:
    return f"stopping|{scenario}|{policy}|{q:.10g}"


def _run_block(args) -> list[tuple[int, int, bool, float, bool, int]]:
    scenario, model, pol_name, policy, q, eps, seed, rep_lo, rep_hi = args
    out = []
    for rep in range(rep_lo, rep_hi):
        stream = derive_stream(seed, _cell_key(scenario, pol_name, q), rep)
        o = run_stopping(model, policy, q, stream, relevance_eps=eps)
        out.append((rep, o.n_stop, o.stopped, o.missed_fraction, o.type1_indicator, o.extra_species))
    return out


def stopping_experiment(
    scenarios: Sequence[tuple[str, PrevalenceModel]],
    policies: Sequence[tuple[str, StoppingPolicy]],
    q_values: Sequence[float],
    reps: int,
    n_max: int,
    master_seed: int,
    relevance_eps: float,
    workers: int = 1,
) -> list[ResultRow]:
    """Aggregate stopping metrics over a scenario x policy x q grid.

    One row per cell: mean stopping size, mean missed-relevant fraction,
    type-I frequency, and mean error-species count over ``reps`` replicates.
    Replicate r of a cell uses a stream derived from (scenario, policy, q, r),
    so rows are reproducible and independent of execution order, worker
    count, and of which other cells are present.
    """
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")
    cells = [
        (scen_name, model, pol_name, replace(policy, n_max=n_max), float(qv))
        for scen_name, model in scenarios
        for pol_name, policy in policies
        for qv in q_values
    ]
    block = max(1, math.ceil(reps / max(1, workers * 2)))
    tasks = []
    for scen_name, model, pol_name, policy, qv in cells:
        for lo in range(0, reps, block):
            tasks.append(
                (scen_name, model, pol_name, policy, qv, relevance_eps, master_seed, lo, min(lo + block, reps))
            )
    results: dict[tuple[str, str, float], list] = {
        (c[0], c[2], c[4]): [None] * reps for c in cells
    }
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_block, tasks))
    else:
        chunks = [_run_block(t) for t in tasks]
    for task, chunk in zip(tasks, chunks):
        key = (task[0], task[2], task[4])
        for rep, n_stop, stopped, missed, type1, extra in chunk:
            results[key][rep] = (n_stop, stopped, missed, type1, extra)

    rows = []
    for scen_name, _model, pol_name, _policy, qv in cells:
        recs = results[(scen_name, pol_name, qv)]
        rows.append(
            ResultRow(
                scenario=scen_name,
                policy=pol_name,
                q=qv,
                mean_nstop=math.fsum(r[0] for r in recs) / reps,
                mean_missed=math.fsum(r[2] for r in recs) / reps,
                type1=sum(1 for r in recs if r[3]) / reps,
                mean_extra=math.fsum(r[4] for r in recs) / reps,
            )
        )
    return rows
