"""unseenbound: finite-sample upper confidence bounds for the prevalences of
never-observed categories in presence/absence (incidence) data, with regime
selection, sequential stopping rules, and a reproducible simulation harness.
"""

from .bounded import (
    BoundedConfig,
    bonferroni_bound,
    bounded_dd_bound,
    homogeneous_bound,
    m_b_statistic,
    least_favourable_threshold,
    worst_case_bound,
)
from .estimators import accumulation_curve, coverage_estimate, s_hat
from .model import (
    BoundEstimate,
    IncidenceSample,
    PrevalenceModel,
    SampleStats,
    SeededStream,
    derive_stream,
    sample_from_matrix,
    sample_stats,
)
from .oracles import (
    LeastFavourableFinite,
    epsilon_star,
    mmax_exact,
    phi_eps,
    least_favourable_coverage,
)
from .sampler import contaminate, draw_counts, draw_incidence_matrix, draw_sample, make_prevalences
from .selector import heuristic_threshold, invert_threshold_m, lambert_w0, recommend_regime
from .stopping import ResultRow, StoppingOutcome, StoppingPolicy, run_stopping, stopping_experiment
from .unbounded import (
    UnboundedConfig,
    condition_check,
    oracle_r_star,
    total_mass_lcb,
    total_mass_ucb,
    u_r,
    unbounded_bound,
    worstcase_impossibility_demo,
)

__version__ = "0.1.0"

__all__ = [
    "BoundEstimate",
    "BoundedConfig",
    "IncidenceSample",
    "LeastFavourableFinite",
    "PrevalenceModel",
    "ResultRow",
    "SampleStats",
    "SeededStream",
    "StoppingOutcome",
    "StoppingPolicy",
    "UnboundedConfig",
    "accumulation_curve",
    "bonferroni_bound",
    "bounded_dd_bound",
    "condition_check",
    "contaminate",
    "coverage_estimate",
    "derive_stream",
    "draw_counts",
    "draw_incidence_matrix",
    "draw_sample",
    "epsilon_star",
    "heuristic_threshold",
    "homogeneous_bound",
    "invert_threshold_m",
    "lambert_w0",
    "m_b_statistic",
    "make_prevalences",
    "mmax_exact",
    "oracle_r_star",
    "phi_eps",
    "least_favourable_coverage",
    "least_favourable_threshold",
    "recommend_regime",
    "run_stopping",
    "s_hat",
    "sample_from_matrix",
    "sample_stats",
    "stopping_experiment",
    "total_mass_lcb",
    "total_mass_ucb",
    "u_r",
    "unbounded_bound",
    "worst_case_bound",
    "worstcase_impossibility_demo",
]
