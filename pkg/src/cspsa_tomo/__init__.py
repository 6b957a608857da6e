"""Adaptive pure-state tomography via complex-domain SPSA with
accumulated-likelihood refinement.

The estimation loop perturbs a candidate state, measures in bases built
around the perturbed candidates, follows a stochastic gradient of the
infidelity, and optionally refines the iterate against the likelihood
of every count collected so far.  The mean infidelity of the refined
estimates approaches the theoretical floor (d - 1) / N in the number of
copies consumed.
"""

from ._backend import active_backend, set_backend
from .bounds import (
    SummaryStats,
    gill_massar_mixed,
    gill_massar_pure,
    summarize,
    total_ensemble,
)
from .cspsa import (
    B_BY_DECADE,
    GainParams,
    gains_at,
    gradient_estimate,
    perturbed_guesses,
    sample_perturbation,
    update,
)
from .errors import (
    ConfigInvalid,
    DegenerateIterate,
    DimensionMismatch,
    EmptyData,
    EmptyInput,
    InvalidDistribution,
    IoFailure,
    TomographyError,
    ZeroVector,
)
from .harness import (
    MODE_CSPSA_MLE,
    MODE_CSPSA_ONLY,
    AggregateReport,
    ExperimentConfig,
    TrialTrace,
    run_experiment,
    run_trial,
    write_report,
)
from .measurement import (
    CountRecord,
    MeasurementBasis,
    complete_basis,
    estimate_infidelity,
    outcome_probabilities,
    simulate_counts,
)
from .mle import (
    AccumulatedData,
    MleConfig,
    likelihood_gradient,
    log_likelihood,
    refine,
)
from .states import PureState, fidelity, haar_random_state, infidelity, normalize

__version__ = "0.1.0"

__all__ = [
    "AccumulatedData",
    "AggregateReport",
    "B_BY_DECADE",
    "ConfigInvalid",
    "CountRecord",
    "DegenerateIterate",
    "DimensionMismatch",
    "EmptyData",
    "EmptyInput",
    "ExperimentConfig",
    "GainParams",
    "InvalidDistribution",
    "IoFailure",
    "MODE_CSPSA_MLE",
    "MODE_CSPSA_ONLY",
    "MeasurementBasis",
    "MleConfig",
    "PureState",
    "SummaryStats",
    "TomographyError",
    "TrialTrace",
    "ZeroVector",
    "active_backend",
    "complete_basis",
    "estimate_infidelity",
    "fidelity",
    "gains_at",
    "gill_massar_mixed",
    "gill_massar_pure",
    "gradient_estimate",
    "haar_random_state",
    "infidelity",
    "likelihood_gradient",
    "log_likelihood",
    "normalize",
    "outcome_probabilities",
    "perturbed_guesses",
    "refine",
    "run_experiment",
    "run_trial",
    "sample_perturbation",
    "set_backend",
    "simulate_counts",
    "summarize",
    "total_ensemble",
    "update",
    "write_report",
]
