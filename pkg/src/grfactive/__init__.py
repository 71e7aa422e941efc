"""Batch active learning and active surveying on graph Gaussian random fields.

Greedy budgeted query selection that minimizes the posterior variance
(trace or grand sum) of a Gaussian random field whose precision is a graph
Laplacian, with fast rank-one covariance updates, a spectral first-query
solver for singular Laplacians, baseline selectors, an experiment harness,
and randomized checks of the underlying submodularity theory.
"""

from .baselines import BaselineKind, mig_select, random_select
from .errors import GraphFormatError, InputError, NumericalError
from .graphs import (
    ConditionReport,
    Laplacian,
    WeightedGraph,
    build_laplacian,
    largest_connected_component,
    load_edge_list,
    load_node_names,
    validate_conditions,
)
from .grf import (
    GrfModel,
    GrfPosterior,
    LabeledSet,
    TestSet,
    condition,
    conditional_correlation,
    marginalize,
)
from .harness import (
    ExperimentConfig,
    LabelOracle,
    ResultTable,
    emit_results,
    run_experiment,
    score_classification,
    score_survey,
)
from .kernels import BACKEND
from .selection import (
    Budget,
    Criterion,
    MarginalGains,
    SelectionState,
    SelectionTrace,
    argmin_first_query,
    evaluate_risk,
    fast_marginal_gains,
    first_query_survey_singular,
    greedy_select,
    rank_one_downdate,
)
from .verify import (
    PropertyReport,
    check_aofs,
    check_greedy_ratio,
    check_inverse_nonnegative,
    check_monotone_submodular,
    replay_witness,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BaselineKind",
    "Budget",
    "ConditionReport",
    "Criterion",
    "ExperimentConfig",
    "GraphFormatError",
    "GrfModel",
    "GrfPosterior",
    "InputError",
    "LabelOracle",
    "LabeledSet",
    "Laplacian",
    "MarginalGains",
    "NumericalError",
    "PropertyReport",
    "ResultTable",
    "SelectionState",
    "SelectionTrace",
    "TestSet",
    "WeightedGraph",
    "argmin_first_query",
    "build_laplacian",
    "check_aofs",
    "check_greedy_ratio",
    "check_inverse_nonnegative",
    "check_monotone_submodular",
    "condition",
    "conditional_correlation",
    "emit_results",
    "evaluate_risk",
    "fast_marginal_gains",
    "first_query_survey_singular",
    "greedy_select",
    "largest_connected_component",
    "load_edge_list",
    "load_node_names",
    "marginalize",
    "mig_select",
    "rank_one_downdate",
    "random_select",
    "replay_witness",
    "run_experiment",
    "score_classification",
    "score_survey",
    "validate_conditions",
]
