"""Ground-truth-free evaluation of classifier and regressor ensembles."""

__version__ = "0.1.0"

from .errors import (
    ComplexSolutionError,
    ConfigurationError,
    DegenerateCountsError,
    DegenerateError,
    GTIError,
    InfeasibleError,
    InputError,
    InsufficientDataError,
    ParseError,
    PreconditionError,
)
from .forward import expected_counts, independent_frequencies, label_frequencies, mirror
from .independence import detect_trio, four_trio_consistency, trios_of
from .regressors import RegressorPanel, mixed_moment_test, parse_predictions, solve_trio_regressors
from .tally import DecisionCounts, VoteMatrix, marginalize_truth, parse_votes, project_subset, tally_counts
from .trio import TrioEstimate, select_branch, solve_trio
from .truth_stats import EnsembleStats, stats_from_truth_counts, summarize_pairwise
