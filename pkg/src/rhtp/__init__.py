"""Regularized hard thresholding pursuit for sparse recovery."""
from .algorithms import (
    AlgoConfig,
    IterationRecord,
    IterationTrace,
    StopRule,
    htp_step,
    identification_argument,
    iht_step,
    rhtp_step,
    run,
)
from .errors import (
    ArgumentError,
    BudgetError,
    ConfigError,
    InapplicableError,
    InternalError,
    InvalidRegularizerError,
    PreconditionError,
    RHTPError,
    SingularityError,
)
from .regularizers import PsiMap, Regularizer, ValidityReport, validate
from .sensing import (
    ProblemInstance,
    RICEstimate,
    SparseIterate,
    as_support,
    estimate_ric,
    exact_ric_table,
    hard_threshold,
    nonincreasing_arrangement,
    projection_onto_span,
    restricted_least_squares,
    ric_estimate,
)
from .tolerances import DEFAULTS, Tolerances

__version__ = "0.1.0"
