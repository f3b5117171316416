"""Numerical counterparts of the convergence theory: constants and property checkers."""
from .bounds import IterateBounds, global_E, iterate_bounds_check
from .conjugacy import ConjugateTrace, conjugate_trace, grad_w, z_step
from .constants import (
    AnalysisConstants,
    compute_constants,
    descent_condition,
    required_orders,
    step_window,
)
from .contraction import ContractionReport, contraction_check
from .descent import DescentReport, descent_monitor, objective
from .iterations import (
    first_index_with_support,
    predict_iterations,
    signal_dependent_bound,
    support_growth_condition,
    universal_bound,
    universal_constant,
)
from .inequalities import (
    DInequalityResult,
    InequalityCheck,
    d_inequality_check,
    d_map,
    inner_product_bound_check,
    projection_bound_check,
    wielandt_check,
    wielandt_extremal_pair,
)
from .report import analysis_report, write_report

__all__ = [name for name in dir() if not name.startswith("_")]
