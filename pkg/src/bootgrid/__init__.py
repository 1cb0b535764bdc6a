"""bootgrid: anisotropic bootstrap-percolation simulation and scaling laws.

Finite-lattice growth rules (standard, modified, (1,2), (1,b), Duarte and
3-d (a,b,c) neighbourhoods), exact and queue-based closures, Monte Carlo
fill-probability and threshold estimation, exact small-case enumeration
oracles, and the closed-form nucleation/critical-volume scaling laws with
their numeric inversion.
"""

from .asymptotics import (
    ScalingModel,
    StrategyRange,
    anisotropic_constant,
    critical_log_volume,
    epsilon_window,
    leading_pc,
    nucleation_closed_terms,
    nucleation_log_prob_closed,
    nucleation_log_prob_sum,
    strategy_range,
)
from .growth import (
    GrowthEventSpec,
    GrowthPolynomial,
    column_growth_polynomial,
    estimate_growth_mc,
    horizontal_step_probability,
    row_growth_polynomial,
)
from .inversion import (
    ExpansionTerms,
    bracketing_check,
    bracketing_epsilon,
    expansion_residual,
    invert_numeric,
    pc_expansion,
)
from .lattice import (
    Configuration,
    GridSpec,
    Rect,
    checkerboard_rect,
    empty_configuration,
    from_text,
    full_configuration,
    occupy_rect,
    random_configuration,
    to_text,
)
from .montecarlo import (
    Estimate,
    SweepRow,
    estimate_pc,
    fill_probability,
    fill_probability_exact,
    fill_success_counts,
    sweep,
)
from .rng import Stream, derive_seed
from .rules import (
    Rule,
    RuleFamily,
    closure,
    closure_batch,
    closure_fast,
    closure_naive,
    is_stable,
    make_rule,
    step,
)

__version__ = "0.1.0"

__all__ = [
    "Configuration",
    "Estimate",
    "ExpansionTerms",
    "GridSpec",
    "GrowthEventSpec",
    "GrowthPolynomial",
    "Rect",
    "Rule",
    "RuleFamily",
    "ScalingModel",
    "Stream",
    "StrategyRange",
    "SweepRow",
    "anisotropic_constant",
    "bracketing_check",
    "bracketing_epsilon",
    "checkerboard_rect",
    "closure",
    "closure_batch",
    "closure_fast",
    "closure_naive",
    "column_growth_polynomial",
    "critical_log_volume",
    "derive_seed",
    "empty_configuration",
    "epsilon_window",
    "estimate_growth_mc",
    "estimate_pc",
    "expansion_residual",
    "fill_probability",
    "fill_probability_exact",
    "fill_success_counts",
    "from_text",
    "full_configuration",
    "horizontal_step_probability",
    "invert_numeric",
    "is_stable",
    "leading_pc",
    "make_rule",
    "nucleation_closed_terms",
    "nucleation_log_prob_closed",
    "nucleation_log_prob_sum",
    "occupy_rect",
    "pc_expansion",
    "random_configuration",
    "row_growth_polynomial",
    "step",
    "strategy_range",
    "sweep",
    "to_text",
    "__version__",
]
