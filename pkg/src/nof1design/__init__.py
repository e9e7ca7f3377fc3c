"""Design engine for series of n-of-1 trials.

Computes design-stage standard errors and power for population-average and
individual-specific treatment-effect estimates under general linear mixed
models, and searches for minimal balanced designs meeting power and precision
requirements.
"""

from .designs import BalancedDesign
from .engine import (
    Band,
    DesignEvaluation,
    PowerRequirement,
    evaluate_design,
    power,
    se_naive,
    se_population,
    var_shrunken,
)
from .errors import (
    EstimabilityError,
    Nof1DesignError,
    ParameterError,
    SequenceFileError,
    UnsupportedModelError,
)
from .model import (
    ALL_FORMS,
    FIXED_COMMON,
    FIXED_RANDOM,
    RANDOM_COMMON,
    RANDOM_RANDOM,
    ModelForm,
    ParticipantMatrices,
    RandomEffectsSpec,
    ResidualSpec,
    Sequence,
    assemble_participant,
    build_residual_covariance,
)
from .search import (
    AXIS_MEASUREMENTS,
    AXIS_PARTICIPANTS,
    CurvePoint,
    DesignRecord,
    SearchConstraint,
    SweepResult,
    enumerate_designs_fixed_product,
    enumerate_feasible_designs,
    individual_se_curve,
    optimize_total_measurements_curve,
    parameter_sweep,
    solve_min_measurements,
    solve_min_participants,
)
from .sequences import (
    RandomizationScheme,
    count_sequences,
    enumerate_sequences,
    parse_sequence_file,
)

__version__ = "0.1.0"

__all__ = [
    "ALL_FORMS",
    "AXIS_MEASUREMENTS",
    "AXIS_PARTICIPANTS",
    "BalancedDesign",
    "Band",
    "CurvePoint",
    "DesignEvaluation",
    "DesignRecord",
    "EstimabilityError",
    "FIXED_COMMON",
    "FIXED_RANDOM",
    "ModelForm",
    "Nof1DesignError",
    "ParameterError",
    "ParticipantMatrices",
    "PowerRequirement",
    "RANDOM_COMMON",
    "RANDOM_RANDOM",
    "RandomEffectsSpec",
    "RandomizationScheme",
    "ResidualSpec",
    "SearchConstraint",
    "Sequence",
    "SequenceFileError",
    "SweepResult",
    "UnsupportedModelError",
    "assemble_participant",
    "build_residual_covariance",
    "count_sequences",
    "enumerate_designs_fixed_product",
    "enumerate_feasible_designs",
    "enumerate_sequences",
    "evaluate_design",
    "individual_se_curve",
    "optimize_total_measurements_curve",
    "parameter_sweep",
    "parse_sequence_file",
    "power",
    "se_naive",
    "se_population",
    "solve_min_measurements",
    "solve_min_participants",
    "var_shrunken",
    "__version__",
]
