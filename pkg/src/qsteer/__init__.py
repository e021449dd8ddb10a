"""Two-qubit quantum steering detection and quantification toolkit."""

__version__ = "0.1.0"

from .backend import BACKEND
from .criteria import (
    CriterionKind,
    CriterionReport,
    f_dimbound,
    f_entropic,
    f_linear,
    f_rotinv,
    linear_bound_general,
)
from .measures import (
    MeasureKind,
    MeasureValue,
    all_measures,
    s_dimbound_3,
    s_entropic_23,
    s_linear_2,
    s_linear_3,
    s_rotinv_3,
)
from .measurements import (
    Assemblage,
    CorrelationMatrix,
    DataMatrix,
    Direction,
    OrthogonalTriad,
    PAULI_TRIAD,
    ProbabilityTable,
    assemblage,
    assemblage_from_directions,
    correlation_matrix,
    data_matrix,
    haar_random_triad,
    probability_table,
    projector,
)
from .qstate import (
    BlochForm,
    CanonicalBlochForm,
    DensityMatrix,
    bloch_decompose,
    bloch_matrix,
    canonical_form,
    canonicalize,
    from_matrix,
    random_state,
    werner,
)
from .robustness import (
    DeterministicStrategyTable,
    FeasibilityResult,
    LhsModel,
    RobustnessResult,
    SeeSawResult,
    SolveStatus,
    deterministic_strategies,
    lhs_feasibility,
    pauli_robustness,
    see_saw,
    steering_robustness,
)
from .volume import VolumeEstimate, estimate_volume, werner_volume_sweep, wilson_interval

__all__ = [
    "Assemblage",
    "BACKEND",
    "BlochForm",
    "CanonicalBlochForm",
    "CorrelationMatrix",
    "CriterionKind",
    "CriterionReport",
    "DataMatrix",
    "DensityMatrix",
    "DeterministicStrategyTable",
    "Direction",
    "FeasibilityResult",
    "LhsModel",
    "MeasureKind",
    "MeasureValue",
    "OrthogonalTriad",
    "PAULI_TRIAD",
    "ProbabilityTable",
    "RobustnessResult",
    "SeeSawResult",
    "SolveStatus",
    "VolumeEstimate",
    "__version__",
    "all_measures",
    "assemblage",
    "assemblage_from_directions",
    "bloch_decompose",
    "bloch_matrix",
    "canonical_form",
    "canonicalize",
    "correlation_matrix",
    "data_matrix",
    "deterministic_strategies",
    "estimate_volume",
    "f_dimbound",
    "f_entropic",
    "f_linear",
    "f_rotinv",
    "from_matrix",
    "haar_random_triad",
    "lhs_feasibility",
    "linear_bound_general",
    "pauli_robustness",
    "probability_table",
    "projector",
    "random_state",
    "s_dimbound_3",
    "s_entropic_23",
    "s_linear_2",
    "s_linear_3",
    "s_rotinv_3",
    "see_saw",
    "steering_robustness",
    "werner",
    "werner_volume_sweep",
    "wilson_interval",
]
