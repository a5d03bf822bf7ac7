"""hodgekit: exact computations for degenerating mixed Hodge structures."""

from .scalars import (
    EXACT,
    QI,
    FieldOps,
    float_field,
    format_scalar,
    parse_scalar,
    symbolic_field,
)
from .linalg import Matrix, Subspace
from .filtrations import DecFiltration, FiltrationError, IncFiltration
from .mhs import (
    Bigrading,
    MHSError,
    PolarizationSystem,
    Stratum,
    classify_membership,
    deligne_bigrading,
    delta_split,
    endo_norm_sq,
    is_split_real,
    lie_bigrading,
    mixed_hodge_metric,
    verify_bigrading,
)
from .weights import (
    AdmissibleTriple,
    Sl2Triple,
    WeightError,
    admissible_pipeline,
    deligne_grading,
    monodromy_filtration,
    relative_weight_filtration,
    verify_relative_weight_filtration,
)
from .orbits import (
    Distance,
    OrbitError,
    OrbitScenario,
    OutOfChart,
    ScanResult,
    ScanRow,
    chart_solve,
    decay_scan,
    dist_surrogate,
    horizontality_check,
    orbit_eval,
    scaling_operator,
)
from .io import (
    RecordError,
    Structure,
    scenario_from_json,
    scenario_to_json,
    structure_from_json,
    structure_to_json,
)
from .scenarios import UnknownScenario, scenario_list, scenario_run

__all__ = [
    "EXACT",
    "QI",
    "FieldOps",
    "float_field",
    "symbolic_field",
    "format_scalar",
    "parse_scalar",
    "Matrix",
    "Subspace",
    "DecFiltration",
    "IncFiltration",
    "FiltrationError",
    "Bigrading",
    "MHSError",
    "PolarizationSystem",
    "Stratum",
    "classify_membership",
    "deligne_bigrading",
    "delta_split",
    "endo_norm_sq",
    "is_split_real",
    "lie_bigrading",
    "mixed_hodge_metric",
    "verify_bigrading",
    "AdmissibleTriple",
    "Sl2Triple",
    "WeightError",
    "admissible_pipeline",
    "deligne_grading",
    "monodromy_filtration",
    "relative_weight_filtration",
    "verify_relative_weight_filtration",
    "Distance",
    "OrbitError",
    "OrbitScenario",
    "OutOfChart",
    "ScanResult",
    "ScanRow",
    "chart_solve",
    "decay_scan",
    "dist_surrogate",
    "horizontality_check",
    "orbit_eval",
    "scaling_operator",
    "RecordError",
    "Structure",
    "scenario_from_json",
    "scenario_to_json",
    "structure_from_json",
    "structure_to_json",
    "UnknownScenario",
    "scenario_list",
    "scenario_run",
]

__version__ = "0.1.0"
