"""Monotonicity-method defect reconstruction in a half-plane waveguide.

Synthesizes near-field scattering data for a penetrable defect above a
sound-soft boundary, or loads measured data, and recovers the defect
support by eigenvalue-counting comparisons against probe operators.
"""

from .errors import (
    CellTooLarge,
    CoincidentPoints,
    ConfigError,
    DegenerateSquare,
    DimensionMismatch,
    DomainError,
    EmptyGrid,
    MetadataMismatch,
    NoConvergence,
    NotHermitian,
    PointInsideDefectError,
    SingularMatrix,
    SingularSystem,
)
from .forward import (
    Circle,
    ContrastGrid,
    ContrastSpec,
    Ellipse,
    MeasurementLine,
    NearFieldMatrix,
    assemble_near_field,
    load_near_field,
    rasterize,
    save_near_field,
    scattered_field_at,
    solve_scattered_on_grid,
)
from .greens import WaveConfig, fundamental_solution, green_halfplane, self_cell_integral
from .mono import (
    MonotonicityVerdict,
    ProbeMatrix,
    ProbeSquare,
    assemble_probe,
    inside_test,
    outside_test,
    sign_flipped,
)
from .recon import (
    IndicatorMap,
    ReconConfig,
    export_csv,
    export_pgm,
    load_indicator_csv,
    run_reconstruction,
    synthesize_or_load,
)
from .theory import (
    FactorizationTriple,
    build_counterexample,
    coercivity_bound,
    verify_range_identity_failure,
)

__version__ = "0.1.0"

__all__ = [
    "CellTooLarge",
    "Circle",
    "CoincidentPoints",
    "ConfigError",
    "ContrastGrid",
    "ContrastSpec",
    "DegenerateSquare",
    "DimensionMismatch",
    "DomainError",
    "Ellipse",
    "EmptyGrid",
    "FactorizationTriple",
    "IndicatorMap",
    "MeasurementLine",
    "MetadataMismatch",
    "MonotonicityVerdict",
    "NearFieldMatrix",
    "NoConvergence",
    "NotHermitian",
    "PointInsideDefectError",
    "ProbeMatrix",
    "ReconConfig",
    "SingularMatrix",
    "SingularSystem",
    "ProbeSquare",
    "WaveConfig",
    "assemble_near_field",
    "assemble_probe",
    "build_counterexample",
    "coercivity_bound",
    "export_csv",
    "export_pgm",
    "fundamental_solution",
    "green_halfplane",
    "inside_test",
    "load_indicator_csv",
    "load_near_field",
    "outside_test",
    "rasterize",
    "run_reconstruction",
    "save_near_field",
    "scattered_field_at",
    "self_cell_integral",
    "sign_flipped",
    "solve_scattered_on_grid",
    "synthesize_or_load",
    "verify_range_identity_failure",
]
