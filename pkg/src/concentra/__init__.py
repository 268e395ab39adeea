"""Quantitative concentration deficits for planar sets on a square grid."""
from ._backend import BACKEND
from .boundary import BoundaryCurve, extract_boundary, local_perimeter, normal_failures, perimeter
from .distance import (
    DistanceField,
    ExteriorBallReport,
    dilate,
    dilated_area,
    edt,
    envelope,
    erode,
    exterior_ball_check,
    is_r_convex,
    squared_edt,
)
from .errors import (
    BadParameters,
    CenterOnBoundary,
    ConcentraError,
    DegreeTooLarge,
    EmptySet,
    FormatError,
    MisalignedOrigins,
    NotNonnegative,
    NotNormalized,
    NotRConvex,
    SpacingMismatch,
    UnknownCorpus,
)
from .functionals import (
    AsymmetryResult,
    DeficitReport,
    OscillationResult,
    ReductionReport,
    concentration_deficit,
    deficit_report,
    equivalent_radius,
    fraenkel_asymmetry,
    iso_deficit,
    oscillation_index,
    perimeter_gap,
    reduction_check,
    tol_disc,
)
from .grid import (
    BallSpec,
    GridSet,
    area,
    ball_overlap_area,
    difference,
    from_mask,
    intersection,
    load,
    resample,
    save,
    sym_diff_area,
    union,
)
from .shapes import ShapeSpec, corpus, generate
from .steiner import PolyLemResult, SteinerFit, check_polylem, large_r_chain, polylem_constant, sample_growth

__version__ = "0.1.0"

__all__ = [
    "area",
    "AsymmetryResult",
    "BACKEND",
    "BadParameters",
    "ball_overlap_area",
    "BallSpec",
    "BoundaryCurve",
    "CenterOnBoundary",
    "check_polylem",
    "ConcentraError",
    "concentration_deficit",
    "corpus",
    "deficit_report",
    "DeficitReport",
    "DegreeTooLarge",
    "difference",
    "dilate",
    "dilated_area",
    "DistanceField",
    "edt",
    "EmptySet",
    "envelope",
    "equivalent_radius",
    "erode",
    "exterior_ball_check",
    "ExteriorBallReport",
    "extract_boundary",
    "FormatError",
    "fraenkel_asymmetry",
    "from_mask",
    "generate",
    "GridSet",
    "intersection",
    "is_r_convex",
    "iso_deficit",
    "large_r_chain",
    "load",
    "local_perimeter",
    "MisalignedOrigins",
    "normal_failures",
    "NotNonnegative",
    "NotNormalized",
    "NotRConvex",
    "oscillation_index",
    "OscillationResult",
    "perimeter",
    "perimeter_gap",
    "polylem_constant",
    "PolyLemResult",
    "reduction_check",
    "ReductionReport",
    "resample",
    "sample_growth",
    "save",
    "ShapeSpec",
    "SpacingMismatch",
    "squared_edt",
    "SteinerFit",
    "sym_diff_area",
    "tol_disc",
    "union",
    "UnknownCorpus",
    "__version__",
]
