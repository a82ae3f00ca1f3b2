"""Localization from partially observed anchor-mobile distances via Nyström completion."""

from .geometry import (
    CenteringVector,
    GramMatrix,
    PointConfig,
    SquaredDistanceMatrix,
    double_center,
    gower_origin_distances,
    mds_embed,
    procrustes_align,
    random_points,
    squared_edm,
    validate_edm,
)
from .nystrom import center_blocks, localize_full, nystrom_complete
from .sampling import ObservationSet, SampleSet, draw_samples, observe
from .solvers import (
    RecoveryReport,
    SolverConfig,
    recover_B_nuclear,
    recover_configuration,
    recovery_rmse,
    recover_Y_anchored,
)

__version__ = "0.1.0"

__all__ = [
    "CenteringVector",
    "GramMatrix",
    "PointConfig",
    "SquaredDistanceMatrix",
    "double_center",
    "gower_origin_distances",
    "mds_embed",
    "procrustes_align",
    "random_points",
    "squared_edm",
    "validate_edm",
    "center_blocks",
    "localize_full",
    "nystrom_complete",
    "ObservationSet",
    "SampleSet",
    "draw_samples",
    "observe",
    "RecoveryReport",
    "SolverConfig",
    "recover_B_nuclear",
    "recover_configuration",
    "recovery_rmse",
    "recover_Y_anchored",
]
