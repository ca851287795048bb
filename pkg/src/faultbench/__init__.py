"""faultbench: evaluation toolkit for seismic fault delineation.

Volume and mask I/O, width standardization of fault annotations,
overlap and boundary metrics, dataset-optimal thresholding, synthetic
robustness experiments, and benchmark report generation.
"""

__version__ = "0.1.0"

from .types import FaultMask, ProbabilityMap, SeismicVolume, SourceFormat
from .metrics import Degeneracy, MetricResult, bcd, dice, evaluate_pair, jaccard, modified_hausdorff
from .morph import StructuringElement, dilate, skeletonize, standardize
from .preprocess import (
    Axis,
    PadPolicy,
    Patch,
    Section,
    TilingSpec,
    extract_section,
    normalize_minmax,
    normalize_zscore,
    stitch,
    tile,
    volume_std,
)
from .threshold import ThresholdResult, binarize, default_grid, ods_search
from .losses import bce_loss, dice_loss, hybrid_loss, loss_gradient
from .faultlab import FaultSpec, PerturbKind, PerturbSpec, gen_faults, perturb

__all__ = [
    "__version__",
    "FaultMask",
    "ProbabilityMap",
    "SeismicVolume",
    "SourceFormat",
    "Degeneracy",
    "MetricResult",
    "dice",
    "jaccard",
    "bcd",
    "modified_hausdorff",
    "evaluate_pair",
    "StructuringElement",
    "skeletonize",
    "dilate",
    "standardize",
    "Axis",
    "PadPolicy",
    "Patch",
    "Section",
    "TilingSpec",
    "extract_section",
    "normalize_minmax",
    "normalize_zscore",
    "volume_std",
    "tile",
    "stitch",
    "ThresholdResult",
    "binarize",
    "default_grid",
    "ods_search",
    "bce_loss",
    "dice_loss",
    "hybrid_loss",
    "loss_gradient",
    "FaultSpec",
    "PerturbKind",
    "PerturbSpec",
    "gen_faults",
    "perturb",
]
