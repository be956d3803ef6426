"""Köhler multi-thresholding by boundary contrast, with a fast O(NM) curve."""

from .core import (
    FULL_N4,
    GRAY_LEVELS,
    HALF_N4,
    BoundaryPair,
    ContrastCurve,
    GrayImage,
    NeighborOffset,
    direct_contrast_curve,
    fast_contrast_curve,
    merge_accumulators,
    pair_contribution,
    row_curve,
)
from .pnm import FrameSequence, frame_sequence, read_pnm, write_pgm
from .threshold import (
    LabelImage,
    MeanContrastCurve,
    NoBoundaryError,
    ThresholdSet,
    classify,
    mean_contrast,
    optimal_threshold,
    quantize,
    top_k_local_maxima,
)

__all__ = [
    "FULL_N4", "GRAY_LEVELS", "HALF_N4", "BoundaryPair", "ContrastCurve", "GrayImage",
    "NeighborOffset", "direct_contrast_curve", "fast_contrast_curve", "merge_accumulators",
    "pair_contribution", "row_curve", "FrameSequence", "frame_sequence", "read_pnm",
    "write_pgm", "LabelImage", "MeanContrastCurve", "NoBoundaryError", "ThresholdSet",
    "classify", "mean_contrast", "optimal_threshold", "quantize", "top_k_local_maxima",
]
