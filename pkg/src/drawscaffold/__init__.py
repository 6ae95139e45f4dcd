"""Composition scaffolds, value studies, and palette feedback for drawing practice."""

from .composition import CompositionLine, RansacConfig, fit_composition_lines, top_k_lines
from .errors import (
    AllPixelsFiltered,
    BadImage,
    DegeneratePolygon,
    DegenerateResult,
    DimensionMismatch,
    EmptyInput,
    EmptyMask,
    EmptyPalette,
    EmptyRegion,
    InvalidKernel,
    ModeMismatch,
    NoCanvas,
    NoDetections,
    NoPoints,
    OutOfBounds,
    ProviderUnavailable,
    ScaffoldError,
    TooLarge,
    UnknownSession,
)
from .geometry import (
    BoundingBox,
    DenseContour,
    GridSpec,
    PolygonContour,
    SampledPoint,
    extract_outer_contour,
    generate_grid,
    iou,
    sample_polygon_points,
    simplify_rdp,
)
from .imagecore import (
    BlurSpec,
    HsvColor,
    ImageBuffer,
    LabColor,
    apply_blur,
    convert_color,
    decode_png,
    encode_png,
    load_png,
    recolor_region,
    save_png,
    srgb_to_hsv,
    srgb_to_lab,
    to_value_image,
)
from .matching import FeedbackMessage, MatchPair, Tolerances, match_palettes
from .palette import DominantCluster, Palette, extract_dominant, isolate_color_preview
from .pipeline import compose_scaffold, palette_feedback, polygons_from_masks
from .segmentation import (
    BoxFallbackProvider,
    FileProvider,
    SegmentationMask,
    SegmentationRequest,
    SegmentationResult,
    SidecarProvider,
    make_provider,
    segment,
)

__version__ = "0.1.0"

__all__ = [
    "AllPixelsFiltered",
    "BadImage",
    "BlurSpec",
    "BoundingBox",
    "BoxFallbackProvider",
    "CompositionLine",
    "DegeneratePolygon",
    "DegenerateResult",
    "DenseContour",
    "DimensionMismatch",
    "DominantCluster",
    "EmptyInput",
    "EmptyMask",
    "EmptyPalette",
    "EmptyRegion",
    "FeedbackMessage",
    "FileProvider",
    "GridSpec",
    "HsvColor",
    "ImageBuffer",
    "InvalidKernel",
    "LabColor",
    "MatchPair",
    "ModeMismatch",
    "NoCanvas",
    "NoDetections",
    "NoPoints",
    "OutOfBounds",
    "Palette",
    "PolygonContour",
    "ProviderUnavailable",
    "RansacConfig",
    "SampledPoint",
    "ScaffoldError",
    "SegmentationMask",
    "SegmentationRequest",
    "SegmentationResult",
    "SidecarProvider",
    "Tolerances",
    "TooLarge",
    "UnknownSession",
    "apply_blur",
    "compose_scaffold",
    "convert_color",
    "decode_png",
    "encode_png",
    "extract_dominant",
    "extract_outer_contour",
    "fit_composition_lines",
    "generate_grid",
    "iou",
    "isolate_color_preview",
    "load_png",
    "make_provider",
    "match_palettes",
    "palette_feedback",
    "polygons_from_masks",
    "recolor_region",
    "sample_polygon_points",
    "save_png",
    "segment",
    "simplify_rdp",
    "srgb_to_hsv",
    "srgb_to_lab",
    "to_value_image",
    "top_k_lines",
]
