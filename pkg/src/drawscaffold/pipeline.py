"""Shared pipeline cores used by both the HTTP service and the CLI."""

from __future__ import annotations

import numpy as np

from .composition import CompositionLine, RansacConfig, fit_composition_lines
from .errors import DegenerateResult, EmptyMask, NoCanvas
from .geometry import (
    BoundingBox,
    PolygonContour,
    extract_outer_contour,
    sample_polygon_points,
    simplify_rdp,
)
from .imagecore import ImageBuffer
from .matching import MatchPair, Tolerances, match_palettes
from .palette import extract_dominant
from .segmentation import SegmentationRequest, SegmentationResult, segment

# epsilon is halved on degenerate simplification at most this many times
MAX_EPSILON_RETRIES = 7


def polygons_from_masks(
    result: SegmentationResult, epsilon: float
) -> list[tuple[PolygonContour, float]]:
    """Simplify every mask component, halving epsilon while degenerate.

    Returns (polygon, epsilon_used) pairs; components that stay
    degenerate after all retries are dropped, as are masks with no
    traceable component.
    """
    polygons = []
    pid = 0
    for m in result.masks:
        try:
            contours = extract_outer_contour(m.mask)
        except EmptyMask:
            continue
        for contour in contours:
            eps = epsilon
            poly = None
            for _ in range(MAX_EPSILON_RETRIES + 1):
                try:
                    poly = simplify_rdp(contour, eps, polygon_id=pid, label=m.label)
                    break
                except DegenerateResult:
                    eps /= 2.0
            if poly is None:
                continue
            polygons.append((poly, eps))
            pid += 1
    return polygons


def compose_scaffold(
    reference: ImageBuffer,
    provider,
    prompt: str | None,
    boxes: tuple[BoundingBox, ...],
    epsilon: float,
    cfg: RansacConfig,
    segmentation: SegmentationResult | None = None,
) -> tuple[list[tuple[PolygonContour, float]], list[CompositionLine], SegmentationResult]:
    """Segment, simplify, sample, and fit composition lines."""
    if segmentation is None:
        request = SegmentationRequest(image=reference, text_prompt=prompt or None, boxes=boxes)
        segmentation = segment(request, provider)
    polygons = polygons_from_masks(segmentation, epsilon)
    points = [p for poly, _ in polygons for p in sample_polygon_points(poly)]
    lines = fit_composition_lines(points, cfg) if points else []
    return polygons, lines, segmentation


def palette_feedback(
    reference: ImageBuffer,
    canvas: ImageBuffer | None,
    mode: str,
    k: int,
    seed: int,
    tolerances: Tolerances | None = None,
) -> list[MatchPair]:
    """Dominant palettes of both images, matched canvas-to-reference."""
    if canvas is None:
        raise NoCanvas("a canvas snapshot is required for feedback")
    ref_palette = extract_dominant(reference, mode=mode, k=k, seed=seed, source="reference")
    can_palette = extract_dominant(canvas, mode=mode, k=k, seed=seed, source="canvas")
    return match_palettes(can_palette, ref_palette, tolerances)
