"""Cluster matching and feedback.

A reference cluster is paired with the canvas cluster that maximizes a
weighted blend of color closeness (normalized Lab distance) and spatial
overlap (bounding-box IoU). Feedback messages then describe how to move
the canvas color toward its reference match.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyPalette, ModeMismatch
from .geometry import iou
from .imagecore import LabColor, lab_to_srgb, srgb_to_hsv
from .palette import DominantCluster, Palette

W_VALUE = 0.4
W_SPATIAL = 0.6

VALUE_TOLERANCE = 3.0  # L* units
HUE_TOLERANCE = 3.0  # degrees
SATURATION_TOLERANCE = 3.0  # percentage points


@dataclass(frozen=True)
class Tolerances:
    value: float = VALUE_TOLERANCE
    hue: float = HUE_TOLERANCE
    saturation: float = SATURATION_TOLERANCE

WARM_POLE = 30.0  # degrees; cool pole is directly opposite
COOL_POLE = 210.0

HUE_CATEGORY_NAMES = ("red", "yellow", "green", "cyan", "blue", "magenta")


@dataclass(frozen=True)
class HueCategory:
    name: str
    center: float  # degrees

    def to_json(self) -> dict:
        return {"name": self.name, "center": self.center}


HUE_CATEGORIES = tuple(
    HueCategory(name, i * 60.0) for i, name in enumerate(HUE_CATEGORY_NAMES)
)


def hue_category(hue: float) -> HueCategory:
    """Nearest of six 60-degree sectors; boundaries are lower-inclusive."""
    idx = int(np.floor(((hue % 360.0) + 30.0) / 60.0)) % 6
    return HUE_CATEGORIES[idx]


@dataclass(frozen=True)
class SimilarityBreakdown:
    s_value: float
    s_spatial: float
    s_total: float

    def to_json(self) -> dict:
        return {"s_value": self.s_value, "s_spatial": self.s_spatial, "s_total": self.s_total}


@dataclass(frozen=True)
class FeedbackMessage:
    dimension: str  # value | hue | saturation
    direction: str  # match | lighten | darken | warmer | cooler | toward_category | less_vibrant | more_vibrant
    magnitude: float
    text: str
    target_category: str | None = None

    def to_json(self) -> dict:
        out = {
            "dimension": self.dimension,
            "direction": self.direction,
            "magnitude": self.magnitude,
            "text": self.text,
        }
        if self.target_category is not None:
            out["target"] = self.target_category
        return out


@dataclass(frozen=True)
class MatchPair:
    reference_index: int
    canvas_index: int
    reference: DominantCluster
    canvas: DominantCluster
    score: SimilarityBreakdown
    feedback: tuple[FeedbackMessage, ...]

    def to_json(self) -> dict:
        def cluster_json(c: DominantCluster) -> dict:
            return {
                "lab": [c.center_lab.l, c.center_lab.a, c.center_lab.b],
                "srgb": list(c.swatch_srgb),
                "pixel_fraction": c.pixel_fraction,
                "bbox": c.bbox.to_json(),
            }

        return {
            "reference_index": self.reference_index,
            "canvas_index": self.canvas_index,
            "reference": cluster_json(self.reference),
            "canvas": cluster_json(self.canvas),
            "score": self.score.to_json(),
            "feedback": [f.to_json() for f in self.feedback],
        }


def _normalized(lab: LabColor) -> np.ndarray:
    return np.array([lab.l / 100.0, (lab.a + 128.0) / 256.0, (lab.b + 128.0) / 256.0])


def value_similarity(a: LabColor, b: LabColor) -> float:
    """1 - (1/3) * Euclidean distance between channel-normalized Lab colors."""
    return 1.0 - np.linalg.norm(_normalized(a) - _normalized(b)) / 3.0


def combined_score(canvas: DominantCluster, reference: DominantCluster) -> SimilarityBreakdown:
    s_val = value_similarity(canvas.center_lab, reference.center_lab)
    s_spt = iou(canvas.bbox, reference.bbox)
    return SimilarityBreakdown(
        s_value=s_val,
        s_spatial=s_spt,
        s_total=W_VALUE * s_val + W_SPATIAL * s_spt,
    )


def _lab_to_hsv(lab: LabColor) -> tuple[float, float, float]:
    h, s, v = srgb_to_hsv(lab_to_srgb(np.asarray(lab.as_tuple())))
    return float(h), float(s), float(v)


def _signed_arc(from_hue: float, to_hue: float) -> float:
    """Shortest signed arc from one hue to another, in (-180, 180]."""
    d = (to_hue - from_hue) % 360.0
    return d - 360.0 if d > 180.0 else d


def _warmth_distance(hue: float) -> float:
    return abs(_signed_arc(hue, WARM_POLE))


def render_value_feedback(pair: MatchPair, tolerance: float = VALUE_TOLERANCE) -> FeedbackMessage:
    """Lighten/darken advice from the L* delta of a matched pair."""
    delta = pair.canvas.center_lab.l - pair.reference.center_lab.l
    magnitude = abs(delta)
    shown = int(round(magnitude))
    if magnitude <= tolerance:
        return FeedbackMessage(
            "value", "match", magnitude, f"Value matches the reference (off by {shown} L*)."
        )
    if delta < 0:
        return FeedbackMessage(
            "value",
            "lighten",
            magnitude,
            f"Lighten this value by about {shown} L* to match the reference.",
        )
    return FeedbackMessage(
        "value",
        "darken",
        magnitude,
        f"Darken this value by about {shown} L* to match the reference.",
    )


def render_color_feedback(
    pair: MatchPair,
    hue_tolerance: float = HUE_TOLERANCE,
    saturation_tolerance: float = SATURATION_TOLERANCE,
) -> list[FeedbackMessage]:
    """Hue and saturation advice for a matched pair, in that order."""
    ch, cs, _ = _lab_to_hsv(pair.canvas.center_lab)
    rh, rs, _ = _lab_to_hsv(pair.reference.center_lab)
    c_cat = hue_category(ch)
    r_cat = hue_category(rh)
    arc = _signed_arc(ch, rh)
    magnitude = abs(arc)
    shown = int(round(magnitude))
    if c_cat.name == r_cat.name:
        if magnitude <= hue_tolerance:
            hue_msg = FeedbackMessage(
                "hue", "match", magnitude, f"Hue matches the reference (off by {shown} degrees)."
            )
        elif _warmth_distance(rh) < _warmth_distance(ch):
            hue_msg = FeedbackMessage(
                "hue",
                "warmer",
                magnitude,
                f"Shift the hue about {shown} degrees warmer to match the reference.",
            )
        else:
            hue_msg = FeedbackMessage(
                "hue",
                "cooler",
                magnitude,
                f"Shift the hue about {shown} degrees cooler to match the reference.",
            )
    else:
        hue_msg = FeedbackMessage(
            "hue",
            "toward_category",
            magnitude,
            f"This color should be more {r_cat.name} in hue to match the reference.",
            target_category=r_cat.name,
        )

    ds = (cs - rs) * 100.0
    s_mag = abs(ds)
    s_shown = int(round(s_mag))
    if s_mag <= saturation_tolerance:
        sat_msg = FeedbackMessage(
            "saturation",
            "match",
            s_mag,
            f"Saturation matches the reference (off by {s_shown} points).",
        )
    elif ds > 0:
        sat_msg = FeedbackMessage(
            "saturation",
            "less_vibrant",
            s_mag,
            f"Reduce saturation by about {s_shown} points; the canvas color is more vibrant than the reference.",
        )
    else:
        sat_msg = FeedbackMessage(
            "saturation",
            "more_vibrant",
            s_mag,
            f"Increase saturation by about {s_shown} points; the canvas color is less vibrant than the reference.",
        )
    return [hue_msg, sat_msg]


def match_palettes(
    canvas: Palette, reference: Palette, tolerances: Tolerances | None = None
) -> list[MatchPair]:
    """One pair per reference cluster; several may share a canvas cluster.

    The canvas argmax is by combined score; exact ties go to the larger
    canvas pixel fraction, then the lower canvas index.
    """
    if canvas.mode != reference.mode:
        raise ModeMismatch(f"{canvas.mode!r} vs {reference.mode!r}")
    if not canvas.clusters or not reference.clusters:
        raise EmptyPalette("cannot match an empty palette")
    tol = tolerances or Tolerances()
    pairs: list[MatchPair] = []
    for j, ref in enumerate(reference.clusters):
        best_i = 0
        best_key: tuple[float, float] | None = None
        best_score: SimilarityBreakdown | None = None
        for i, cand in enumerate(canvas.clusters):
            score = combined_score(cand, ref)
            key = (score.s_total, cand.pixel_fraction)
            if best_key is None or key > best_key:
                best_key, best_i, best_score = key, i, score
        pair = MatchPair(
            reference_index=j,
            canvas_index=best_i,
            reference=ref,
            canvas=canvas.clusters[best_i],
            score=best_score,
            feedback=(),
        )
        if canvas.mode == "value":
            feedback = (render_value_feedback(pair, tolerance=tol.value),)
        else:
            feedback = tuple(
                render_color_feedback(
                    pair, hue_tolerance=tol.hue, saturation_tolerance=tol.saturation
                )
            )
        pairs.append(
            MatchPair(
                reference_index=j,
                canvas_index=best_i,
                reference=ref,
                canvas=canvas.clusters[best_i],
                score=best_score,
                feedback=feedback,
            )
        )
    return pairs
