"""Normalized 2-D geometry: mask contours, polyline simplification, edge
sampling, bounding boxes, and overlay grid primitives.

All coordinates are normalized: pixel index (x, y) maps to
(x / (w-1), y / (h-1)), so a full-frame region spans (0,0)-(1,1).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import cv2
import numpy as np

from .errors import DegenerateResult, EmptyInput, EmptyMask

GRID_KINDS = ("rule_of_thirds", "central_cross", "central_circle")


@dataclass(frozen=True)
class NormPoint:
    x: float
    y: float

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class BoundingBox:
    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self) -> None:
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise ValueError(f"inverted box {self}")

    @property
    def area(self) -> float:
        return (self.x_max - self.x_min) * (self.y_max - self.y_min)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x_min, self.y_min, self.x_max, self.y_max)

    def to_json(self) -> list[float]:
        return [self.x_min, self.y_min, self.x_max, self.y_max]


@dataclass
class DenseContour:
    """Closed boundary loop, >= 4 points, no simplification applied."""

    points: np.ndarray  # (n, 2) float64

    def __post_init__(self) -> None:
        self.points = np.asarray(self.points, dtype=np.float64).reshape(-1, 2)
        if len(self.points) < 4:
            raise ValueError(f"dense contour needs >= 4 points, got {len(self.points)}")

    def to_json(self) -> list[list[float]]:
        return [[float(x), float(y)] for x, y in self.points]


@dataclass
class PolygonContour:
    """Simplified closed polygon, >= 3 vertices."""

    id: int
    vertices: np.ndarray  # (n, 2) float64
    label: str | None = None

    def __post_init__(self) -> None:
        self.vertices = np.asarray(self.vertices, dtype=np.float64).reshape(-1, 2)
        if len(self.vertices) < 3:
            raise ValueError(f"polygon needs >= 3 vertices, got {len(self.vertices)}")

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "label": self.label,
            "vertices": [[float(x), float(y)] for x, y in self.vertices],
        }


@dataclass(frozen=True)
class SampledPoint:
    point: NormPoint
    polygon_id: int


@dataclass(frozen=True)
class GridSpec:
    kind: str

    def __post_init__(self) -> None:
        if self.kind not in GRID_KINDS:
            raise ValueError(f"unknown grid kind {self.kind!r}")


@dataclass(frozen=True)
class GridLine:
    start: tuple[float, float]
    end: tuple[float, float]

    def to_json(self) -> dict:
        return {"type": "line", "from": list(self.start), "to": list(self.end)}


@dataclass(frozen=True)
class GridCircle:
    center: tuple[float, float]
    radius: float

    def to_json(self) -> dict:
        return {"type": "circle", "center": list(self.center), "radius": self.radius}


# ---------------------------------------------------------------------------
# contour extraction


def extract_outer_contour(mask: np.ndarray) -> list[DenseContour]:
    """Outermost boundary of every 8-connected foreground component.

    Holes are ignored. Components too small to trace a closed loop
    (fewer than 4 boundary pixels, i.e. smaller than 2x2) are skipped.
    """
    m = np.asarray(mask)
    if m.ndim != 2:
        raise ValueError(f"mask must be 2-D, got shape {m.shape}")
    m8 = (m > 0).astype(np.uint8)
    if not m8.any():
        raise EmptyMask("mask has no foreground pixels")
    h, w = m8.shape
    sx = float(max(w - 1, 1))
    sy = float(max(h - 1, 1))
    raw, _ = cv2.findContours(m8, cv2.RETR_EXTERNAL, cv2.CHAIN_APPROX_NONE)
    out = []
    for c in raw:
        pts = c.reshape(-1, 2).astype(np.float64)
        if len(pts) < 4:
            continue
        pts[:, 0] /= sx
        pts[:, 1] /= sy
        out.append(DenseContour(pts))
    # top-to-bottom, then left-to-right by each contour's starting pixel
    out.sort(key=lambda dc: (dc.points[0, 1], dc.points[0, 0]))
    return out


# ---------------------------------------------------------------------------
# Ramer-Douglas-Peucker


def _perp_distances(pts: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = b - a
    norm = np.hypot(d[0], d[1])
    if norm == 0.0:
        return np.hypot(pts[:, 0] - a[0], pts[:, 1] - a[1])
    return np.abs((pts[:, 0] - a[0]) * d[1] - (pts[:, 1] - a[1]) * d[0]) / norm


def _rdp_open_keep(pts: np.ndarray, epsilon: float) -> np.ndarray:
    """Boolean keep-mask of classic RDP over an open chain."""
    n = len(pts)
    keep = np.zeros(n, dtype=bool)
    keep[0] = keep[n - 1] = True
    stack = [(0, n - 1)]
    while stack:
        i, j = stack.pop()
        if j <= i + 1:
            continue
        mid = pts[i + 1 : j]
        dist = _perp_distances(mid, pts[i], pts[j])
        k = int(np.argmax(dist))
        if dist[k] > epsilon:
            keep[i + 1 + k] = True
            stack.append((i, i + 1 + k))
            stack.append((i + 1 + k, j))
    return keep


def simplify_rdp(
    contour: DenseContour,
    epsilon: float,
    polygon_id: int = 0,
    label: str | None = None,
) -> PolygonContour:
    """Simplify a closed contour; raises DegenerateResult below 3 vertices.

    The ring is split at two mutually distant anchor vertices (so the
    result does not depend on where the trace happened to start), each
    half is simplified as an open chain, and the halves are rejoined.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    pts = contour.points
    n = len(pts)
    centroid = pts.mean(axis=0)
    d0 = np.hypot(pts[:, 0] - centroid[0], pts[:, 1] - centroid[1])
    a0 = int(np.argmax(d0))
    ring = np.roll(pts, -a0, axis=0)
    d1 = np.hypot(ring[:, 0] - ring[0, 0], ring[:, 1] - ring[0, 1])
    a1 = int(np.argmax(d1))
    if d1[a1] == 0.0:
        raise DegenerateResult("contour collapses to a single point")
    first = ring[: a1 + 1]
    second = np.vstack([ring[a1:], ring[:1]])
    keep_first = _rdp_open_keep(first, epsilon)
    keep_second = _rdp_open_keep(second, epsilon)
    verts = np.vstack([first[keep_first][:-1], second[keep_second][:-1]])
    # drop consecutive duplicates around the ring, if any
    dup = np.all(verts == np.roll(verts, 1, axis=0), axis=1)
    verts = verts[~dup]
    if len(verts) < 3:
        raise DegenerateResult(f"simplification left {len(verts)} vertices")
    return PolygonContour(id=polygon_id, vertices=verts, label=label)


# ---------------------------------------------------------------------------
# edge sampling


def sample_polygon_points(polygon: PolygonContour) -> list[SampledPoint]:
    """Evenly sample each edge relative to the shortest edge.

    Edge j gets n = max(1, round(len_j / len_min)) points at parameters
    k/n, start vertex included and end vertex excluded, so every shared
    vertex is emitted exactly once.
    """
    v = polygon.vertices
    nxt = np.roll(v, -1, axis=0)
    lengths = np.hypot(*(nxt - v).T)
    min_len = lengths.min()
    if min_len == 0.0:
        raise DegenerateResult("polygon has a zero-length edge")
    out: list[SampledPoint] = []
    for a, b, ln in zip(v, nxt, lengths):
        n = max(1, int(np.floor(ln / min_len + 0.5)))
        ks = np.arange(n) / n
        for t in ks:
            p = a + t * (b - a)
            out.append(SampledPoint(NormPoint(float(p[0]), float(p[1])), polygon.id))
    return out


# ---------------------------------------------------------------------------
# boxes and grids


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection over union of two boxes. Two degenerate boxes give 0."""
    if a.area == 0.0 and b.area == 0.0:
        warnings.warn("IoU of two zero-area boxes defined as 0", stacklevel=2)
        return 0.0
    ix = min(a.x_max, b.x_max) - max(a.x_min, b.x_min)
    iy = min(a.y_max, b.y_max) - max(a.y_min, b.y_min)
    if ix <= 0.0 or iy <= 0.0:
        return 0.0
    inter = ix * iy
    return inter / (a.area + b.area - inter)


def bbox_of_contours(contours) -> BoundingBox:
    """Tight box around every point of every contour."""
    arrays = []
    for c in contours:
        pts = c.points if isinstance(c, DenseContour) else c.vertices
        arrays.append(np.asarray(pts, dtype=np.float64).reshape(-1, 2))
    if not arrays or sum(len(a) for a in arrays) == 0:
        raise EmptyInput("no contour points")
    allpts = np.vstack(arrays)
    return BoundingBox(
        float(allpts[:, 0].min()),
        float(allpts[:, 1].min()),
        float(allpts[:, 0].max()),
        float(allpts[:, 1].max()),
    )


def generate_grid(spec: GridSpec) -> list:
    """Overlay primitives for a named grid, in unit coordinates."""
    if spec.kind == "rule_of_thirds":
        t1, t2 = 1.0 / 3.0, 2.0 / 3.0
        return [
            GridLine((t1, 0.0), (t1, 1.0)),
            GridLine((t2, 0.0), (t2, 1.0)),
            GridLine((0.0, t1), (1.0, t1)),
            GridLine((0.0, t2), (1.0, t2)),
        ]
    if spec.kind == "central_cross":
        return [
            GridLine((0.5, 0.0), (0.5, 1.0)),
            GridLine((0.0, 0.5), (1.0, 0.5)),
        ]
    return [GridCircle((0.5, 0.5), 0.5)]
