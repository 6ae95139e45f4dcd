"""Dominant palette extraction and per-cluster regions.

Clustering runs in CIELAB. In value mode the a*/b* channels are zeroed
before anything else, and near-black / near-white pixels (L* < 2 or
L* > 98) never enter the clustering: paper and canvas edges would
otherwise swallow a cluster each.
"""

from __future__ import annotations

from dataclasses import dataclass

import cv2
import numpy as np

from .errors import (
    AllPixelsFiltered,
    EmptyMask,
    EmptyPalette,
    EmptyRegion,
    OutOfBounds,
)
from .geometry import BoundingBox, DenseContour, bbox_of_contours, extract_outer_contour
from .imagecore import ImageBuffer, LabColor, lab_to_rgb8, srgb_to_lab

MODES = ("value", "color")

DEFAULT_K = 5
EXTREME_LOW = 2.0  # value mode only: L* below this is treated as paper/ink edge
EXTREME_HIGH = 98.0
REGION_THRESHOLD = 5.0  # L* units (value) or Lab distance (color)
CLUSTER_MAX_DIM = 512  # downsample bound for clustering; masks stay full-res
KMEANS_MAX_ITER = 100
KMEANS_TOL = 1e-4  # Lab units of center movement


@dataclass(frozen=True)
class DominantCluster:
    center_lab: LabColor
    swatch_srgb: tuple[int, int, int]
    pixel_fraction: float
    region_contours: tuple[DenseContour, ...]
    bbox: BoundingBox
    mode: str

    def to_json(self) -> dict:
        return {
            "lab": [self.center_lab.l, self.center_lab.a, self.center_lab.b],
            "srgb": list(self.swatch_srgb),
            "pixel_fraction": self.pixel_fraction,
            "bbox": self.bbox.to_json(),
            "contours": [c.to_json() for c in self.region_contours],
        }


@dataclass(frozen=True)
class Palette:
    clusters: tuple[DominantCluster, ...]
    mode: str
    source: str = "canvas"
    k_requested: int = DEFAULT_K

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "source": self.source,
            "k_requested": self.k_requested,
            "clusters": [c.to_json() for c in self.clusters],
        }


def _kmeans(data: np.ndarray, k: int, rng: np.random.Generator):
    """Seeded k-means++ Lloyd iteration. Returns (centers, labels, inertia)."""
    m = len(data)
    centers = np.empty((k, 3))
    centers[0] = data[rng.integers(m)]
    d2 = ((data - centers[0]) ** 2).sum(axis=1)
    n_centers = 1
    for i in range(1, k):
        total = d2.sum()
        if total <= 0.0:
            break
        cum = np.cumsum(d2)
        pick = int(np.searchsorted(cum, rng.random() * total, side="right"))
        pick = min(pick, m - 1)
        centers[i] = data[pick]
        n_centers = i + 1
        d2 = np.minimum(d2, ((data - centers[i]) ** 2).sum(axis=1))
    centers = centers[:n_centers]

    x2 = (data**2).sum(axis=1)
    inertia: list[float] = []
    labels = np.zeros(m, dtype=np.int64)
    for _ in range(KMEANS_MAX_ITER):
        c2 = (centers**2).sum(axis=1)
        d = x2[:, None] + c2[None, :] - 2.0 * (data @ centers.T)
        labels = d.argmin(axis=1)
        inertia.append(float(np.maximum(d[np.arange(m), labels], 0.0).sum()))
        counts = np.bincount(labels, minlength=len(centers))
        sums = np.stack(
            [np.bincount(labels, weights=data[:, j], minlength=len(centers)) for j in range(3)],
            axis=1,
        )
        nonempty = counts > 0
        new_centers = sums[nonempty] / counts[nonempty][:, None]
        if nonempty.all() and len(new_centers) == len(centers):
            shift = np.sqrt(((new_centers - centers) ** 2).sum(axis=1)).max()
            centers = new_centers
            if shift < KMEANS_TOL:
                break
        else:
            centers = new_centers  # dropped an empty cluster; keep iterating
    c2 = (centers**2).sum(axis=1)
    d = x2[:, None] + c2[None, :] - 2.0 * (data @ centers.T)
    labels = d.argmin(axis=1)
    inertia.append(float(np.maximum(d[np.arange(m), labels], 0.0).sum()))
    return centers, labels, inertia


def _clustering_view(img: ImageBuffer) -> np.ndarray:
    """Pixels used for clustering; large images are area-downsampled."""
    longest = max(img.width, img.height)
    if longest <= CLUSTER_MAX_DIM:
        return np.asarray(img.pixels)
    scale = CLUSTER_MAX_DIM / longest
    w = max(1, int(round(img.width * scale)))
    h = max(1, int(round(img.height * scale)))
    return cv2.resize(np.ascontiguousarray(img.pixels), (w, h), interpolation=cv2.INTER_AREA)


def _region_mask(lab_img: np.ndarray, center: np.ndarray, mode: str) -> np.ndarray:
    if mode == "value":
        return np.abs(lab_img[..., 0] - center[0]) <= REGION_THRESHOLD
    diff = lab_img - center
    return (diff * diff).sum(axis=-1) <= REGION_THRESHOLD**2


def region_mask_for(img: ImageBuffer, cluster: DominantCluster):
    """Full-resolution mask, contours, and bbox of a cluster's region."""
    lab = srgb_to_lab(img.pixels)
    if cluster.mode == "value":
        lab[..., 1:] = 0.0
    return _region_parts(lab, np.asarray(cluster.center_lab.as_tuple()), cluster.mode)


def _region_parts(lab_img: np.ndarray, center: np.ndarray, mode: str):
    mask = _region_mask(lab_img, center, mode)
    if not mask.any():
        raise EmptyRegion(f"no pixel within {REGION_THRESHOLD} of {center}")
    try:
        contours = extract_outer_contour(mask)
    except EmptyMask as exc:  # pragma: no cover - mask.any() checked above
        raise EmptyRegion(str(exc)) from exc
    if not contours:
        raise EmptyRegion("region has no traceable component")
    return mask, contours, bbox_of_contours(contours)


def extract_dominant(
    img: ImageBuffer,
    mode: str = "value",
    k: int = DEFAULT_K,
    seed: int = 0,
    source: str = "canvas",
) -> Palette:
    """Dominant palette of an image, clusters sorted by pixel share.

    A k larger than the number of distinct colors is silently reduced.
    Clusters whose region mask comes out empty at full resolution are
    dropped rather than reported without a displayable region.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if k < 1:
        raise ValueError("k must be >= 1")
    work = _clustering_view(img)
    wl = srgb_to_lab(work).reshape(-1, 3)
    if mode == "value":
        wl[:, 1:] = 0.0
        kept = (wl[:, 0] >= EXTREME_LOW) & (wl[:, 0] <= EXTREME_HIGH)
    else:
        kept = np.ones(len(wl), dtype=bool)
    data = wl[kept]
    if len(data) == 0:
        raise AllPixelsFiltered("every pixel is outside the clusterable range")

    n_distinct = len(np.unique(data, axis=0))
    k_eff = min(k, n_distinct)
    rng = np.random.default_rng(seed)
    centers, labels, _ = _kmeans(data, k_eff, rng)

    total = wl.shape[0]  # unfiltered pixel count
    counts = np.bincount(labels, minlength=len(centers))
    fractions = counts / total
    order = np.lexsort((centers[:, 2], centers[:, 1], centers[:, 0], -fractions))

    lab_full = srgb_to_lab(img.pixels)
    if mode == "value":
        lab_full[..., 1:] = 0.0
    clusters: list[DominantCluster] = []
    for idx in order:
        center = centers[idx]
        try:
            _, contours, bbox = _region_parts(lab_full, center, mode)
        except EmptyRegion:
            continue
        center_lab = LabColor(float(center[0]), float(center[1]), float(center[2]))
        clusters.append(
            DominantCluster(
                center_lab=center_lab,
                swatch_srgb=lab_to_rgb8(center_lab),
                pixel_fraction=float(fractions[idx]),
                region_contours=tuple(contours),
                bbox=bbox,
                mode=mode,
            )
        )
    if not clusters:
        raise EmptyRegion("no cluster kept a displayable region")
    return Palette(clusters=tuple(clusters), mode=mode, source=source, k_requested=k)


def isolate_color_preview(
    reference: ImageBuffer, palette: Palette, hover: tuple[int, int]
) -> ImageBuffer:
    """White out everything except the hovered color's region."""
    if not palette.clusters:
        raise EmptyPalette("palette has no clusters")
    x, y = int(hover[0]), int(hover[1])
    if not (0 <= x < reference.width and 0 <= y < reference.height):
        raise OutOfBounds(f"({x}, {y}) outside {reference.width}x{reference.height}")
    pixel_lab = srgb_to_lab(reference.pixels[y, x].astype(np.float64))
    if palette.mode == "value":
        pixel_lab[1:] = 0.0
    centers = np.array([c.center_lab.as_tuple() for c in palette.clusters])
    nearest = int(np.argmin(((centers - pixel_lab) ** 2).sum(axis=1)))
    lab = srgb_to_lab(reference.pixels)
    if palette.mode == "value":
        lab[..., 1:] = 0.0
    mask = _region_mask(lab, centers[nearest], palette.mode)
    out = np.where(mask[..., None], reference.pixels, np.uint8(255))
    return ImageBuffer(out)
