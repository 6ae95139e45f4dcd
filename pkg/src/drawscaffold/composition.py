"""Composition line discovery.

Repeatedly fits straight lines to contour sample points with a RANSAC
variant whose seed pairs must come from two different polygons, so each
line expresses an alignment between objects rather than a single edge.
A candidate is kept only while it explains at least ``theta_inl`` of the
*original* point count; kept inliers leave the pool and the search
repeats until no candidate qualifies.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import NoPoints
from .geometry import SampledPoint

# cap on the candidate-distance matrix size per evaluation chunk
_CHUNK_CELLS = 20_000_000


@dataclass(frozen=True)
class RansacConfig:
    theta_dis: float = 0.04  # normalized perpendicular inlier distance
    theta_inl: float = 0.10  # minimum inlier share of the original point count
    iterations: int = 1000
    seed: int = 0
    max_lines: int = 16

    def __post_init__(self) -> None:
        if self.theta_dis <= 0 or not (0 < self.theta_inl <= 1):
            raise ValueError("thresholds out of range")
        if self.iterations < 1 or self.max_lines < 0:
            raise ValueError("iterations and max_lines must be positive")

    def to_json(self) -> dict:
        return {
            "theta_dis": self.theta_dis,
            "theta_inl": self.theta_inl,
            "iterations": self.iterations,
            "seed": self.seed,
            "max_lines": self.max_lines,
        }


@dataclass(frozen=True)
class CompositionLine:
    normal: tuple[float, float]  # unit normal; line is normal . p = offset
    offset: float
    segment: tuple[tuple[float, float], tuple[float, float]] | None
    inliers: int
    inlier_fraction: float
    rank: int
    supporting_polygons: tuple[int, ...]

    def to_json(self) -> dict:
        return {
            "normal": [self.normal[0], self.normal[1]],
            "offset": self.offset,
            "segment": None
            if self.segment is None
            else [list(self.segment[0]), list(self.segment[1])],
            "inliers": self.inliers,
            "inlier_fraction": self.inlier_fraction,
            "rank": self.rank,
            "polygons": list(self.supporting_polygons),
        }


def lines_to_json(lines: Sequence[CompositionLine]) -> list[dict]:
    return [ln.to_json() for ln in lines]


def clip_to_unit_square(
    normal: tuple[float, float], offset: float
) -> tuple[tuple[float, float], tuple[float, float]] | None:
    """Segment of the line normal.p = offset inside [0,1]^2, or None."""
    nx, ny = normal
    eps = 1e-9
    hits: list[tuple[float, float]] = []
    if abs(ny) > eps:
        for x in (0.0, 1.0):
            y = (offset - nx * x) / ny
            if -eps <= y <= 1.0 + eps:
                hits.append((x, min(max(y, 0.0), 1.0)))
    if abs(nx) > eps:
        for y in (0.0, 1.0):
            x = (offset - ny * y) / nx
            if -eps <= x <= 1.0 + eps:
                hits.append((min(max(x, 0.0), 1.0), y))
    uniq: list[tuple[float, float]] = []
    for p in hits:
        if all(abs(p[0] - q[0]) > 1e-9 or abs(p[1] - q[1]) > 1e-9 for q in uniq):
            uniq.append(p)
    if len(uniq) < 2:
        return None
    dx, dy = -ny, nx  # direction along the line
    uniq.sort(key=lambda p: p[0] * dx + p[1] * dy)
    return (uniq[0], uniq[-1])


def top_k_lines(lines: Sequence[CompositionLine], k: int) -> list[CompositionLine]:
    """First k lines by rank; k <= 0 gives an empty list."""
    if k <= 0:
        return []
    return list(lines[:k])


def _draw_seed_pairs(rng, uniq, sorted_polys, starts, counts, iterations):
    """Indices (into the poly-sorted active set) of cross-polygon seed pairs."""
    n_act = len(sorted_polys)
    first = rng.integers(0, n_act, size=iterations)
    u = rng.random(iterations)
    group = np.searchsorted(uniq, sorted_polys[first])
    # uniform pick from the complement of the first point's polygon group
    g_start = starts[group]
    g_count = counts[group]
    m = n_act - g_count
    rel = np.minimum((u * m).astype(np.int64), m - 1)
    second = rel + np.where(rel >= g_start, g_count, 0)
    return first, second


def fit_composition_lines(
    points: Sequence[SampledPoint], cfg: RansacConfig | None = None
) -> list[CompositionLine]:
    """Discover alignment lines across polygons. Deterministic in cfg.seed.

    Returns lines ordered by discovery (rank 0 first). A single-polygon
    input yields no lines, since every seed pair must straddle two
    polygons.
    """
    if cfg is None:
        cfg = RansacConfig()
    if len(points) == 0:
        raise NoPoints("no sampled points")
    pts = np.array([[sp.point.x, sp.point.y] for sp in points], dtype=np.float64)
    polys = np.array([sp.polygon_id for sp in points], dtype=np.int64)
    n_total = len(pts)
    rng = np.random.default_rng(cfg.seed)

    active = np.arange(n_total)
    lines: list[CompositionLine] = []
    while len(lines) < cfg.max_lines:
        if len(active) < 2:
            break
        order = np.argsort(polys[active], kind="stable")
        sorted_idx = active[order]
        sorted_polys = polys[sorted_idx]
        uniq, starts, counts = np.unique(
            sorted_polys, return_index=True, return_counts=True
        )
        if len(uniq) < 2:
            break

        first, second = _draw_seed_pairs(
            rng, uniq, sorted_polys, starts, counts, cfg.iterations
        )
        p1 = pts[sorted_idx[first]]
        p2 = pts[sorted_idx[second]]
        d = p2 - p1
        length = np.hypot(d[:, 0], d[:, 1])
        valid = length > 1e-12
        safe = np.where(valid, length, 1.0)
        normals = np.stack([d[:, 1] / safe, -d[:, 0] / safe], axis=1)
        offsets = np.einsum("ij,ij->i", normals, p1)

        act_pts = pts[sorted_idx]
        act_polys = sorted_polys.astype(np.float64)
        n_act = len(sorted_idx)
        chunk = max(1, _CHUNK_CELLS // max(n_act, 1))
        inl_counts = np.full(cfg.iterations, -1, dtype=np.int64)
        mean_dist = np.full(cfg.iterations, np.inf)
        for lo in range(0, cfg.iterations, chunk):
            hi = min(lo + chunk, cfg.iterations)
            dist = np.abs(act_pts @ normals[lo:hi].T - offsets[lo:hi][None, :])
            inl = dist <= cfg.theta_dis
            counts_c = inl.sum(axis=0)
            pmin = np.where(inl, act_polys[:, None], np.inf).min(axis=0)
            pmax = np.where(inl, act_polys[:, None], -np.inf).max(axis=0)
            ok = valid[lo:hi] & (pmax > pmin)
            counts_c = np.where(ok, counts_c, -1)
            with np.errstate(invalid="ignore"):
                md = np.where(
                    counts_c > 0, (dist * inl).sum(axis=0) / np.maximum(counts_c, 1), np.inf
                )
            inl_counts[lo:hi] = counts_c
            mean_dist[lo:hi] = md

        best = int(np.lexsort((np.arange(cfg.iterations), mean_dist, -inl_counts))[0])
        best_count = int(inl_counts[best])
        if best_count < 2:
            break
        fraction = best_count / n_total
        if fraction < cfg.theta_inl:
            break

        nx, ny = float(normals[best, 0]), float(normals[best, 1])
        off = float(offsets[best])
        if ny < 0.0 or (ny == 0.0 and nx < 0.0):
            nx, ny, off = -nx, -ny, -off
        dist_b = np.abs(act_pts @ np.array([nx, ny]) - off)
        inl_b = dist_b <= cfg.theta_dis
        supporting = tuple(int(p) for p in np.unique(sorted_polys[inl_b]))
        lines.append(
            CompositionLine(
                normal=(nx, ny),
                offset=off,
                segment=clip_to_unit_square((nx, ny), off),
                inliers=best_count,
                inlier_fraction=fraction,
                rank=len(lines),
                supporting_polygons=supporting,
            )
        )
        active = sorted_idx[~inl_b]
    return lines
