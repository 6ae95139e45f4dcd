"""File reports: matplotlib figures and CSV tables for CLI output."""

from __future__ import annotations

import csv

import matplotlib

matplotlib.use("Agg")  # render to files, never to a display

import matplotlib.pyplot as plt
import numpy as np

from .composition import CompositionLine
from .geometry import GridCircle, GridLine, GridSpec, PolygonContour, generate_grid
from .imagecore import ImageBuffer
from .matching import MatchPair

_LINE_CMAP = "tab10"


def composition_figure(
    reference: ImageBuffer,
    polygons: list[PolygonContour],
    lines: list[CompositionLine],
    path: str,
    grid: str | None = None,
) -> None:
    """Reference image with polygon outlines and composition lines."""
    fig, ax = plt.subplots(figsize=(8, 8 * reference.height / max(reference.width, 1)))
    ax.imshow(reference.pixels, extent=(0.0, 1.0, 1.0, 0.0))
    if grid is not None:
        for prim in generate_grid(GridSpec(grid)):
            if isinstance(prim, GridLine):
                ax.plot(
                    [prim.start[0], prim.end[0]],
                    [prim.start[1], prim.end[1]],
                    color="0.6",
                    lw=0.8,
                    ls="--",
                )
            elif isinstance(prim, GridCircle):
                ax.add_patch(
                    plt.Circle(prim.center, prim.radius, fill=False, color="0.6", lw=0.8, ls="--")
                )
    for poly in polygons:
        closed = np.vstack([poly.vertices, poly.vertices[:1]])
        ax.plot(closed[:, 0], closed[:, 1], color="#1f77b4", lw=1.5)
    cmap = plt.get_cmap(_LINE_CMAP)
    for line in lines:
        (x1, y1), (x2, y2) = line.segment
        ax.plot(
            [x1, x2],
            [y1, y2],
            color=cmap(line.rank % 10),
            lw=2.5,
            label=f"rank {line.rank} ({line.inliers} pts)",
        )
    if lines:
        ax.legend(loc="upper right", fontsize=8)
    ax.set_xlim(0.0, 1.0)
    ax.set_ylim(1.0, 0.0)
    ax.set_xticks([])
    ax.set_yticks([])
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def pairs_figure(pairs: list[MatchPair], mode: str, path: str) -> None:
    """One row per matched pair: both swatches plus the feedback text."""
    n = max(len(pairs), 1)
    fig, axes = plt.subplots(n, 2, figsize=(7, 1.4 * n), squeeze=False)
    for row, pair in enumerate(pairs):
        for col, cluster in ((0, pair.reference), (1, pair.canvas)):
            ax = axes[row][col]
            swatch = np.tile(
                np.asarray(cluster.swatch_srgb, dtype=np.uint8), (32, 96, 1)
            )
            ax.imshow(swatch)
            ax.set_xticks([])
            ax.set_yticks([])
        axes[row][0].set_ylabel(f"pair {row}", fontsize=8)
        text = " ".join(m.text for m in pair.feedback)
        axes[row][1].set_xlabel(
            f"score {pair.score.s_total:.3f}  {text}", fontsize=7, wrap=True
        )
    if not pairs:
        axes[0][0].axis("off")
        axes[0][1].axis("off")
    axes[0][0].set_title("reference", fontsize=9)
    axes[0][1].set_title("canvas", fontsize=9)
    fig.suptitle(f"{mode} feedback", fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_lines_csv(lines: list[CompositionLine], path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "rank",
                "normal_x",
                "normal_y",
                "offset",
                "x1",
                "y1",
                "x2",
                "y2",
                "inliers",
                "inlier_fraction",
                "polygons",
            ]
        )
        for line in lines:
            (x1, y1), (x2, y2) = line.segment
            writer.writerow(
                [
                    line.rank,
                    f"{line.normal[0]:.9f}",
                    f"{line.normal[1]:.9f}",
                    f"{line.offset:.9f}",
                    f"{x1:.6f}",
                    f"{y1:.6f}",
                    f"{x2:.6f}",
                    f"{y2:.6f}",
                    line.inliers,
                    f"{line.inlier_fraction:.6f}",
                    "|".join(str(p) for p in line.supporting_polygons),
                ]
            )


def write_pairs_csv(pairs: list[MatchPair], path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "reference_index",
                "canvas_index",
                "s_value",
                "s_spatial",
                "s_total",
                "reference_rgb",
                "canvas_rgb",
                "feedback",
            ]
        )
        for pair in pairs:
            writer.writerow(
                [
                    pair.reference_index,
                    pair.canvas_index,
                    f"{pair.score.s_value:.6f}",
                    f"{pair.score.s_spatial:.6f}",
                    f"{pair.score.s_total:.6f}",
                    "|".join(str(c) for c in pair.reference.swatch_srgb),
                    "|".join(str(c) for c in pair.canvas.swatch_srgb),
                    " ".join(m.text for m in pair.feedback),
                ]
            )
