"""SVG export of scaffold overlays.

Geometry stays in normalized coordinates internally; the document
scales it to the requested pixel size so stroke widths make sense in
any viewer.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

from .composition import CompositionLine
from .geometry import GridCircle, GridLine, GridSpec, PolygonContour, generate_grid

POLYGON_STROKE = "#1f77b4"
LINE_STROKE = "#d62728"
GRID_STROKE = "#7f7f7f"


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _polygon_element(poly: PolygonContour, width: int, height: int) -> str:
    pts = " ".join(
        f"{_fmt(x * width)},{_fmt(y * height)}" for x, y in poly.vertices
    )
    title = f"<title>{escape(poly.label)}</title>" if poly.label else ""
    return (
        f'<polygon points="{pts}" fill="none" stroke="{POLYGON_STROKE}" '
        f'stroke-width="2">{title}</polygon>'
    )


def _line_element(line: CompositionLine, width: int, height: int) -> str:
    (x1, y1), (x2, y2) = line.segment
    return (
        f'<line x1="{_fmt(x1 * width)}" y1="{_fmt(y1 * height)}" '
        f'x2="{_fmt(x2 * width)}" y2="{_fmt(y2 * height)}" '
        f'stroke="{LINE_STROKE}" stroke-width="3" stroke-linecap="round" '
        f'opacity="0.9"><title>rank {line.rank}, {line.inliers} inliers</title></line>'
    )


def _grid_elements(kind: str, width: int, height: int) -> list[str]:
    parts = []
    for prim in generate_grid(GridSpec(kind)):
        if isinstance(prim, GridLine):
            (x1, y1), (x2, y2) = prim.start, prim.end
            parts.append(
                f'<line x1="{_fmt(x1 * width)}" y1="{_fmt(y1 * height)}" '
                f'x2="{_fmt(x2 * width)}" y2="{_fmt(y2 * height)}" '
                f'stroke="{GRID_STROKE}" stroke-width="1" stroke-dasharray="6 4"/>'
            )
        elif isinstance(prim, GridCircle):
            cx, cy = prim.center
            # ellipse keeps the circle round under non-square scaling
            parts.append(
                f'<ellipse cx="{_fmt(cx * width)}" cy="{_fmt(cy * height)}" '
                f'rx="{_fmt(prim.radius * width)}" ry="{_fmt(prim.radius * height)}" '
                f'fill="none" stroke="{GRID_STROKE}" stroke-width="1" '
                f'stroke-dasharray="6 4"/>'
            )
    return parts


def overlay_svg(
    polygons: list[PolygonContour],
    lines: list[CompositionLine],
    grid: str | None = None,
    width: int = 1000,
    height: int = 1000,
) -> str:
    """Standalone SVG document with polygons, lines, and an optional grid."""
    body = []
    if grid is not None:
        body.extend(_grid_elements(grid, width, height))
    body.extend(_polygon_element(p, width, height) for p in polygons)
    body.extend(_line_element(ln, width, height) for ln in lines)
    content = "\n  ".join(body)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">\n  {content}\n</svg>\n'
    )
