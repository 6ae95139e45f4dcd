// Client-side composition of the overlay: which lines, grid and
// polygons are visible. The k slider filters a response we already
// hold; changing it never triggers another request.

import type { CompositionResponse, GridPrimitive, LineJson, PolygonJson } from "./api";
import type { PixelPoint } from "./boxes";

export interface OverlayToggles {
  lines: boolean;
  grid: boolean;
  polygons: boolean;
}

export interface OverlayScene {
  lines: LineJson[];
  grid: GridPrimitive[];
  polygons: PolygonJson[];
}

export function topK(lines: LineJson[], k: number): LineJson[] {
  return lines.filter((line) => line.rank < k).sort((a, b) => a.rank - b.rank);
}

export function composeScene(
  resp: CompositionResponse,
  kLines: number,
  toggles: OverlayToggles,
  gridKind: string
): OverlayScene {
  return {
    lines: toggles.lines ? topK(resp.lines, kLines) : [],
    grid: toggles.grid ? (resp.grids[gridKind] ?? []) : [],
    polygons: toggles.polygons ? resp.polygons : [],
  };
}

export function segmentToPixels(
  segment: [[number, number], [number, number]],
  paneWidth: number,
  paneHeight: number
): [PixelPoint, PixelPoint] {
  return [
    { x: segment[0][0] * paneWidth, y: segment[0][1] * paneHeight },
    { x: segment[1][0] * paneWidth, y: segment[1][1] * paneHeight },
  ];
}
