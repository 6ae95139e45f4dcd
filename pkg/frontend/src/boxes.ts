// Pointer gestures to normalized boxes and back. The service works in
// unit coordinates; panes work in device pixels. Round trips through
// the service must land within one device pixel of where the user drew.

export interface PixelPoint {
  x: number;
  y: number;
}

export interface NormalizedBox {
  x0: number;
  y0: number;
  x1: number;
  y1: number;
}

export interface PixelRect {
  x: number;
  y: number;
  width: number;
  height: number;
}

export const MIN_BOX_PX = 4;

function clamp(v: number, lo: number, hi: number): number {
  return Math.min(Math.max(v, lo), hi);
}

export function gestureToBox(
  down: PixelPoint,
  up: PixelPoint,
  paneWidth: number,
  paneHeight: number
): NormalizedBox | null {
  const left = clamp(Math.min(down.x, up.x), 0, paneWidth);
  const right = clamp(Math.max(down.x, up.x), 0, paneWidth);
  const top = clamp(Math.min(down.y, up.y), 0, paneHeight);
  const bottom = clamp(Math.max(down.y, up.y), 0, paneHeight);
  if (right - left < MIN_BOX_PX || bottom - top < MIN_BOX_PX) {
    return null;
  }
  return {
    x0: left / paneWidth,
    y0: top / paneHeight,
    x1: right / paneWidth,
    y1: bottom / paneHeight,
  };
}

export function boxToPixels(box: NormalizedBox, paneWidth: number, paneHeight: number): PixelRect {
  const x = Math.round(box.x0 * paneWidth);
  const y = Math.round(box.y0 * paneHeight);
  return {
    x,
    y,
    width: Math.round(box.x1 * paneWidth) - x,
    height: Math.round(box.y1 * paneHeight) - y,
  };
}

export function boxToWire(box: NormalizedBox): [number, number, number, number] {
  return [box.x0, box.y0, box.x1, box.y1];
}

export function wireToBox(wire: number[]): NormalizedBox {
  return { x0: wire[0], y0: wire[1], x1: wire[2], y1: wire[3] };
}
