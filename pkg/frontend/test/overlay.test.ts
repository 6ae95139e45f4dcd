import { describe, expect, it } from "vitest";

import type { CompositionResponse, LineJson } from "../src/api";
import { composeScene, segmentToPixels, topK } from "../src/overlay";

function line(rank: number): LineJson {
  return {
    normal: [0, 1],
    offset: 0.1 * (rank + 1),
    segment: [
      [0, 0.1 * (rank + 1)],
      [1, 0.1 * (rank + 1)],
    ],
    inliers: 40 - rank,
    inlier_fraction: 0.2,
    rank,
    polygons: [0, 1],
  };
}

function response(lines: LineJson[]): CompositionResponse {
  return {
    request: { prompt: null, boxes: [], epsilon: 0.01, seed: 0 },
    provider: "box_fallback",
    polygons: [
      { id: 0, label: "box_0", vertices: [[0, 0], [1, 0], [1, 1]], epsilon_used: 0.01 },
    ],
    lines,
    grids: {
      rule_of_thirds: [
        { type: "line", from: [1 / 3, 0], to: [1 / 3, 1] },
        { type: "line", from: [2 / 3, 0], to: [2 / 3, 1] },
        { type: "line", from: [0, 1 / 3], to: [1, 1 / 3] },
        { type: "line", from: [0, 2 / 3], to: [1, 2 / 3] },
      ],
      central_cross: [
        { type: "line", from: [0.5, 0], to: [0.5, 1] },
        { type: "line", from: [0, 0.5], to: [1, 0.5] },
      ],
      central_circle: [{ type: "circle", center: [0.5, 0.5], radius: 0.5 }],
    },
    config: {} as CompositionResponse["config"],
  };
}

describe("topK", () => {
  const lines = [0, 1, 2, 3, 4].map(line);

  it("keeps exactly the first k ranks", () => {
    expect(topK(lines, 3).map((l) => l.rank)).toEqual([0, 1, 2]);
    expect(topK(lines, 1).map((l) => l.rank)).toEqual([0]);
  });

  it("handles the slider ends", () => {
    expect(topK(lines, 0)).toEqual([]);
    expect(topK(lines, 99).map((l) => l.rank)).toEqual([0, 1, 2, 3, 4]);
  });

  it("does not depend on input order and does not mutate it", () => {
    const shuffled = [lines[3], lines[0], lines[4], lines[2], lines[1]];
    const before = shuffled.map((l) => l.rank);
    expect(topK(shuffled, 2).map((l) => l.rank)).toEqual([0, 1]);
    expect(shuffled.map((l) => l.rank)).toEqual(before);
  });
});

describe("composeScene", () => {
  const resp = response([0, 1, 2].map(line));

  it("applies the k slider to visible lines", () => {
    const scene = composeScene(resp, 1, { lines: true, grid: false, polygons: false }, "rule_of_thirds");
    expect(scene.lines.map((l) => l.rank)).toEqual([0]);
    expect(scene.grid).toEqual([]);
    expect(scene.polygons).toEqual([]);
  });

  it("toggles the grid independently of lines", () => {
    const scene = composeScene(resp, 3, { lines: false, grid: true, polygons: false }, "rule_of_thirds");
    expect(scene.lines).toEqual([]);
    expect(scene.grid).toHaveLength(4);
  });

  it("toggles polygons separately", () => {
    const scene = composeScene(resp, 3, { lines: true, grid: false, polygons: true }, "central_cross");
    expect(scene.polygons).toHaveLength(1);
    expect(scene.lines).toHaveLength(3);
  });

  it("selects the named grid kind", () => {
    const cross = composeScene(resp, 0, { lines: false, grid: true, polygons: false }, "central_cross");
    expect(cross.grid).toHaveLength(2);
    const circle = composeScene(resp, 0, { lines: false, grid: true, polygons: false }, "central_circle");
    expect(circle.grid).toEqual([{ type: "circle", center: [0.5, 0.5], radius: 0.5 }]);
  });

  it("returns no grid for an unknown kind", () => {
    const scene = composeScene(resp, 0, { lines: false, grid: true, polygons: false }, "nope");
    expect(scene.grid).toEqual([]);
  });
});

describe("segmentToPixels", () => {
  it("scales unit coordinates to the pane", () => {
    const [a, b] = segmentToPixels(
      [
        [0, 0],
        [1, 0.5],
      ],
      640,
      480
    );
    expect(a).toEqual({ x: 0, y: 0 });
    expect(b).toEqual({ x: 640, y: 240 });
  });
});
