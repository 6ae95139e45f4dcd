// Swatch rows from match-pair payloads. Rows carry the service's
// numbers untouched; a pair that is missing fields still gets a row so
// the list stays aligned with what the service returned.

import type { PairJson } from "./api";

export const EMPTY_FEEDBACK_TEXT = "no feedback yet";
export const PLACEHOLDER_TEXT = "(incomplete pair)";

export interface SwatchRow {
  pairIndex: number;
  referenceCss: string;
  canvasCss: string;
  lines: string[];
  score: string | null;
  placeholder: boolean;
}

function srgbCss(value: unknown): string | null {
  if (!Array.isArray(value) || value.length !== 3) return null;
  if (!value.every((v) => typeof v === "number" && Number.isFinite(v))) return null;
  return `rgb(${value[0]}, ${value[1]}, ${value[2]})`;
}

function scoreText(pair: Partial<PairJson>): string | null {
  const total = pair.score?.s_total;
  if (typeof total !== "number") return null;
  return `s_total ${total}`;
}

export function buildRows(pairs: Partial<PairJson>[], showScores: boolean): SwatchRow[] {
  return pairs.map((pair, index) => {
    const referenceCss = srgbCss(pair.reference?.srgb);
    const canvasCss = srgbCss(pair.canvas?.srgb);
    const score = scoreText(pair);
    const texts = Array.isArray(pair.feedback)
      ? pair.feedback.filter((f) => typeof f?.text === "string").map((f) => f.text)
      : null;
    if (referenceCss === null || canvasCss === null || score === null || texts === null) {
      return {
        pairIndex: index,
        referenceCss: referenceCss ?? "transparent",
        canvasCss: canvasCss ?? "transparent",
        lines: [PLACEHOLDER_TEXT],
        score: null,
        placeholder: true,
      };
    }
    return {
      pairIndex: index,
      referenceCss,
      canvasCss,
      lines: texts,
      score: showScores ? score : null,
      placeholder: false,
    };
  });
}

// Which pair's region contours are highlighted. Clicking a row toggles
// it; clicking another row moves the highlight there.
export class HighlightState {
  private selected: number | null = null;

  toggle(pairIndex: number): number | null {
    this.selected = this.selected === pairIndex ? null : pairIndex;
    return this.selected;
  }

  get current(): number | null {
    return this.selected;
  }
}
