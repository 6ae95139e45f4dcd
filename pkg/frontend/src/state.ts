// UI state and the slider ranges the service will actually accept.
// Updaters return fresh objects; handlers re-render from the result.

import type { NormalizedBox } from "./boxes";

export type Tab = "composition" | "value" | "color";

export const EPSILON_RANGE: [number, number] = [0.001, 0.2];
export const K_LINES_RANGE: [number, number] = [1, 16];
export const KERNEL_RANGE: [number, number] = [1.5, 4.9]; // service rejects outside this
export const BLUR_FILTERS = ["gaussian", "bilateral", "median"] as const;
export const GRID_KINDS = ["rule_of_thirds", "central_cross", "central_circle"] as const;

export interface OverlayVisibility {
  lines: boolean;
  grid: boolean;
  polygons: boolean;
  scores: boolean;
}

export interface UiState {
  sessionId: string | null;
  tab: Tab;
  epsilon: number;
  kLines: number;
  blurFilter: string;
  blurKernel: number;
  gridKind: string;
  boxes: NormalizedBox[];
  selectedPair: number | null;
  overlays: OverlayVisibility;
}

export function initialState(): UiState {
  return {
    sessionId: null,
    tab: "composition",
    epsilon: 0.01,
    kLines: 4,
    blurFilter: "gaussian",
    blurKernel: 2.5,
    gridKind: "rule_of_thirds",
    boxes: [],
    selectedPair: null,
    // numeric scores stay hidden unless asked for
    overlays: { lines: true, grid: false, polygons: true, scores: false },
  };
}

function clamp(v: number, [lo, hi]: [number, number]): number {
  return Math.min(Math.max(v, lo), hi);
}

export function setTab(state: UiState, tab: Tab): UiState {
  return { ...state, tab };
}

export function setEpsilon(state: UiState, epsilon: number): UiState {
  return { ...state, epsilon: clamp(epsilon, EPSILON_RANGE) };
}

export function setKLines(state: UiState, k: number): UiState {
  return { ...state, kLines: Math.round(clamp(k, K_LINES_RANGE)) };
}

export function setBlur(state: UiState, filter: string, kernel: number): UiState {
  if (!(BLUR_FILTERS as readonly string[]).includes(filter)) {
    throw new Error(`unknown blur filter ${filter}`);
  }
  return { ...state, blurFilter: filter, blurKernel: clamp(kernel, KERNEL_RANGE) };
}

export function addBox(state: UiState, box: NormalizedBox): UiState {
  return { ...state, boxes: [...state.boxes, box] };
}

export function clearBoxes(state: UiState): UiState {
  return { ...state, boxes: [] };
}

export function setOverlay(
  state: UiState,
  key: keyof OverlayVisibility,
  visible: boolean
): UiState {
  return { ...state, overlays: { ...state.overlays, [key]: visible } };
}
