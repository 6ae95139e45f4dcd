// Page wiring: panes, sliders, tabs, and the fetch loop. All analysis
// lives server-side; this file only draws what the service returned.

import { ApiClient, LatestWins, ServiceError } from "./api";
import type { CompositionResponse, FeedbackResponse, PairJson } from "./api";
import { boxToPixels, gestureToBox, boxToWire } from "./boxes";
import type { NormalizedBox, PixelPoint } from "./boxes";
import { EMPTY_FEEDBACK_TEXT, HighlightState, buildRows } from "./feedback";
import { composeScene, segmentToPixels } from "./overlay";
import {
  BLUR_FILTERS,
  EPSILON_RANGE,
  GRID_KINDS,
  K_LINES_RANGE,
  KERNEL_RANGE,
  addBox,
  clearBoxes,
  initialState,
  setBlur,
  setEpsilon,
  setKLines,
  setOverlay,
  setTab,
  type Tab,
  type UiState,
} from "./state";

const client = new ApiClient("");
const gate = new LatestWins();
const highlight = new HighlightState();

let state: UiState = initialState();
let lastComposition: CompositionResponse | null = null;
let lastFeedback: FeedbackResponse | null = null;
let dragStart: PixelPoint | null = null;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function setStatus(message: string): void {
  el<HTMLElement>("status").textContent = message;
}

function describeError(err: unknown): string {
  if (err instanceof ServiceError) return `${err.code}: ${err.message}`;
  return String(err);
}

// ---------------------------------------------------------------- panes

function paneSize(canvas: HTMLCanvasElement): [number, number] {
  return [canvas.width, canvas.height];
}

function drawOverlay(): void {
  const canvas = el<HTMLCanvasElement>("reference-overlay");
  const ctx = canvas.getContext("2d")!;
  const [w, h] = paneSize(canvas);
  ctx.clearRect(0, 0, w, h);

  // user boxes, always visible while drawing
  ctx.strokeStyle = "#2f6fde";
  ctx.setLineDash([6, 4]);
  ctx.lineWidth = 1.5;
  for (const box of state.boxes) {
    const rect = boxToPixels(box, w, h);
    ctx.strokeRect(rect.x, rect.y, rect.width, rect.height);
  }
  ctx.setLineDash([]);

  if (lastComposition) {
    const scene = composeScene(lastComposition, state.kLines, state.overlays, state.gridKind);
    ctx.strokeStyle = "#7f7f7f";
    ctx.lineWidth = 1;
    for (const prim of scene.grid) {
      ctx.beginPath();
      if (prim.type === "line") {
        const [a, b] = segmentToPixels([prim.from, prim.to], w, h);
        ctx.moveTo(a.x, a.y);
        ctx.lineTo(b.x, b.y);
      } else {
        ctx.arc(prim.center[0] * w, prim.center[1] * h, prim.radius * Math.min(w, h), 0, Math.PI * 2);
      }
      ctx.stroke();
    }
    ctx.strokeStyle = "#3f9b57";
    for (const poly of scene.polygons) {
      ctx.beginPath();
      poly.vertices.forEach(([x, y], i) => {
        if (i === 0) ctx.moveTo(x * w, y * h);
        else ctx.lineTo(x * w, y * h);
      });
      ctx.closePath();
      ctx.stroke();
    }
    ctx.strokeStyle = "#e5484d";
    ctx.lineWidth = 2;
    for (const line of scene.lines) {
      if (!line.segment) continue;
      const [a, b] = segmentToPixels(line.segment, w, h);
      ctx.beginPath();
      ctx.moveTo(a.x, a.y);
      ctx.lineTo(b.x, b.y);
      ctx.stroke();
    }
  }

  drawContours(ctx, w, h, "reference");
}

function drawContours(
  ctx: CanvasRenderingContext2D,
  w: number,
  h: number,
  side: "reference" | "canvas"
): void {
  const selected = highlight.current;
  if (selected === null || !lastFeedback) return;
  const pair: PairJson | undefined = lastFeedback.pairs[selected];
  if (!pair) return;
  const contours = side === "reference" ? pair.reference_contours : pair.canvas_contours;
  ctx.strokeStyle = "#f5a623";
  ctx.lineWidth = 2;
  for (const contour of contours ?? []) {
    ctx.beginPath();
    contour.forEach(([x, y], i) => {
      if (i === 0) ctx.moveTo(x * w, y * h);
      else ctx.lineTo(x * w, y * h);
    });
    ctx.closePath();
    ctx.stroke();
  }
}

function drawCanvasOverlay(): void {
  const canvas = el<HTMLCanvasElement>("canvas-overlay");
  const ctx = canvas.getContext("2d")!;
  const [w, h] = paneSize(canvas);
  ctx.clearRect(0, 0, w, h);
  drawContours(ctx, w, h, "canvas");
}

function fitOverlayTo(img: HTMLImageElement, overlay: HTMLCanvasElement): void {
  overlay.width = img.clientWidth;
  overlay.height = img.clientHeight;
}

// ------------------------------------------------------------- requests

async function requestComposition(): Promise<void> {
  if (!state.sessionId) return;
  const token = gate.begin("composition");
  setStatus("fitting composition lines...");
  try {
    const resp = await client.composition(state.sessionId, {
      boxes: state.boxes.map(boxToWire),
      epsilon: state.epsilon,
    });
    if (!gate.isCurrent("composition", token)) return; // superseded
    lastComposition = resp;
    setStatus(`${resp.lines.length} lines from ${resp.polygons.length} polygons (${resp.provider})`);
    drawOverlay();
  } catch (err) {
    if (gate.isCurrent("composition", token)) setStatus(describeError(err));
  }
}

async function requestFeedback(mode: "value" | "color"): Promise<void> {
  if (!state.sessionId) return;
  const token = gate.begin("feedback");
  setStatus(`matching ${mode} palettes...`);
  try {
    const resp = await client.feedback(state.sessionId, mode);
    if (!gate.isCurrent("feedback", token)) return;
    lastFeedback = resp;
    setStatus(`${resp.pairs.length} pairs against canvas v${resp.canvas_version}`);
    renderFeedbackRows();
  } catch (err) {
    if (gate.isCurrent("feedback", token)) setStatus(describeError(err));
  }
}

async function requestSquint(): Promise<void> {
  if (!state.sessionId) return;
  const token = gate.begin("squint");
  try {
    const blob = await client.valueGuidance(state.sessionId, {
      filter: state.blurFilter,
      kernelSize: state.blurKernel,
    });
    if (!gate.isCurrent("squint", token)) return;
    el<HTMLImageElement>("squint-img").src = URL.createObjectURL(blob);
  } catch (err) {
    if (gate.isCurrent("squint", token)) setStatus(describeError(err));
  }
}

// ------------------------------------------------------------- feedback

function renderFeedbackRows(): void {
  const list = el<HTMLElement>("feedback-rows");
  list.textContent = "";
  const pairs = lastFeedback?.pairs ?? [];
  if (pairs.length === 0) {
    const empty = document.createElement("p");
    empty.className = "empty";
    empty.textContent = EMPTY_FEEDBACK_TEXT;
    list.append(empty);
    return;
  }
  for (const row of buildRows(pairs, state.overlays.scores)) {
    const item = document.createElement("div");
    item.className = "swatch-row" + (row.placeholder ? " placeholder" : "");
    if (highlight.current === row.pairIndex) item.classList.add("selected");

    const ref = document.createElement("span");
    ref.className = "swatch";
    ref.style.background = row.referenceCss;
    const cur = document.createElement("span");
    cur.className = "swatch";
    cur.style.background = row.canvasCss;

    const text = document.createElement("span");
    text.className = "advice";
    text.textContent = row.lines.join(" / ") + (row.score ? `  [${row.score}]` : "");

    item.append(ref, cur, text);
    item.addEventListener("click", () => {
      state = { ...state, selectedPair: highlight.toggle(row.pairIndex) };
      renderFeedbackRows();
      drawOverlay();
      drawCanvasOverlay();
    });
    list.append(item);
  }
}

// ------------------------------------------------------------ bootstrap

function switchTab(tab: Tab): void {
  state = setTab(state, tab);
  for (const name of ["composition", "value", "color"] as const) {
    el<HTMLElement>(`panel-${name}`).hidden = name !== tab;
    el<HTMLButtonElement>(`tab-${name}`).classList.toggle("active", name === tab);
  }
  // swatch rows are shared by the value and color tabs
  el<HTMLElement>("panel-feedback").hidden = tab === "composition";
  if (tab === "value") {
    void requestSquint();
    void requestFeedback("value");
  } else if (tab === "color") {
    void requestFeedback("color");
  }
}

async function openReference(file: File): Promise<void> {
  try {
    const bytes = new Uint8Array(await file.arrayBuffer());
    const info = await client.createSession(bytes);
    state = clearBoxes({ ...state, sessionId: info.id });
    lastComposition = null;
    lastFeedback = null;
    const img = el<HTMLImageElement>("reference-img");
    img.src = URL.createObjectURL(file);
    img.onload = () => {
      fitOverlayTo(img, el<HTMLCanvasElement>("reference-overlay"));
      drawOverlay();
    };
    setStatus(`session ${info.id.slice(0, 8)} (${info.width}x${info.height})`);
  } catch (err) {
    setStatus(describeError(err));
  }
}

async function syncSnapshot(file: File): Promise<void> {
  if (!state.sessionId) {
    setStatus("open a reference first");
    return;
  }
  try {
    const bytes = new Uint8Array(await file.arrayBuffer());
    const info = await client.uploadCanvas(state.sessionId, bytes);
    const img = el<HTMLImageElement>("canvas-img");
    img.src = URL.createObjectURL(file);
    img.onload = () => fitOverlayTo(img, el<HTMLCanvasElement>("canvas-overlay"));
    setStatus(
      `canvas v${info.canvas_version}` + (info.resampled ? " (letterboxed to reference size)" : "")
    );
    if (state.tab !== "composition") void requestFeedback(state.tab);
  } catch (err) {
    setStatus(describeError(err));
  }
}

function wirePointerHandlers(): void {
  const overlay = el<HTMLCanvasElement>("reference-overlay");
  overlay.addEventListener("pointerdown", (ev) => {
    if (state.tab !== "composition") return;
    dragStart = { x: ev.offsetX, y: ev.offsetY };
  });
  overlay.addEventListener("pointerup", (ev) => {
    if (!dragStart) return;
    const box: NormalizedBox | null = gestureToBox(
      dragStart,
      { x: ev.offsetX, y: ev.offsetY },
      overlay.width,
      overlay.height
    );
    dragStart = null;
    if (!box) return; // too small to mean anything
    state = addBox(state, box);
    drawOverlay();
    void requestComposition();
  });
}

function wireControls(): void {
  const epsilon = el<HTMLInputElement>("epsilon-slider");
  epsilon.min = String(EPSILON_RANGE[0]);
  epsilon.max = String(EPSILON_RANGE[1]);
  epsilon.step = "0.001";
  epsilon.value = String(state.epsilon);
  epsilon.addEventListener("change", () => {
    state = setEpsilon(state, Number(epsilon.value));
    void requestComposition();
  });

  const kSlider = el<HTMLInputElement>("k-slider");
  kSlider.min = String(K_LINES_RANGE[0]);
  kSlider.max = String(K_LINES_RANGE[1]);
  kSlider.value = String(state.kLines);
  kSlider.addEventListener("input", () => {
    // filtering happens on the response we already hold
    state = setKLines(state, Number(kSlider.value));
    el<HTMLElement>("k-value").textContent = String(state.kLines);
    drawOverlay();
  });

  const filterSelect = el<HTMLSelectElement>("blur-filter");
  for (const name of BLUR_FILTERS) {
    const option = document.createElement("option");
    option.value = name;
    option.textContent = name;
    filterSelect.append(option);
  }
  const kernelSlider = el<HTMLInputElement>("kernel-slider");
  kernelSlider.min = String(KERNEL_RANGE[0]);
  kernelSlider.max = String(KERNEL_RANGE[1]);
  kernelSlider.step = "0.1";
  kernelSlider.value = String(state.blurKernel);
  const onBlurChange = () => {
    state = setBlur(state, filterSelect.value, Number(kernelSlider.value));
    void requestSquint();
  };
  filterSelect.addEventListener("change", onBlurChange);
  kernelSlider.addEventListener("change", onBlurChange);

  const gridSelect = el<HTMLSelectElement>("grid-kind");
  for (const kind of GRID_KINDS) {
    const option = document.createElement("option");
    option.value = kind;
    option.textContent = kind.split("_").join(" ");
    gridSelect.append(option);
  }
  gridSelect.addEventListener("change", () => {
    state = { ...state, gridKind: gridSelect.value };
    drawOverlay();
  });

  for (const key of ["lines", "grid", "polygons"] as const) {
    const toggle = el<HTMLInputElement>(`toggle-${key}`);
    toggle.checked = state.overlays[key];
    toggle.addEventListener("change", () => {
      state = setOverlay(state, key, toggle.checked);
      drawOverlay();
    });
  }
  const scores = el<HTMLInputElement>("toggle-scores");
  scores.checked = state.overlays.scores;
  scores.addEventListener("change", () => {
    state = setOverlay(state, "scores", scores.checked);
    renderFeedbackRows();
  });

  el<HTMLButtonElement>("clear-boxes").addEventListener("click", () => {
    state = clearBoxes(state);
    drawOverlay();
    void requestComposition();
  });

  el<HTMLInputElement>("reference-file").addEventListener("change", (ev) => {
    const file = (ev.target as HTMLInputElement).files?.[0];
    if (file) void openReference(file);
  });
  el<HTMLInputElement>("canvas-file").addEventListener("change", (ev) => {
    const file = (ev.target as HTMLInputElement).files?.[0];
    if (file) void syncSnapshot(file);
  });

  for (const name of ["composition", "value", "color"] as const) {
    el<HTMLButtonElement>(`tab-${name}`).addEventListener("click", () => switchTab(name));
  }
}

function bootstrap(): void {
  wireControls();
  wirePointerHandlers();
  switchTab("composition");
  setStatus("open a reference image to start");
}

if (document.readyState === "loading") {
  document.addEventListener("DOMContentLoaded", bootstrap);
} else {
  bootstrap();
}
