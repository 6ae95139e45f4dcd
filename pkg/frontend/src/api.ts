// Typed client for the /v1 session API. Everything the UI shows comes
// straight out of these response payloads; nothing is recomputed here.

export interface RansacJson {
  theta_dis: number;
  theta_inl: number;
  iterations: number;
  seed: number;
  max_lines: number;
}

export interface ConfigJson {
  epsilon: number;
  ransac: RansacJson;
  k_lines: number;
  palette_k: number;
  blur: { filter: string; kernel_size: number };
  tolerances: { value: number; hue: number; saturation: number };
}

export interface SessionInfo {
  id: string;
  width: number;
  height: number;
  config: ConfigJson;
}

export interface CanvasInfo {
  width: number;
  height: number;
  resampled: boolean;
  canvas_version: number;
  config: ConfigJson;
}

export interface LineJson {
  normal: [number, number];
  offset: number;
  segment: [[number, number], [number, number]] | null;
  inliers: number;
  inlier_fraction: number;
  rank: number;
  polygons: number[];
}

export type GridPrimitive =
  | { type: "line"; from: [number, number]; to: [number, number] }
  | { type: "circle"; center: [number, number]; radius: number };

export interface PolygonJson {
  id: number;
  label: string;
  vertices: [number, number][];
  epsilon_used: number;
}

export interface CompositionRequestBody {
  prompt?: string;
  boxes?: number[][];
  epsilon?: number;
  seed?: number;
}

export interface CompositionResponse {
  request: { prompt: string | null; boxes: number[][]; epsilon: number; seed: number };
  provider: string;
  polygons: PolygonJson[];
  lines: LineJson[];
  grids: Record<string, GridPrimitive[]>;
  config: ConfigJson;
}

export interface ClusterJson {
  lab: [number, number, number];
  srgb: [number, number, number];
  pixel_fraction: number;
  bbox: [number, number, number, number];
}

export interface FeedbackItem {
  dimension: string;
  direction: string;
  magnitude: number;
  text: string;
  target?: string;
}

export interface PairJson {
  reference_index: number;
  canvas_index: number;
  reference: ClusterJson;
  canvas: ClusterJson;
  score: { s_value: number; s_spatial: number; s_total: number };
  feedback: FeedbackItem[];
  reference_contours: [number, number][][];
  canvas_contours: [number, number][][];
}

export interface FeedbackResponse {
  mode: string;
  request: { k: number; seed: number };
  canvas_version: number;
  pairs: PairJson[];
  config: ConfigJson;
}

export class ServiceError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string
  ) {
    super(message);
    this.name = "ServiceError";
  }
}

async function raiseFor(resp: Response): Promise<never> {
  let code = "UnknownError";
  let message = `HTTP ${resp.status}`;
  try {
    const body = await resp.json();
    if (body && body.error) {
      code = String(body.error.code ?? code);
      message = String(body.error.message ?? message);
    }
  } catch {
    // non-JSON error body, keep the defaults
  }
  throw new ServiceError(resp.status, code, message);
}

export class ApiClient {
  constructor(
    private base = "",
    private fetchFn: typeof fetch = fetch
  ) {}

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchFn(`${this.base}${path}`, init);
    if (!resp.ok) await raiseFor(resp);
    return (await resp.json()) as T;
  }

  private async png(path: string): Promise<Blob> {
    const resp = await this.fetchFn(`${this.base}${path}`);
    if (!resp.ok) await raiseFor(resp);
    return await resp.blob();
  }

  createSession(png: BodyInit): Promise<SessionInfo> {
    return this.json("/v1/sessions", {
      method: "POST",
      headers: { "Content-Type": "image/png" },
      body: png,
    });
  }

  uploadCanvas(sessionId: string, png: BodyInit): Promise<CanvasInfo> {
    return this.json(`/v1/sessions/${sessionId}/canvas`, {
      method: "POST",
      headers: { "Content-Type": "image/png" },
      body: png,
    });
  }

  patchConfig(sessionId: string, patch: object): Promise<{ config: ConfigJson }> {
    return this.json(`/v1/sessions/${sessionId}/config`, {
      method: "PATCH",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(patch),
    });
  }

  composition(sessionId: string, body: CompositionRequestBody): Promise<CompositionResponse> {
    return this.json(`/v1/sessions/${sessionId}/composition`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  feedback(
    sessionId: string,
    mode: "value" | "color",
    k?: number,
    seed?: number
  ): Promise<FeedbackResponse> {
    const query = new URLSearchParams();
    if (k !== undefined) query.set("k", String(k));
    if (seed !== undefined) query.set("seed", String(seed));
    const qs = query.toString();
    return this.json(`/v1/sessions/${sessionId}/feedback/${mode}${qs ? `?${qs}` : ""}`);
  }

  valueGuidance(
    sessionId: string,
    opts: { target?: string; filter?: string; kernelSize?: number } = {}
  ): Promise<Blob> {
    const query = new URLSearchParams();
    if (opts.target) query.set("target", opts.target);
    if (opts.filter) query.set("filter", opts.filter);
    if (opts.kernelSize !== undefined) query.set("kernel_size", String(opts.kernelSize));
    const qs = query.toString();
    return this.png(`/v1/sessions/${sessionId}/guidance/value${qs ? `?${qs}` : ""}`);
  }

  isolate(sessionId: string, x: number, y: number): Promise<Blob> {
    return this.png(`/v1/sessions/${sessionId}/isolate?x=${x}&y=${y}`);
  }
}

// One in-flight request per category; a later call supersedes an
// earlier one, whose result must then be dropped instead of applied.
export class LatestWins {
  private tokens = new Map<string, number>();

  begin(category: string): number {
    const token = (this.tokens.get(category) ?? 0) + 1;
    this.tokens.set(category, token);
    return token;
  }

  isCurrent(category: string, token: number): boolean {
    return this.tokens.get(category) === token;
  }
}
