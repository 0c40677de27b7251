/** Typed client for the pneugen work-directory API. Every number shown in the
 * UI originates from one of these responses; the app itself only applies
 * rendering transforms. */

export interface EmbeddingRow {
  id: number;
  dim1: number;
  dim2: number;
  mode: string;
}

export interface DesignParams {
  L: number;
  W: number;
  H: number;
  t: number;
  t_n: number;
  t_h: number;
  t_ab: number;
  t_b: number;
  N: number;
  theta: number;
  alpha: number;
  L_T: number;
  N1: number;
  N2: number;
  mode: string;
  cross_section: string;
}

export interface FeasibilityCheck {
  name: string;
  passed: boolean;
  margin: number;
  detail: string;
}

export interface FeasibilityReport {
  ok: boolean;
  checks: FeasibilityCheck[];
}

export interface DesignPayload {
  params: DesignParams;
  feasibility: FeasibilityReport;
  novelty?: number;
  repair_distance?: number;
  dependent_discrepancy?: number;
  neighbor_ids?: number[];
  dim1?: number;
  dim2?: number;
}

export interface GenerateResponse {
  designs: DesignPayload[];
  d_new: number;
}

export interface TrajectoryResponse {
  pressure_kpa: number;
  mode: string;
  tip_displacement_mm: number;
  points: number[][];
}

export interface HullReport {
  vertices: number[][];
  area: number;
  point_count: number;
  degenerate: boolean;
}

export interface MetricsResponse {
  novelty: { d_new: number; space: string; count: number };
  diversity: {
    generated_hull: HullReport;
    training_hull: HullReport;
    area_ratio: number | null;
    space?: string;
  };
  generated_mode_counts: Record<string, number>;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
  }

  /** A 409 means the work directory lost an artifact; the app should reload. */
  get staleWorkdir(): boolean {
    return this.status === 409;
  }
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  const response = await fetch(path, init);
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = await response.json();
      detail = typeof body.detail === "string" ? body.detail : JSON.stringify(body.detail);
    } catch {
      /* non-JSON error body; keep the status text */
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

function post<T>(path: string, body: unknown): Promise<T> {
  return request<T>(path, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(body),
  });
}

export async function getEmbedding(): Promise<EmbeddingRow[]> {
  const body = await request<{ rows: EmbeddingRow[] }>("/api/embedding");
  return body.rows;
}

export function decodePoint(x: number, y: number, k = 5): Promise<DesignPayload> {
  return post<DesignPayload>("/api/decode", { x, y, k });
}

export function generateDesigns(n: number, seed: number): Promise<GenerateResponse> {
  return post<GenerateResponse>("/api/generate", { n, seed });
}

export function getDesign(id: number): Promise<DesignPayload> {
  return request<DesignPayload>(`/api/design/${id}`);
}

export function getTrajectory(id: number, pressureKpa: number): Promise<TrajectoryResponse> {
  return request<TrajectoryResponse>(
    `/api/design/${id}/trajectory?pressure=${encodeURIComponent(pressureKpa)}`,
  );
}

export function getMetrics(): Promise<MetricsResponse> {
  return request<MetricsResponse>("/api/metrics");
}

export function meshUrl(id: number): string {
  return `/api/design/${id}/mesh`;
}

export function csgUrl(id: number): string {
  return `/api/design/${id}/csg`;
}
