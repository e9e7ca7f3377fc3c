/** Typed client for the design service; superseded requests are aborted. */

import type {
  ApiError,
  Axis,
  DesignsResponse,
  OptimizedSearchResponse,
  ParameterSet,
} from "./types.js";

export class ApiRequestError extends Error {
  readonly status: number;
  readonly payload: ApiError;

  constructor(status: number, payload: ApiError) {
    super(payload.message ?? `request failed (${status})`);
    this.status = status;
    this.payload = payload;
  }
}

export class ApiClient {
  private readonly base: string;
  private inflight = new Map<string, AbortController>();

  constructor(base = "") {
    this.base = base.replace(/\/+$/, "");
  }

  /** POST helper; a new call with the same slot aborts the previous one. */
  private async post<T>(slot: string, path: string, body: unknown): Promise<T> {
    this.inflight.get(slot)?.abort();
    const controller = new AbortController();
    this.inflight.set(slot, controller);
    try {
      const response = await fetch(`${this.base}${path}`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(body),
        signal: controller.signal,
      });
      const payload = await response.json();
      if (!response.ok) {
        throw new ApiRequestError(response.status, payload as ApiError);
      }
      return payload as T;
    } finally {
      if (this.inflight.get(slot) === controller) {
        this.inflight.delete(slot);
      }
    }
  }

  health(): Promise<{ status: string; version: string; engine: string }> {
    return fetch(`${this.base}/api/v1/health`).then((r) => r.json());
  }

  searchOptimized(
    params: ParameterSet,
    axis: Axis,
    range: [number, number],
    optimizeYOnly: boolean,
  ): Promise<OptimizedSearchResponse> {
    return this.post("curve", "/api/v1/search/optimized", {
      ...params,
      axis,
      range,
      optimize_y_only: optimizeYOnly,
    });
  }

  designs(
    params: ParameterSet,
    fixes: { participants?: number; measurements?: number },
    includeIndividual: boolean,
    slot: string,
  ): Promise<DesignsResponse> {
    return this.post(slot, "/api/v1/designs", {
      ...params,
      ...fixes,
      include_individual: includeIndividual,
    });
  }

  uploadSequences(content: string): Promise<{ k: number; count: number; sequences: number[][] }> {
    return this.post("upload", "/api/v1/sequences/upload", { content });
  }
}
