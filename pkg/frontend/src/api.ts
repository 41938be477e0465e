// Thin HTTP client over the teaching service. All model state and planning
// come from the server; the UI performs no geometry or density math itself.

import type { CommandResponse, HeatmapResponse, StateResponse } from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ServiceError extends Error {
  constructor(
    public readonly kind: string,
    public readonly status: number,
    detail: string,
  ) {
    super(detail);
  }
}

async function parse<T>(response: Response): Promise<T> {
  const body = await response.json();
  if (!response.ok) {
    throw new ServiceError(body.error ?? "Unknown", response.status, body.detail ?? "");
  }
  return body as T;
}

export class ApiClient {
  constructor(
    private readonly base: string,
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private post<T>(path: string, payload?: unknown): Promise<T> {
    return this.fetchImpl(this.base + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: payload === undefined ? "{}" : JSON.stringify(payload),
    }).then((r) => parse<T>(r));
  }

  getState(): Promise<StateResponse> {
    return this.fetchImpl(this.base + "/state").then((r) => parse<StateResponse>(r));
  }

  sendCommand(text: string): Promise<CommandResponse> {
    return this.post<CommandResponse>("/command", { text });
  }

  moveObject(id: string, position: [number, number, number]): Promise<void> {
    return this.post("/scene", { id, position_m: position });
  }

  sendCue(): Promise<{ utterance: string; relation: string; demo_count: number }> {
    return this.post("/cue");
  }

  getHeatmap(relation: string, width = 48, height = 48): Promise<HeatmapResponse> {
    return this.fetchImpl(
      `${this.base}/model/${relation}/heatmap?grid=${width}x${height}`,
    ).then((r) => parse<HeatmapResponse>(r));
  }

  reset(): Promise<void> {
    return this.post("/reset");
  }
}
