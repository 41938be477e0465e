// Session controller: mirrors the server state, serializes user actions,
// and exposes a render-ready view. Drag updates are applied optimistically
// and reconciled against the authoritative state once the server responds.

import { ApiClient, ServiceError } from "./api.js";
import type { HeatmapResponse, StateResponse } from "./types.js";

export interface ViewState {
  state: StateResponse | null;
  heatmap: HeatmapResponse | null;
  selectedRelation: string | null;
  error: string | null;
  dragging: string | null;
  // positions overlaid on the server scene while a drag is in flight
  optimistic: Map<string, [number, number, number]>;
}

export class SessionController {
  readonly view: ViewState = {
    state: null,
    heatmap: null,
    selectedRelation: null,
    error: null,
    dragging: null,
    optimistic: new Map(),
  };

  private listeners: (() => void)[] = [];

  constructor(private readonly api: ApiClient) {}

  onChange(listener: () => void): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const l of this.listeners) l();
  }

  get utterances(): { source: string; text: string }[] {
    return this.view.state?.events ?? [];
  }

  get cueEnabled(): boolean {
    return this.view.state?.cue_available ?? false;
  }

  demoCount(relation: string): number {
    return this.view.state?.demo_counts[relation] ?? 0;
  }

  /** Effective position of an object: optimistic override or server pose. */
  positionOf(id: string): [number, number, number] | null {
    const opt = this.view.optimistic.get(id);
    if (opt) return opt;
    const inst = this.view.state?.scene.instances.find((i) => i.id === id);
    return inst ? inst.position_m : null;
  }

  async refresh(): Promise<void> {
    this.view.state = await this.api.getState();
    this.notify();
  }

  async sendCommand(text: string): Promise<void> {
    this.view.error = null;
    try {
      const response = await this.api.sendCommand(text);
      this.view.selectedRelation = response.relation;
      await this.refresh();
      await this.refreshHeatmap();
    } catch (err) {
      this.fail(err);
      await this.refresh();
    }
  }

  /** Optimistic drag preview; the canvas follows the pointer locally. */
  dragPreview(id: string, x: number, y: number): void {
    const current = this.positionOf(id);
    if (!current) return;
    this.view.dragging = id;
    this.view.optimistic.set(id, [x, y, current[2]]);
    this.notify();
  }

  /** Commit a drag: POST the pose, then reconcile with the server scene. */
  async dragObject(id: string, x: number, y: number): Promise<void> {
    const current = this.positionOf(id);
    if (!current) return;
    this.dragPreview(id, x, y);
    this.view.error = null;
    try {
      await this.api.moveObject(id, [x, y, current[2]]);
    } catch (err) {
      this.fail(err);
    } finally {
      this.view.dragging = null;
      this.view.optimistic.delete(id);
      await this.refresh();
    }
  }

  async sendCue(): Promise<void> {
    this.view.error = null;
    try {
      const response = await this.api.sendCue();
      this.view.selectedRelation = response.relation;
      await this.refresh();
      await this.refreshHeatmap();
    } catch (err) {
      this.fail(err);
      await this.refresh();
    }
  }

  async selectRelation(relation: string | null): Promise<void> {
    this.view.selectedRelation = relation;
    await this.refreshHeatmap();
  }

  private async refreshHeatmap(): Promise<void> {
    const relation = this.view.selectedRelation;
    if (!relation || this.demoCount(relation) === 0) {
      this.view.heatmap = null;
      this.notify();
      return;
    }
    try {
      this.view.heatmap = await this.api.getHeatmap(relation);
    } catch (err) {
      // a 404 simply means no model yet; anything else surfaces inline
      if (!(err instanceof ServiceError && err.status === 404)) this.fail(err);
      this.view.heatmap = null;
    }
    this.notify();
  }

  async reset(): Promise<void> {
    await this.api.reset();
    this.view.heatmap = null;
    this.view.selectedRelation = null;
    this.view.error = null;
    await this.refresh();
  }

  private fail(err: unknown): void {
    this.view.error =
      err instanceof ServiceError ? `${err.kind}: ${err.message}` : String(err);
    this.notify();
  }
}
