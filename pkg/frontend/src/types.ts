// JSON shapes exchanged with the teaching service.

export interface SceneInstance {
  id: string;
  position_m: [number, number, number];
  orientation_wxyz: [number, number, number, number];
}

export interface SceneJson {
  timestamp: number;
  instances: SceneInstance[];
}

export interface ObjectInfo {
  id: string;
  name: string;
  extents_m: [number, number, number];
}

export interface WorkspaceJson {
  bounds: [number[], number[]];
  tables: [number[], number[]][];
}

export interface EventEntry {
  source: "human" | "robot";
  text: string;
}

export interface StateResponse {
  scene: SceneJson;
  objects: ObjectInfo[];
  workspace: WorkspaceJson;
  events: EventEntry[];
  demo_counts: Record<string, number>;
  pending: boolean;
  pending_relation: string | null;
  cue_available: boolean;
  last_command: { relation: string; target: string; references: string[] } | null;
  last_plan: { status: string; chosen: number[] | null } | null;
}

export interface CommandResponse {
  status: "executed" | "query";
  utterance: string;
  relation: string;
  target: string;
  references: string[];
  position?: number[];
  reason?: string;
}

export interface HeatmapResponse {
  relation: string;
  width: number;
  height: number;
  x_min: number;
  x_max: number;
  y_min: number;
  y_max: number;
  h_world: number;
  values: number[];
}

export interface ApiError {
  error: string;
  detail: string;
}
