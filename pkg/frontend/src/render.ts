// Top-down 2D scene rendering. Everything drawn here comes from the server
// state; heights appear as labels since placement is effectively 2.5D.

import {
  CHOSEN_COLOR,
  FAILED_COLOR,
  OBJECT_FILL,
  REFERENCE_FILL,
  TABLE_FILL,
  TARGET_FILL,
  heatColor,
} from "./colors.js";
import type { SessionController } from "./controller.js";

// structural subset of CanvasRenderingContext2D so tests can stub it
export interface Draw2D {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  globalAlpha: number;
  lineWidth: number;
  font: string;
  textAlign: CanvasTextAlign;
  clearRect(x: number, y: number, w: number, h: number): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  strokeRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  fill(): void;
  stroke(): void;
  save(): void;
  restore(): void;
  translate(x: number, y: number): void;
  rotate(rad: number): void;
  fillText(text: string, x: number, y: number): void;
}

export interface Camera {
  widthPx: number;
  heightPx: number;
  scale: number; // px per meter
  cx: number; // world origin in screen coords
  cy: number;
}

export function fitCamera(
  bounds: [number[], number[]],
  widthPx: number,
  heightPx: number,
): Camera {
  const [lo, hi] = bounds;
  const worldW = hi[0] - lo[0];
  const worldH = hi[1] - lo[1];
  const scale = 0.92 * Math.min(widthPx / worldW, heightPx / worldH);
  const midX = (lo[0] + hi[0]) / 2;
  const midY = (lo[1] + hi[1]) / 2;
  return {
    widthPx,
    heightPx,
    scale,
    cx: widthPx / 2 - midX * scale,
    cy: heightPx / 2 + midY * scale,
  };
}

export function toScreen(cam: Camera, x: number, y: number): [number, number] {
  // +y in the world ("behind") points up on the screen
  return [cam.cx + x * cam.scale, cam.cy - y * cam.scale];
}

function yawOf(q: [number, number, number, number]): number {
  const [w, x, y, z] = q;
  return Math.atan2(2 * (w * z + x * y), 1 - 2 * (y * y + z * z));
}

export function renderScene(ctx: Draw2D, cam: Camera, controller: SessionController): void {
  const view = controller.view;
  const state = view.state;
  ctx.clearRect(0, 0, cam.widthPx, cam.heightPx);
  if (!state) return;

  // tables
  for (const [lo, hi] of state.workspace.tables) {
    const [x0, y0] = toScreen(cam, lo[0], hi[1]);
    ctx.fillStyle = TABLE_FILL;
    ctx.fillRect(x0, y0, (hi[0] - lo[0]) * cam.scale, (hi[1] - lo[1]) * cam.scale);
    ctx.strokeStyle = "#b0a98f";
    ctx.lineWidth = 2;
    ctx.strokeRect(x0, y0, (hi[0] - lo[0]) * cam.scale, (hi[1] - lo[1]) * cam.scale);
  }

  // heatmap overlay under the objects, normalized to its own maximum
  const heat = view.heatmap;
  if (heat) {
    const peak = Math.max(...heat.values);
    if (peak > 0) {
      const cellW = ((heat.x_max - heat.x_min) / (heat.width - 1)) * cam.scale;
      const cellH = ((heat.y_max - heat.y_min) / (heat.height - 1)) * cam.scale;
      for (let iy = 0; iy < heat.height; iy++) {
        for (let ix = 0; ix < heat.width; ix++) {
          const t = heat.values[iy * heat.width + ix] / peak;
          if (t < 0.01) continue;
          const wx = heat.x_min + (ix * (heat.x_max - heat.x_min)) / (heat.width - 1);
          const wy = heat.y_min + (iy * (heat.y_max - heat.y_min)) / (heat.height - 1);
          const [sx, sy] = toScreen(cam, wx, wy);
          ctx.globalAlpha = 0.35 + 0.4 * t;
          ctx.fillStyle = heatColor(t);
          ctx.fillRect(sx - cellW / 2, sy - cellH / 2, cellW, cellH);
        }
      }
      ctx.globalAlpha = 1;
    }
  }

  const command = state.last_command;
  const references = new Set(command?.references ?? []);
  const target = command?.target ?? null;

  // objects as yaw-rotated footprints, to scale
  for (const inst of state.scene.instances) {
    const info = state.objects.find((o) => o.id === inst.id);
    if (!info) continue;
    const pos = controller.positionOf(inst.id) ?? inst.position_m;
    const [sx, sy] = toScreen(cam, pos[0], pos[1]);
    const w = info.extents_m[0] * cam.scale;
    const h = info.extents_m[1] * cam.scale;
    ctx.save();
    ctx.translate(sx, sy);
    ctx.rotate(-yawOf(inst.orientation_wxyz));
    ctx.fillStyle =
      inst.id === target ? TARGET_FILL : references.has(inst.id) ? REFERENCE_FILL : OBJECT_FILL;
    ctx.fillRect(-w / 2, -h / 2, w, h);
    ctx.strokeStyle = view.dragging === inst.id ? "#333333" : "#777777";
    ctx.lineWidth = view.dragging === inst.id ? 3 : 1.5;
    ctx.strokeRect(-w / 2, -h / 2, w, h);
    ctx.restore();
    ctx.fillStyle = "#222222";
    ctx.font = "12px sans-serif";
    ctx.textAlign = "center";
    ctx.fillText(info.name, sx, sy - h / 2 - 6);
    ctx.font = "10px sans-serif";
    ctx.fillText(`z=${pos[2].toFixed(2)}m`, sx, sy + h / 2 + 12);
  }

  // last plan outcome: green marker on success, red cross on failure
  const plan = state.last_plan;
  if (plan) {
    if (plan.status === "success" && plan.chosen) {
      const [sx, sy] = toScreen(cam, plan.chosen[0], plan.chosen[1]);
      ctx.strokeStyle = CHOSEN_COLOR;
      ctx.lineWidth = 3;
      ctx.beginPath();
      ctx.arc(sx, sy, 10, 0, 2 * Math.PI);
      ctx.stroke();
    } else if (plan.status !== "success" && command) {
      const refInst = state.scene.instances.find((i) => references.has(i.id));
      if (refInst) {
        const [sx, sy] = toScreen(cam, refInst.position_m[0], refInst.position_m[1]);
        ctx.strokeStyle = FAILED_COLOR;
        ctx.lineWidth = 3;
        ctx.beginPath();
        ctx.moveTo(sx - 8, sy - 8);
        ctx.lineTo(sx + 8, sy + 8);
        ctx.moveTo(sx + 8, sy - 8);
        ctx.lineTo(sx - 8, sy + 8);
        ctx.stroke();
      }
    }
  }
}

/** Topmost object whose footprint AABB contains the world point. */
export function hitTest(
  controller: SessionController,
  x: number,
  y: number,
): string | null {
  const state = controller.view.state;
  if (!state) return null;
  let best: string | null = null;
  let bestZ = -Infinity;
  for (const inst of state.scene.instances) {
    const info = state.objects.find((o) => o.id === inst.id);
    if (!info) continue;
    const pos = controller.positionOf(inst.id) ?? inst.position_m;
    const yaw = yawOf(inst.orientation_wxyz);
    const c = Math.abs(Math.cos(yaw));
    const s = Math.abs(Math.sin(yaw));
    const hx = (c * info.extents_m[0] + s * info.extents_m[1]) / 2;
    const hy = (s * info.extents_m[0] + c * info.extents_m[1]) / 2;
    const top = pos[2] + info.extents_m[2] / 2;
    if (Math.abs(x - pos[0]) <= hx && Math.abs(y - pos[1]) <= hy && top > bestZ) {
      best = inst.id;
      bestZ = top;
    }
  }
  return best;
}
