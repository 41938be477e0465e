// Color legend: reference objects yellow, target light blue, successful
// placement green, failed plan red; heatmap ramps from purple (low) to
// yellow (high).

export const OBJECT_FILL = "#d9d9d9";
export const REFERENCE_FILL = "#ffd34d";
export const TARGET_FILL = "#a6d3f5";
export const CHOSEN_COLOR = "#2ca02c";
export const FAILED_COLOR = "#d62728";
export const TABLE_FILL = "#f7f3ea";

// viridis control points, low to high
const RAMP: [number, number, number][] = [
  [0x44, 0x01, 0x54],
  [0x3b, 0x52, 0x8b],
  [0x21, 0x91, 0x8c],
  [0x5e, 0xc9, 0x62],
  [0xfd, 0xe7, 0x25],
];

function hex2(v: number): string {
  return Math.round(v).toString(16).padStart(2, "0");
}

/** Map t in [0, 1] onto the purple-to-yellow ramp. */
export function heatColor(t: number): string {
  const x = Math.min(1, Math.max(0, t)) * (RAMP.length - 1);
  const i = Math.min(RAMP.length - 2, Math.floor(x));
  const f = x - i;
  const [r0, g0, b0] = RAMP[i];
  const [r1, g1, b1] = RAMP[i + 1];
  return `#${hex2(r0 + f * (r1 - r0))}${hex2(g0 + f * (g1 - g0))}${hex2(b0 + f * (b1 - b0))}`;
}

export const LEGEND: { label: string; color: string }[] = [
  { label: "reference", color: REFERENCE_FILL },
  { label: "target", color: TARGET_FILL },
  { label: "placement (success)", color: CHOSEN_COLOR },
  { label: "placement (failed)", color: FAILED_COLOR },
];
