// DOM bootstrap: canvas with drag support, command box, cue button, relation
// selector for the heatmap overlay, utterance log, and the color legend.

import { ApiClient } from "./api.js";
import { LEGEND } from "./colors.js";
import { SessionController } from "./controller.js";
import { fitCamera, hitTest, renderScene, type Camera } from "./render.js";

const SERVICE_URL =
  new URLSearchParams(window.location.search).get("service") ?? "http://127.0.0.1:8000";

const canvas = document.getElementById("scene") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const commandInput = document.getElementById("command") as HTMLInputElement;
const sendButton = document.getElementById("send") as HTMLButtonElement;
const cueButton = document.getElementById("cue") as HTMLButtonElement;
const resetButton = document.getElementById("reset") as HTMLButtonElement;
const relationSelect = document.getElementById("relation") as HTMLSelectElement;
const logDiv = document.getElementById("log") as HTMLDivElement;
const errorDiv = document.getElementById("error") as HTMLDivElement;
const countsDiv = document.getElementById("counts") as HTMLDivElement;
const legendDiv = document.getElementById("legend") as HTMLDivElement;

const controller = new SessionController(new ApiClient(SERVICE_URL));
let camera: Camera | null = null;

for (const entry of LEGEND) {
  const item = document.createElement("span");
  item.className = "legend-item";
  const swatch = document.createElement("span");
  swatch.className = "swatch";
  swatch.style.backgroundColor = entry.color;
  item.appendChild(swatch);
  item.appendChild(document.createTextNode(entry.label));
  legendDiv.appendChild(item);
}

function redraw(): void {
  const state = controller.view.state;
  if (!state) return;
  camera = fitCamera(state.workspace.bounds as [number[], number[]], canvas.width, canvas.height);
  renderScene(ctx, camera, controller);

  cueButton.disabled = !controller.cueEnabled;
  errorDiv.textContent = controller.view.error ?? "";

  logDiv.replaceChildren(
    ...controller.utterances.map((e) => {
      const line = document.createElement("div");
      line.className = `utterance ${e.source}`;
      line.textContent = `${e.source === "robot" ? "\u{1F916}" : "\u{1F464}"} ${e.text}`;
      return line;
    }),
  );
  logDiv.scrollTop = logDiv.scrollHeight;

  const counts = state.demo_counts;
  countsDiv.replaceChildren(
    ...Object.entries(counts)
      .filter(([, n]) => n > 0)
      .map(([rid, n]) => {
        const badge = document.createElement("span");
        badge.className = "badge";
        badge.textContent = `${rid}: ${n}`;
        return badge;
      }),
  );

  if (relationSelect.options.length <= 1) {
    for (const rid of Object.keys(counts)) {
      const option = document.createElement("option");
      option.value = rid;
      option.textContent = rid;
      relationSelect.appendChild(option);
    }
  }
}

controller.onChange(redraw);

function toWorld(ev: MouseEvent): [number, number] {
  if (!camera) return [0, 0];
  const rect = canvas.getBoundingClientRect();
  const px = ((ev.clientX - rect.left) / rect.width) * canvas.width;
  const py = ((ev.clientY - rect.top) / rect.height) * canvas.height;
  return [(px - camera.cx) / camera.scale, (camera.cy - py) / camera.scale];
}

let dragId: string | null = null;

canvas.addEventListener("mousedown", (ev) => {
  const [x, y] = toWorld(ev);
  dragId = hitTest(controller, x, y);
});

canvas.addEventListener("mousemove", (ev) => {
  if (!dragId) return;
  const [x, y] = toWorld(ev);
  controller.dragPreview(dragId, x, y);
});

canvas.addEventListener("mouseup", (ev) => {
  if (!dragId) return;
  const [x, y] = toWorld(ev);
  const id = dragId;
  dragId = null;
  void controller.dragObject(id, x, y);
});

sendButton.addEventListener("click", () => {
  const text = commandInput.value.trim();
  if (text) void controller.sendCommand(text);
});
commandInput.addEventListener("keydown", (ev) => {
  if (ev.key === "Enter") sendButton.click();
});
cueButton.addEventListener("click", () => void controller.sendCue());
resetButton.addEventListener("click", () => void controller.reset());
relationSelect.addEventListener("change", () =>
  void controller.selectRelation(relationSelect.value || null),
);

void controller.refresh();
