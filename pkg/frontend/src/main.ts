// Application entry: wires the websocket, view model, tools, and canvas.

import { Connection } from "./net.js";
import { msg, type Shape } from "./protocol.js";
import { buildDisplayList, rasterize } from "./renderer.js";
import {
  applyServer,
  beginStroke,
  clearFrames,
  clearStrokes,
  endStroke,
  extendStroke,
  initialModel,
  pushFrame,
  setTool,
  undoStroke,
  type Tool,
  type ViewModel,
} from "./state.js";
import { fitView, panned, screenToWorld, zoomed } from "./transform.js";
import { commitStrokesMessage, DragThrottle, hitRobot, strokesToSegments } from "./tools.js";

const canvas = document.getElementById("world") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
let model: ViewModel = initialModel();
const conn = new Connection();
const throttle = new DragThrottle();
let dirty = true;

function update(next: ViewModel): void {
  model = next;
  dirty = true;
}

conn.onmessage = (m) => update(applyServer(model, m, performance.now()));
conn.onstate = (s) => update({ ...model, connection: s });
conn.open();

// -- layout & render loop ---------------------------------------------------------

function resize(): void {
  const rect = canvas.parentElement!.getBoundingClientRect();
  canvas.width = rect.width;
  canvas.height = Math.max(300, rect.height);
  update({ ...model, view: fitView(canvas.width, canvas.height) });
}
window.addEventListener("resize", resize);

function frame(): void {
  if (dirty) {
    dirty = false;
    rasterize(ctx, buildDisplayList(model), model.view, canvas.width, canvas.height);
    renderSidebar();
  }
  requestAnimationFrame(frame);
}

// -- pointer handling --------------------------------------------------------------

let panAnchor: [number, number] | null = null;

function pointerWorld(ev: PointerEvent): [number, number] {
  const rect = canvas.getBoundingClientRect();
  return screenToWorld(model.view, ev.clientX - rect.left, ev.clientY - rect.top);
}

canvas.addEventListener("pointerdown", (ev) => {
  canvas.setPointerCapture(ev.pointerId);
  const [x, y] = pointerWorld(ev);
  switch (model.tool) {
    case "draw":
      update(beginStroke(model, [x, y]));
      break;
    case "drag": {
      const robot = model.snapshot ? hitRobot(model.snapshot.robots, x, y) : null;
      if (robot) {
        throttle.reset();
        update({ ...model, draggingRobot: robot.id });
      }
      break;
    }
    case "place":
      conn.send(msg.placeRobot(x, y));
      break;
    case "remove": {
      const robot = model.snapshot ? hitRobot(model.snapshot.robots, x, y) : null;
      if (robot) conn.send(msg.removeRobot(robot.id));
      break;
    }
    case "pan":
      panAnchor = [ev.clientX, ev.clientY];
      break;
  }
});

canvas.addEventListener("pointermove", (ev) => {
  const [x, y] = pointerWorld(ev);
  if (model.tool === "draw" && model.activeStroke) {
    update(extendStroke(model, [x, y]));
  } else if (model.tool === "drag" && model.draggingRobot !== null) {
    if (throttle.maybe(performance.now())) {
      conn.send(msg.dragRobot(model.draggingRobot, x, y));
    }
  } else if (model.tool === "pan" && panAnchor) {
    update({
      ...model,
      view: panned(model.view, ev.clientX - panAnchor[0], ev.clientY - panAnchor[1]),
    });
    panAnchor = [ev.clientX, ev.clientY];
  }
});

canvas.addEventListener("pointerup", (ev) => {
  const [x, y] = pointerWorld(ev);
  if (model.tool === "draw") {
    update(endStroke(model));
  } else if (model.tool === "drag" && model.draggingRobot !== null) {
    conn.send(msg.dragRobot(model.draggingRobot, x, y)); // final pose
    update({ ...model, draggingRobot: null });
  }
  panAnchor = null;
});

canvas.addEventListener("wheel", (ev) => {
  ev.preventDefault();
  const rect = canvas.getBoundingClientRect();
  const factor = ev.deltaY < 0 ? 1.1 : 1 / 1.1;
  update({
    ...model,
    view: zoomed(model.view, factor, ev.clientX - rect.left, ev.clientY - rect.top),
  });
});

// -- toolbar -----------------------------------------------------------------------

function bind(id: string, handler: () => void): void {
  document.getElementById(id)!.addEventListener("click", handler);
}

for (const tool of ["draw", "drag", "place", "remove", "pan"] as Tool[]) {
  bind(`tool-${tool}`, () => {
    update(setTool(model, tool));
    for (const other of ["draw", "drag", "place", "remove", "pan"]) {
      document
        .getElementById(`tool-${other}`)!
        .classList.toggle("active", other === tool);
    }
  });
}

function currentMode(): "line" | "point" {
  return (document.getElementById("mode") as HTMLSelectElement).value as "line" | "point";
}

bind("commit-shape", () => {
  const message = commitStrokesMessage(model.strokes, currentMode());
  if (message && message.type === "set_shape") {
    conn.send(message);
    update({ ...clearStrokes(model), overlayShape: message.shape });
  }
});
bind("undo-stroke", () => update(undoStroke(model)));
bind("clear-strokes", () => update(clearStrokes(model)));

bind("add-frame", () => {
  const segments = strokesToSegments(model.strokes);
  if (segments.length === 0) return;
  const frameShape: Shape = { kind: "drawn_lines", segments };
  update(clearStrokes(pushFrame(model, frameShape)));
});
bind("commit-frames", () => {
  if (model.pendingFrames.length === 0) return;
  const hold = Number((document.getElementById("hold") as HTMLInputElement).value) || 2.0;
  conn.send(msg.setKeyframes(model.pendingFrames, hold, currentMode()));
  update({ ...clearFrames(model), overlayShape: model.pendingFrames[0] });
});
bind("clear-frames", () => update(clearFrames(model)));

bind("play", () => conn.send(msg.play()));
bind("pause", () => conn.send(msg.pause()));
bind("step", () => conn.send(msg.stepOnce(15)));
bind("metrics", () => conn.send(msg.requestMetrics()));

bind("upload-svg", () => {
  const input = document.createElement("input");
  input.type = "file";
  input.accept = ".svg,image/svg+xml";
  input.onchange = async () => {
    const file = input.files?.[0];
    if (file) conn.send(msg.uploadSvg(await file.text(), 1.0, true, currentMode()));
  };
  input.click();
});

bind("apply-params", () => {
  const params: Record<string, number> = {};
  for (const [id, key] of [
    ["param-vmax", "v_max"],
    ["param-noise", "position_noise_sigma"],
    ["param-loss", "tracking_loss_rate"],
  ] as const) {
    const raw = (document.getElementById(id) as HTMLInputElement).value;
    if (raw !== "") params[key] = Number(raw);
  }
  if (Object.keys(params).length) conn.send(msg.setParams(params));
});

// -- sidebar ------------------------------------------------------------------------

function renderSidebar(): void {
  const snap = model.snapshot;
  const status = document.getElementById("status")!;
  const phases = snap
    ? Object.entries(snap.phase_counts)
        .map(([k, v]) => `${k}: ${v}`)
        .join("  ")
    : "";
  status.textContent = snap
    ? `t = ${snap.time.toFixed(2)} s  |  ${snap.playing ? "playing" : "paused"}` +
      `${snap.completed ? "  |  complete" : ""}  |  ${phases}  |  ${model.connection}`
    : `waiting for snapshot (${model.connection})`;

  const feed = document.getElementById("events")!;
  const now = performance.now();
  feed.innerHTML = model.events
    .slice(-12)
    .reverse()
    .map(
      (e) =>
        `<li class="${e.flashUntil > now ? "flash" : ""}">` +
        `${e.time.toFixed(2)}s ${e.kind} ${e.text}</li>`,
    )
    .join("");

  const frames = document.getElementById("frames")!;
  frames.textContent = model.pendingFrames.length
    ? `${model.pendingFrames.length} frame(s) pending`
    : "";

  const metrics = document.getElementById("metrics-box")!;
  metrics.textContent = model.metrics ? JSON.stringify(model.metrics, null, 1) : "";

  const error = document.getElementById("error")!;
  error.textContent = model.lastError ?? "";
}

resize();
frame();
