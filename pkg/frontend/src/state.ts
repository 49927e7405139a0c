// The view model: everything the renderer needs, nothing the server owns.
// Rendering is a pure function of this structure; applying a server message
// is a pure reduction, so reloading the page reproduces the identical view
// from the next snapshot.

import type { ServerMessage, Shape, Snapshot } from "./protocol.js";

export type Tool = "draw" | "drag" | "place" | "remove" | "pan";

export interface FeedItem {
  time: number;
  kind: string;
  text: string;
  flashUntil: number; // wall-clock ms; renderer highlights fresh events
}

export interface ViewTransform {
  scale: number; // screen px per mm
  offsetX: number;
  offsetY: number;
}

export interface ViewModel {
  snapshot: Snapshot | null;
  tool: Tool;
  strokes: [number, number][][]; // committed-but-unsent drawn strokes, world mm
  activeStroke: [number, number][] | null;
  overlayShape: Shape | null; // last committed shape, drawn as reference
  pendingFrames: Shape[];
  events: FeedItem[];
  metrics: Record<string, unknown> | null;
  lastError: string | null;
  view: ViewTransform;
  connection: "connecting" | "open" | "closed";
  draggingRobot: number | null;
}

export const WORLD = { width: 1150, height: 740 };
const FEED_LIMIT = 60;

export function initialModel(): ViewModel {
  return {
    snapshot: null,
    tool: "draw",
    strokes: [],
    activeStroke: null,
    overlayShape: null,
    pendingFrames: [],
    events: [],
    metrics: null,
    lastError: null,
    view: { scale: 1.0, offsetX: 0, offsetY: 0 },
    connection: "connecting",
    draggingRobot: null,
  };
}

export function applyServer(model: ViewModel, message: ServerMessage, nowMs: number): ViewModel {
  switch (message.type) {
    case "snapshot":
      return { ...model, snapshot: message };
    case "event": {
      const item: FeedItem = {
        time: message.time,
        kind: message.kind,
        text: message.text,
        flashUntil: nowMs + 1500,
      };
      const events = [...model.events, item].slice(-FEED_LIMIT);
      return { ...model, events };
    }
    case "metrics":
      return { ...model, metrics: message.metrics };
    case "error":
      return { ...model, lastError: `${message.code}: ${message.text}` };
  }
}

export function setTool(model: ViewModel, tool: Tool): ViewModel {
  return { ...model, tool, activeStroke: null };
}

// -- drawing -------------------------------------------------------------------

export function beginStroke(model: ViewModel, p: [number, number]): ViewModel {
  return { ...model, activeStroke: [p] };
}

const MIN_SAMPLE_MM = 3.0;

export function extendStroke(model: ViewModel, p: [number, number]): ViewModel {
  if (!model.activeStroke) return model;
  const last = model.activeStroke[model.activeStroke.length - 1];
  if (Math.hypot(p[0] - last[0], p[1] - last[1]) < MIN_SAMPLE_MM) return model;
  return { ...model, activeStroke: [...model.activeStroke, p] };
}

export function endStroke(model: ViewModel): ViewModel {
  if (!model.activeStroke) return model;
  const stroke = model.activeStroke;
  const strokes =
    strokeLength(stroke) > 1e-6 ? [...model.strokes, stroke] : model.strokes;
  return { ...model, strokes, activeStroke: null };
}

export function undoStroke(model: ViewModel): ViewModel {
  return { ...model, strokes: model.strokes.slice(0, -1) };
}

export function clearStrokes(model: ViewModel): ViewModel {
  return { ...model, strokes: [], activeStroke: null };
}

export function strokeLength(stroke: [number, number][]): number {
  let total = 0;
  for (let i = 1; i < stroke.length; i++) {
    total += Math.hypot(stroke[i][0] - stroke[i - 1][0], stroke[i][1] - stroke[i - 1][1]);
  }
  return total;
}

// -- keyframes ----------------------------------------------------------------------

export function pushFrame(model: ViewModel, frame: Shape): ViewModel {
  return { ...model, pendingFrames: [...model.pendingFrames, frame] };
}

export function clearFrames(model: ViewModel): ViewModel {
  return { ...model, pendingFrames: [] };
}
