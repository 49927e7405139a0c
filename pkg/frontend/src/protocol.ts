// Wire protocol v1: typed message constructors and server-message shapes.
// The simulation server owns all state; the UI only speaks this protocol.

export type Mode = "line" | "point";

export type Shape =
  | { kind: "drawn_lines"; segments: [number, number, number, number][] }
  | { kind: "svg"; text?: string; path?: string; scale?: number; fit?: boolean }
  | {
      kind: "sine_wave";
      wavelength: number;
      count: number;
      amplitude?: number;
      origin?: [number, number];
    }
  | { kind: "rectangle"; width: number; height: number; center?: [number, number] }
  | {
      kind: "fence";
      center: [number, number];
      radius: number;
      count: number;
      height: number;
    }
  | { kind: "data_map"; anchors: [number, number][]; values: number[] };

export interface RobotView {
  id: number;
  x: number;
  y: number;
  theta: number;
  phase: string;
  extension: number;
  mount: string;
  goal: { x: number; y: number; theta: number; extension: number } | null;
}

export interface ObjectView {
  x: number;
  y: number;
  radius: number;
  pushable: boolean;
}

export interface Snapshot {
  v: 1;
  type: "snapshot";
  time: number;
  playing: boolean;
  completed: boolean;
  robots: RobotView[];
  objects: ObjectView[];
  phase_counts: Record<string, number>;
}

export interface ServerEvent {
  v: 1;
  type: "event";
  time: number;
  kind: string;
  robot_id?: number | null;
  text: string;
}

export interface MetricsMessage {
  v: 1;
  type: "metrics";
  metrics: Record<string, unknown>;
}

export interface ErrorMessage {
  v: 1;
  type: "error";
  code: string;
  text: string;
}

export type ServerMessage = Snapshot | ServerEvent | MetricsMessage | ErrorMessage;

export type ClientMessage = { v: 1 } & (
  | { type: "play" }
  | { type: "pause" }
  | { type: "step_once"; count?: number }
  | { type: "drag_robot"; id: number; x: number; y: number; theta?: number }
  | { type: "place_robot"; x: number; y: number; theta?: number }
  | { type: "remove_robot"; id: number }
  | { type: "set_shape"; shape: Shape; mode?: Mode }
  | { type: "upload_svg"; svg: string; scale?: number; fit?: boolean; mode?: Mode }
  | { type: "set_keyframes"; frames: Shape[]; hold?: number; mode?: Mode }
  | { type: "set_params"; params: Record<string, number | boolean> }
  | { type: "request_metrics" }
);

export const msg = {
  play: (): ClientMessage => ({ v: 1, type: "play" }),
  pause: (): ClientMessage => ({ v: 1, type: "pause" }),
  stepOnce: (count = 1): ClientMessage => ({ v: 1, type: "step_once", count }),
  dragRobot: (id: number, x: number, y: number, theta = 0): ClientMessage => ({
    v: 1,
    type: "drag_robot",
    id,
    x,
    y,
    theta,
  }),
  placeRobot: (x: number, y: number, theta = 0): ClientMessage => ({
    v: 1,
    type: "place_robot",
    x,
    y,
    theta,
  }),
  removeRobot: (id: number): ClientMessage => ({ v: 1, type: "remove_robot", id }),
  setShape: (shape: Shape, mode: Mode = "line"): ClientMessage => ({
    v: 1,
    type: "set_shape",
    shape,
    mode,
  }),
  uploadSvg: (svg: string, scale = 1.0, fit = true, mode: Mode = "line"): ClientMessage => ({
    v: 1,
    type: "upload_svg",
    svg,
    scale,
    fit,
    mode,
  }),
  setKeyframes: (frames: Shape[], hold = 2.0, mode: Mode = "line"): ClientMessage => ({
    v: 1,
    type: "set_keyframes",
    frames,
    hold,
    mode,
  }),
  setParams: (params: Record<string, number | boolean>): ClientMessage => ({
    v: 1,
    type: "set_params",
    params,
  }),
  requestMetrics: (): ClientMessage => ({ v: 1, type: "request_metrics" }),
};
