// Rendering splits into a pure display-list builder (testable without a
// DOM) and a thin canvas rasterizer. The display list is derived from the
// view model alone.

import type { Shape } from "./protocol.js";
import type { ViewModel } from "./state.js";
import { WORLD } from "./state.js";

export const BODY_SIDE = 36;
const MIN_EXT = 25;
const MAX_EXT = 200;

export type Primitive =
  | { kind: "grid"; step: number }
  | { kind: "frame" }
  | { kind: "stroke"; points: [number, number][]; style: "pending" | "active" | "overlay" }
  | { kind: "object"; x: number; y: number; radius: number; pushable: boolean }
  | { kind: "strip"; x1: number; y1: number; x2: number; y2: number }
  | { kind: "areal"; x: number; y: number; radius: number }
  | {
      kind: "body";
      id: number;
      x: number;
      y: number;
      theta: number;
      phase: string;
      heightColor: string | null; // vertical extension shading
      dragging: boolean;
    }
  | { kind: "heightLabel"; x: number; y: number; text: string }
  | { kind: "goal"; x: number; y: number };

export function heightColor(extension: number): string {
  const t = Math.min(1, Math.max(0, (extension - MIN_EXT) / (MAX_EXT - MIN_EXT)));
  const r = Math.round(40 + 40 * t);
  const g = Math.round(110 + 40 * (1 - t));
  const b = Math.round(150 + 105 * t);
  return `rgb(${r},${g},${b})`;
}

function shapeStrokes(shape: Shape): [number, number][][] {
  switch (shape.kind) {
    case "drawn_lines":
      return shape.segments.map(([x1, y1, x2, y2]) => [
        [x1, y1],
        [x2, y2],
      ]);
    case "rectangle": {
      const [cx, cy] = shape.center ?? [0, 0];
      const w2 = shape.width / 2;
      const h2 = shape.height / 2;
      return [
        [
          [cx - w2, cy - h2],
          [cx + w2, cy - h2],
          [cx + w2, cy + h2],
          [cx - w2, cy + h2],
          [cx - w2, cy - h2],
        ],
      ];
    }
    case "fence": {
      const pts: [number, number][] = [];
      for (let k = 0; k <= 32; k++) {
        const a = (2 * Math.PI * k) / 32;
        pts.push([
          shape.center[0] + shape.radius * Math.cos(a),
          shape.center[1] + shape.radius * Math.sin(a),
        ]);
      }
      return [pts];
    }
    default:
      return [];
  }
}

export function buildDisplayList(model: ViewModel): Primitive[] {
  const out: Primitive[] = [{ kind: "grid", step: 100 }, { kind: "frame" }];
  if (model.overlayShape) {
    for (const pts of shapeStrokes(model.overlayShape)) {
      out.push({ kind: "stroke", points: pts, style: "overlay" });
    }
  }
  for (const stroke of model.strokes) {
    out.push({ kind: "stroke", points: stroke, style: "pending" });
  }
  if (model.activeStroke && model.activeStroke.length > 1) {
    out.push({ kind: "stroke", points: model.activeStroke, style: "active" });
  }
  const snap = model.snapshot;
  if (!snap) return out;
  for (const obj of snap.objects) {
    out.push({ kind: "object", x: obj.x, y: obj.y, radius: obj.radius, pushable: obj.pushable });
  }
  for (const robot of snap.robots) {
    const horizontal = robot.mount === "horizontal" || robot.mount === "curved";
    if (horizontal && robot.extension > MIN_EXT + 1e-6) {
      const ux = Math.cos(robot.theta);
      const uy = Math.sin(robot.theta);
      const half = robot.extension / 2;
      out.push({
        kind: "strip",
        x1: robot.x - half * ux,
        y1: robot.y - half * uy,
        x2: robot.x + half * ux,
        y2: robot.y + half * uy,
      });
    } else if (robot.mount === "volumetric" || robot.mount === "areal") {
      out.push({ kind: "areal", x: robot.x, y: robot.y, radius: robot.extension });
    }
    if (robot.goal && robot.phase !== "holding") {
      out.push({ kind: "goal", x: robot.goal.x, y: robot.goal.y });
    }
    out.push({
      kind: "body",
      id: robot.id,
      x: robot.x,
      y: robot.y,
      theta: robot.theta,
      phase: robot.phase,
      heightColor: robot.mount === "vertical" ? heightColor(robot.extension) : null,
      dragging: model.draggingRobot === robot.id,
    });
    if (robot.mount === "vertical") {
      out.push({
        kind: "heightLabel",
        x: robot.x,
        y: robot.y - BODY_SIDE / 2 - 6,
        text: `${Math.round(robot.extension)}`,
      });
    }
  }
  return out;
}

// -- canvas rasterizer ---------------------------------------------------------------

const STROKE_STYLES = {
  pending: { color: "#c0392b", width: 2.5, dash: [] as number[] },
  active: { color: "#e67e22", width: 2.5, dash: [4, 3] },
  overlay: { color: "#b6b6b6", width: 2, dash: [6, 4] },
};

export function rasterize(
  ctx: CanvasRenderingContext2D,
  list: Primitive[],
  view: { scale: number; offsetX: number; offsetY: number },
  canvasW: number,
  canvasH: number,
): void {
  ctx.clearRect(0, 0, canvasW, canvasH);
  ctx.save();
  ctx.translate(view.offsetX, view.offsetY);
  ctx.scale(view.scale, view.scale);
  for (const p of list) {
    switch (p.kind) {
      case "grid": {
        ctx.strokeStyle = "#eceada";
        ctx.lineWidth = 1 / view.scale;
        for (let x = p.step; x < WORLD.width; x += p.step) {
          ctx.beginPath();
          ctx.moveTo(x, 0);
          ctx.lineTo(x, WORLD.height);
          ctx.stroke();
        }
        for (let y = p.step; y < WORLD.height; y += p.step) {
          ctx.beginPath();
          ctx.moveTo(0, y);
          ctx.lineTo(WORLD.width, y);
          ctx.stroke();
        }
        break;
      }
      case "frame":
        ctx.strokeStyle = "#555";
        ctx.lineWidth = 2 / view.scale;
        ctx.strokeRect(0, 0, WORLD.width, WORLD.height);
        break;
      case "stroke": {
        const style = STROKE_STYLES[p.style];
        ctx.strokeStyle = style.color;
        ctx.lineWidth = style.width / view.scale + 1.2;
        ctx.setLineDash(style.dash.map((d) => d / view.scale + 1));
        ctx.beginPath();
        ctx.moveTo(p.points[0][0], p.points[0][1]);
        for (const [x, y] of p.points.slice(1)) ctx.lineTo(x, y);
        ctx.stroke();
        ctx.setLineDash([]);
        break;
      }
      case "object":
        ctx.fillStyle = p.pushable ? "rgba(230,160,60,0.85)" : "rgba(100,85,70,0.9)";
        ctx.beginPath();
        ctx.arc(p.x, p.y, p.radius, 0, 2 * Math.PI);
        ctx.fill();
        break;
      case "strip":
        ctx.strokeStyle = "#1f77b4";
        ctx.lineWidth = 6;
        ctx.lineCap = "round";
        ctx.beginPath();
        ctx.moveTo(p.x1, p.y1);
        ctx.lineTo(p.x2, p.y2);
        ctx.stroke();
        break;
      case "areal":
        ctx.fillStyle = "rgba(31,119,180,0.2)";
        ctx.strokeStyle = "#1f77b4";
        ctx.lineWidth = 1.5;
        ctx.beginPath();
        ctx.arc(p.x, p.y, p.radius, 0, 2 * Math.PI);
        ctx.fill();
        ctx.stroke();
        break;
      case "goal":
        ctx.strokeStyle = "rgba(80,80,80,0.5)";
        ctx.lineWidth = 1;
        ctx.beginPath();
        ctx.moveTo(p.x - 6, p.y);
        ctx.lineTo(p.x + 6, p.y);
        ctx.moveTo(p.x, p.y - 6);
        ctx.lineTo(p.x, p.y + 6);
        ctx.stroke();
        break;
      case "body": {
        ctx.save();
        ctx.translate(p.x, p.y);
        ctx.rotate(p.theta);
        ctx.fillStyle = p.heightColor ?? "#dcdcdc";
        ctx.strokeStyle = p.dragging ? "#c0392b" : "#333";
        ctx.lineWidth = p.dragging ? 3 : 1.5;
        ctx.fillRect(-BODY_SIDE / 2, -BODY_SIDE / 2, BODY_SIDE, BODY_SIDE);
        ctx.strokeRect(-BODY_SIDE / 2, -BODY_SIDE / 2, BODY_SIDE, BODY_SIDE);
        ctx.beginPath();
        ctx.moveTo(0, 0);
        ctx.lineTo(BODY_SIDE / 2, 0);
        ctx.stroke();
        ctx.restore();
        break;
      }
      case "heightLabel":
        ctx.fillStyle = "#333";
        ctx.font = `${12 / view.scale + 6}px sans-serif`;
        ctx.textAlign = "center";
        ctx.fillText(p.text, p.x, p.y);
        break;
    }
  }
  ctx.restore();
}
