// Pointer tools: convert strokes and drags into protocol messages.

import type { ClientMessage, RobotView, Shape } from "./protocol.js";
import { msg } from "./protocol.js";

export const BODY_HIT_RADIUS = 26; // mm, slightly over the body half-diagonal

// Ramer-Douglas-Peucker simplification: drawn strokes snap to polylines
// with few vertices, which become the drawn-line segments.
export function simplifyStroke(
  points: [number, number][],
  epsilon = 8.0,
): [number, number][] {
  if (points.length <= 2) return points.slice();
  const keep = new Array(points.length).fill(false);
  keep[0] = keep[points.length - 1] = true;
  const stack: [number, number][] = [[0, points.length - 1]];
  while (stack.length) {
    const [lo, hi] = stack.pop()!;
    const [ax, ay] = points[lo];
    const [bx, by] = points[hi];
    const dx = bx - ax;
    const dy = by - ay;
    const len2 = Math.max(dx * dx + dy * dy, 1e-12);
    let worst = -1;
    let worstDist = epsilon;
    for (let i = lo + 1; i < hi; i++) {
      const t = Math.max(
        0,
        Math.min(1, ((points[i][0] - ax) * dx + (points[i][1] - ay) * dy) / len2),
      );
      const px = ax + t * dx;
      const py = ay + t * dy;
      const d = Math.hypot(points[i][0] - px, points[i][1] - py);
      if (d > worstDist) {
        worstDist = d;
        worst = i;
      }
    }
    if (worst >= 0) {
      keep[worst] = true;
      stack.push([lo, worst], [worst, hi]);
    }
  }
  return points.filter((_, i) => keep[i]);
}

export function strokesToSegments(
  strokes: [number, number][][],
  epsilon = 8.0,
): [number, number, number, number][] {
  const segments: [number, number, number, number][] = [];
  for (const stroke of strokes) {
    const simplified = simplifyStroke(stroke, epsilon);
    for (let i = 1; i < simplified.length; i++) {
      const [x1, y1] = simplified[i - 1];
      const [x2, y2] = simplified[i];
      if (Math.hypot(x2 - x1, y2 - y1) > 1e-6) {
        segments.push([x1, y1, x2, y2]);
      }
    }
  }
  return segments;
}

export function commitStrokesMessage(
  strokes: [number, number][][],
  mode: "line" | "point" = "line",
): ClientMessage | null {
  const segments = strokesToSegments(strokes);
  if (segments.length === 0) return null;
  const shape: Shape = { kind: "drawn_lines", segments };
  return msg.setShape(shape, mode);
}

export function hitRobot(
  robots: RobotView[],
  x: number,
  y: number,
  radius = BODY_HIT_RADIUS,
): RobotView | null {
  let best: RobotView | null = null;
  let bestDist = radius;
  for (const robot of robots) {
    const d = Math.hypot(robot.x - x, robot.y - y);
    if (d <= bestDist) {
      best = robot;
      bestDist = d;
    }
  }
  return best;
}

// Streams drag updates without exceeding the snapshot rate.
export class DragThrottle {
  private lastSent = -Infinity;

  constructor(private minIntervalMs = 1000 / 30) {}

  maybe(nowMs: number): boolean {
    if (nowMs - this.lastSent < this.minIntervalMs) return false;
    this.lastSent = nowMs;
    return true;
  }

  reset(): void {
    this.lastSent = -Infinity;
  }
}
