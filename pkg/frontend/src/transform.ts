// World (mm, origin top-left, y down — same convention as the simulation)
// to screen (canvas px) affine transform with pan and zoom.

import type { ViewTransform } from "./state.js";
import { WORLD } from "./state.js";

export function fitView(canvasW: number, canvasH: number, margin = 20): ViewTransform {
  const scale = Math.min(
    (canvasW - 2 * margin) / WORLD.width,
    (canvasH - 2 * margin) / WORLD.height,
  );
  return {
    scale,
    offsetX: (canvasW - WORLD.width * scale) / 2,
    offsetY: (canvasH - WORLD.height * scale) / 2,
  };
}

export function worldToScreen(v: ViewTransform, x: number, y: number): [number, number] {
  return [v.offsetX + x * v.scale, v.offsetY + y * v.scale];
}

export function screenToWorld(v: ViewTransform, px: number, py: number): [number, number] {
  return [(px - v.offsetX) / v.scale, (py - v.offsetY) / v.scale];
}

export function panned(v: ViewTransform, dxPx: number, dyPx: number): ViewTransform {
  return { ...v, offsetX: v.offsetX + dxPx, offsetY: v.offsetY + dyPx };
}

export function zoomed(
  v: ViewTransform,
  factor: number,
  anchorPx: number,
  anchorPy: number,
): ViewTransform {
  const scale = Math.min(4.0, Math.max(0.2, v.scale * factor));
  const k = scale / v.scale;
  return {
    scale,
    offsetX: anchorPx - (anchorPx - v.offsetX) * k,
    offsetY: anchorPy - (anchorPy - v.offsetY) * k,
  };
}
