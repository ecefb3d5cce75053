/** Grid/pixel mapping and box arithmetic for the editor overlays.
 *
 * The same uniform scale the renderer uses (canvas / 100) maps plan boxes
 * onto the canvas, so overlays and the rendered SVG always agree.
 */
import type { BoxTuple, PlanJson } from "./types.js";

export const GRID_SIDE = 100;
export const MIN_EXTENT = 1;

export function gridToPixel(value: number, canvasSide: number): number {
  return (value * canvasSide) / GRID_SIDE;
}

export function pixelToGrid(value: number, canvasSide: number): number {
  return (value * GRID_SIDE) / canvasSide;
}

/** Snap a fractional grid coordinate to the integer plan grid. */
export function snap(value: number): number {
  return Math.round(value);
}

export function clampPosition(value: number): number {
  return Math.max(0, Math.min(GRID_SIDE, snap(value)));
}

export function clampExtent(value: number): number {
  return Math.max(MIN_EXTENT, Math.min(GRID_SIDE, snap(value)));
}

/** Translate a box by fractional grid deltas, snapped and kept on-grid. */
export function movedBox(box: BoxTuple, dx: number, dy: number): BoxTuple {
  return [clampPosition(box[0] + dx), clampPosition(box[1] + dy), box[2], box[3]];
}

/** Grow/shrink a box by fractional grid deltas; extents never fall below 1. */
export function resizedBox(box: BoxTuple, dw: number, dh: number): BoxTuple {
  return [box[0], box[1], clampExtent(box[2] + dw), clampExtent(box[3] + dh)];
}

export function boxContains(box: BoxTuple, gx: number, gy: number): boolean {
  const [x, y, w, h] = box;
  return gx >= x && gx <= x + w && gy >= y && gy <= y + h;
}

/** Topmost entity under a grid point (later declarations sit on top). */
export function hitTest(plan: PlanJson, gx: number, gy: number): string | null {
  for (let i = plan.entities.length - 1; i >= 0; i--) {
    const entity = plan.entities[i]!;
    const box = plan.layouts[entity.id];
    if (box && boxContains(box, gx, gy)) {
      return entity.id;
    }
  }
  return null;
}

/** True when the tuple is a structurally legal grid box. */
export function isValidBox(box: BoxTuple): boolean {
  const [x, y, w, h] = box;
  const integral = box.every((v) => Number.isInteger(v));
  return (
    integral &&
    x >= 0 &&
    x <= GRID_SIDE &&
    y >= 0 &&
    y <= GRID_SIDE &&
    w >= MIN_EXTENT &&
    w <= GRID_SIDE &&
    h >= MIN_EXTENT &&
    h <= GRID_SIDE
  );
}
