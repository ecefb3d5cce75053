export const GRID_SIDE = 100;
export const MIN_EXTENT = 1;
export function gridToPixel(value, canvasSide) {
    return (value * canvasSide) / GRID_SIDE;
}
export function pixelToGrid(value, canvasSide) {
    return (value * GRID_SIDE) / canvasSide;
}
/** Snap a fractional grid coordinate to the integer plan grid. */
export function snap(value) {
    return Math.round(value);
}
export function clampPosition(value) {
    return Math.max(0, Math.min(GRID_SIDE, snap(value)));
}
export function clampExtent(value) {
    return Math.max(MIN_EXTENT, Math.min(GRID_SIDE, snap(value)));
}
/** Translate a box by fractional grid deltas, snapped and kept on-grid. */
export function movedBox(box, dx, dy) {
    return [clampPosition(box[0] + dx), clampPosition(box[1] + dy), box[2], box[3]];
}
/** Grow/shrink a box by fractional grid deltas; extents never fall below 1. */
export function resizedBox(box, dw, dh) {
    return [box[0], box[1], clampExtent(box[2] + dw), clampExtent(box[3] + dh)];
}
export function boxContains(box, gx, gy) {
    const [x, y, w, h] = box;
    return gx >= x && gx <= x + w && gy >= y && gy <= y + h;
}
/** Topmost entity under a grid point (later declarations sit on top). */
export function hitTest(plan, gx, gy) {
    for (let i = plan.entities.length - 1; i >= 0; i--) {
        const entity = plan.entities[i];
        const box = plan.layouts[entity.id];
        if (box && boxContains(box, gx, gy)) {
            return entity.id;
        }
    }
    return null;
}
/** True when the tuple is a structurally legal grid box. */
export function isValidBox(box) {
    const [x, y, w, h] = box;
    const integral = box.every((v) => Number.isInteger(v));
    return (integral &&
        x >= 0 &&
        x <= GRID_SIDE &&
        y >= 0 &&
        y <= GRID_SIDE &&
        w >= MIN_EXTENT &&
        w <= GRID_SIDE &&
        h >= MIN_EXTENT &&
        h <= GRID_SIDE);
}
