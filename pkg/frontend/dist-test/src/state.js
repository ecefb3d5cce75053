/** Editor state and pure transition functions.
 *
 * All mutations go through these reducers so the DOM layer stays a thin
 * projection and the whole editing flow is testable headlessly. The
 * working plan must pass client-side validation before a save is allowed,
 * and the server version counter rides along for conflict detection.
 */
import { movedBox, resizedBox, isValidBox } from "./geometry.js";
import { clonePlan } from "./types.js";
import { validatePlan } from "./validate.js";
export function initialState(sessionId, caption, plan, version, timeline = []) {
    return {
        sessionId,
        caption,
        plan: clonePlan(plan),
        version,
        selection: null,
        dirty: false,
        drag: null,
        conflict: false,
        error: null,
        timeline,
    };
}
export function select(state, entityId) {
    return { ...state, selection: entityId };
}
export function beginDrag(state, entityId, mode, gx, gy) {
    const original = state.plan.layouts[entityId];
    if (!original) {
        return state;
    }
    return {
        ...state,
        selection: entityId,
        drag: { entityId, mode, startX: gx, startY: gy, original: [...original] },
    };
}
/** Track the pointer: snaps to the integer grid and keeps extents legal. */
export function dragTo(state, gx, gy) {
    if (!state.drag) {
        return state;
    }
    const { entityId, mode, startX, startY, original } = state.drag;
    const dx = gx - startX;
    const dy = gy - startY;
    const candidate = mode === "move" ? movedBox(original, dx, dy) : resizedBox(original, dx, dy);
    const layouts = { ...state.plan.layouts, [entityId]: candidate };
    return { ...state, plan: { ...state.plan, layouts }, dirty: true };
}
export function endDrag(state) {
    return state.drag ? { ...state, drag: null } : state;
}
/** Replace one box outright; rejected inline when the box is illegal. */
export function setBox(state, entityId, box) {
    if (!(entityId in state.plan.layouts)) {
        return { state, error: `unknown entity ${entityId}` };
    }
    if (!isValidBox(box)) {
        return { state, error: "box must stay on the grid with at least 1x1 extent" };
    }
    const layouts = { ...state.plan.layouts, [entityId]: [...box] };
    return {
        state: { ...state, plan: { ...state.plan, layouts }, dirty: true },
        error: null,
    };
}
function nextId(plan, kind) {
    const prefix = kind === "object" ? "I" : "T";
    let index = 0;
    const taken = new Set(plan.entities.map((e) => e.id));
    while (taken.has(`${prefix}${index}`)) {
        index += 1;
    }
    return `${prefix}${index}`;
}
export function addEntity(state, kind, description, box = [40, 40, 14, kind === "object" ? 14 : 4]) {
    if (!description.trim()) {
        return { state, error: "description must be non-empty" };
    }
    if (!isValidBox(box)) {
        return { state, error: "box must stay on the grid with at least 1x1 extent" };
    }
    const id = nextId(state.plan, kind);
    const plan = clonePlan(state.plan);
    plan.entities.push({ id, kind, description: description.trim() });
    plan.layouts[id] = [...box];
    return { state: { ...state, plan, dirty: true, selection: id }, error: null };
}
export function removeEntity(state, entityId) {
    const plan = clonePlan(state.plan);
    plan.entities = plan.entities.filter((e) => e.id !== entityId);
    plan.relationships = plan.relationships.filter((r) => r.source !== entityId && r.target !== entityId);
    delete plan.layouts[entityId];
    return {
        ...state,
        plan,
        dirty: true,
        selection: state.selection === entityId ? null : state.selection,
    };
}
export function relink(state, source, target, kind) {
    const plan = clonePlan(state.plan);
    plan.relationships.push({ source, target, kind });
    const violations = validatePlan(plan);
    if (violations.length) {
        return { state, error: violations[0].message };
    }
    return { state: { ...state, plan, dirty: true }, error: null };
}
/** Guard used before every PUT: the UI never sends an invalid plan. */
export function readyToSave(state) {
    const violations = validatePlan(state.plan);
    return { ok: state.dirty && violations.length === 0, reasons: violations.map((v) => v.message) };
}
export function applyServerPlan(state, plan, version) {
    return {
        ...state,
        plan: clonePlan(plan),
        version,
        dirty: false,
        drag: null,
        conflict: false,
        error: null,
    };
}
export function markConflict(state) {
    return { ...state, conflict: true };
}
export function appendTimeline(state, steps) {
    return { ...state, timeline: [...state.timeline, ...steps] };
}
