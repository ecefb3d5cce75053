/** Editor state and pure transition functions.
 *
 * All mutations go through these reducers so the DOM layer stays a thin
 * projection and the whole editing flow is testable headlessly. The
 * working plan must pass client-side validation before a save is allowed,
 * and the server version counter rides along for conflict detection.
 */
import { movedBox, resizedBox, isValidBox } from "./geometry.js";
import type { BoxTuple, EntityKind, PlanJson, RelationKind, TraceStepJson } from "./types.js";
import { clonePlan } from "./types.js";
import { validatePlan } from "./validate.js";

export type DragMode = "move" | "resize";

export interface DragState {
  entityId: string;
  mode: DragMode;
  /** pointer position at drag start, fractional grid units */
  startX: number;
  startY: number;
  original: BoxTuple;
}

export interface EditorState {
  sessionId: string;
  caption: string;
  plan: PlanJson;
  version: number;
  selection: string | null;
  dirty: boolean;
  drag: DragState | null;
  /** set when a save hit a stale version; the UI shows the conflict dialog */
  conflict: boolean;
  error: string | null;
  timeline: TraceStepJson[];
}

export function initialState(
  sessionId: string,
  caption: string,
  plan: PlanJson,
  version: number,
  timeline: TraceStepJson[] = [],
): EditorState {
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

export function select(state: EditorState, entityId: string | null): EditorState {
  return { ...state, selection: entityId };
}

export function beginDrag(
  state: EditorState,
  entityId: string,
  mode: DragMode,
  gx: number,
  gy: number,
): EditorState {
  const original = state.plan.layouts[entityId];
  if (!original) {
    return state;
  }
  return {
    ...state,
    selection: entityId,
    drag: { entityId, mode, startX: gx, startY: gy, original: [...original] as BoxTuple },
  };
}

/** Track the pointer: snaps to the integer grid and keeps extents legal. */
export function dragTo(state: EditorState, gx: number, gy: number): EditorState {
  if (!state.drag) {
    return state;
  }
  const { entityId, mode, startX, startY, original } = state.drag;
  const dx = gx - startX;
  const dy = gy - startY;
  const candidate =
    mode === "move" ? movedBox(original, dx, dy) : resizedBox(original, dx, dy);
  const layouts = { ...state.plan.layouts, [entityId]: candidate };
  return { ...state, plan: { ...state.plan, layouts }, dirty: true };
}

export function endDrag(state: EditorState): EditorState {
  return state.drag ? { ...state, drag: null } : state;
}

export interface EditResult {
  state: EditorState;
  error: string | null;
}

/** Replace one box outright; rejected inline when the box is illegal. */
export function setBox(state: EditorState, entityId: string, box: BoxTuple): EditResult {
  if (!(entityId in state.plan.layouts)) {
    return { state, error: `unknown entity ${entityId}` };
  }
  if (!isValidBox(box)) {
    return { state, error: "box must stay on the grid with at least 1x1 extent" };
  }
  const layouts = { ...state.plan.layouts, [entityId]: [...box] as BoxTuple };
  return {
    state: { ...state, plan: { ...state.plan, layouts }, dirty: true },
    error: null,
  };
}

function nextId(plan: PlanJson, kind: EntityKind): string {
  const prefix = kind === "object" ? "I" : "T";
  let index = 0;
  const taken = new Set(plan.entities.map((e) => e.id));
  while (taken.has(`${prefix}${index}`)) {
    index += 1;
  }
  return `${prefix}${index}`;
}

export function addEntity(
  state: EditorState,
  kind: EntityKind,
  description: string,
  box: BoxTuple = [40, 40, 14, kind === "object" ? 14 : 4],
): EditResult {
  if (!description.trim()) {
    return { state, error: "description must be non-empty" };
  }
  if (!isValidBox(box)) {
    return { state, error: "box must stay on the grid with at least 1x1 extent" };
  }
  const id = nextId(state.plan, kind);
  const plan = clonePlan(state.plan);
  plan.entities.push({ id, kind, description: description.trim() });
  plan.layouts[id] = [...box] as BoxTuple;
  return { state: { ...state, plan, dirty: true, selection: id }, error: null };
}

export function removeEntity(state: EditorState, entityId: string): EditorState {
  const plan = clonePlan(state.plan);
  plan.entities = plan.entities.filter((e) => e.id !== entityId);
  plan.relationships = plan.relationships.filter(
    (r) => r.source !== entityId && r.target !== entityId,
  );
  delete plan.layouts[entityId];
  return {
    ...state,
    plan,
    dirty: true,
    selection: state.selection === entityId ? null : state.selection,
  };
}

export function relink(
  state: EditorState,
  source: string,
  target: string,
  kind: RelationKind,
): EditResult {
  const plan = clonePlan(state.plan);
  plan.relationships.push({ source, target, kind });
  const violations = validatePlan(plan);
  if (violations.length) {
    return { state, error: violations[0]!.message };
  }
  return { state: { ...state, plan, dirty: true }, error: null };
}

/** Guard used before every PUT: the UI never sends an invalid plan. */
export function readyToSave(state: EditorState): { ok: boolean; reasons: string[] } {
  const violations = validatePlan(state.plan);
  return { ok: state.dirty && violations.length === 0, reasons: violations.map((v) => v.message) };
}

export function applyServerPlan(
  state: EditorState,
  plan: PlanJson,
  version: number,
): EditorState {
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

export function markConflict(state: EditorState): EditorState {
  return { ...state, conflict: true };
}

export function appendTimeline(state: EditorState, steps: TraceStepJson[]): EditorState {
  return { ...state, timeline: [...state.timeline, ...steps] };
}
