/** Orchestration between the editor state and the session API: the
 * load / edit / save / re-render / refine flows, DOM-free and testable. */
import type { ApiClient } from "./api.js";
import {
  EditorState,
  applyServerPlan,
  appendTimeline,
  initialState,
  markConflict,
  readyToSave,
} from "./state.js";

export interface LoadedSession {
  state: EditorState;
  svg: string;
}

export async function loadSession(api: ApiClient, sessionId: string): Promise<LoadedSession> {
  const { plan, version, caption } = await api.getPlan(sessionId);
  const trace = await api.trace(sessionId);
  const svg = await api.renderSvg(sessionId);
  return { state: initialState(sessionId, caption, plan, version, trace.steps), svg };
}

export interface SaveOutcome {
  state: EditorState;
  /** fresh render after a successful save, otherwise null */
  svg: string | null;
  saved: boolean;
}

/** Push local edits: validates client-side first, reports 409 as the
 * conflict flag and 400 as an inline error, re-renders on success. */
export async function saveAndRerender(api: ApiClient, state: EditorState): Promise<SaveOutcome> {
  const gate = readyToSave(state);
  if (!gate.ok) {
    const reason = state.dirty
      ? `not saved: ${gate.reasons.join("; ")}`
      : "nothing to save";
    return { state: { ...state, error: reason }, svg: null, saved: false };
  }
  const result = await api.putPlan(state.sessionId, state.plan, state.version);
  if (result.kind === "conflict") {
    return { state: markConflict(state), svg: null, saved: false };
  }
  if (result.kind === "invalid") {
    const message = result.violations.map((v) => v.message).join("; ");
    return { state: { ...state, error: `rejected by server: ${message}` }, svg: null, saved: false };
  }
  const next = applyServerPlan(state, result.plan, result.version);
  const svg = await api.renderSvg(state.sessionId);
  return { state: next, svg, saved: true };
}

/** Resolve a version conflict by reloading the server's copy. */
export async function reloadAfterConflict(api: ApiClient, state: EditorState): Promise<LoadedSession> {
  const { plan, version } = await api.getPlan(state.sessionId);
  const svg = await api.renderSvg(state.sessionId);
  return { state: applyServerPlan(state, plan, version), svg };
}

/** Run one refinement iteration server-side and adopt the result. */
export async function refineOnce(api: ApiClient, state: EditorState): Promise<LoadedSession> {
  const result = await api.refine(state.sessionId);
  let next = applyServerPlan(state, result.plan, result.version);
  next = appendTimeline(next, result.steps);
  const svg = await api.renderSvg(state.sessionId);
  return { state: next, svg };
}
