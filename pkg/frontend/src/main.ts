import { ApiClient } from "./api.js";
import { EditorApp } from "./ui.js";
import type { PlanJson } from "./types.js";

const STARTER_PLAN: PlanJson = {
  caption: "A starter diagram: drag the boxes, then save.",
  entities: [
    { id: "I0", kind: "object", description: "sun" },
    { id: "I1", kind: "object", description: "earth" },
    { id: "T0", kind: "text_label", description: "sun" },
  ],
  relationships: [
    { source: "I0", target: "I1", kind: "arrow" },
    { source: "T0", target: "I0", kind: "labels" },
  ],
  layouts: { I0: [10, 40, 20, 20], I1: [70, 42, 14, 14], T0: [12, 32, 12, 5] },
};

async function boot(): Promise<void> {
  const api = new ApiClient();
  const params = new URLSearchParams(window.location.search);
  let sessionId = params.get("session");
  if (!sessionId) {
    const session = await api.createSession({ plan: STARTER_PLAN });
    sessionId = session.sessionId;
    params.set("session", sessionId);
    window.history.replaceState(null, "", `?${params}`);
  }
  const root = document.getElementById("editor");
  if (!root) {
    throw new Error("missing #editor element");
  }
  const app = new EditorApp(root, api);
  await app.start(sessionId);
}

void boot();
