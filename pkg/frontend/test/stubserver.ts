/** In-memory stand-in for the session API, implementing the documented
 * semantics (validation on PUT, version conflicts, render-from-store) so
 * the client and flows can be tested without a network. */
import type { PlanJson, ViolationJson } from "../src/types.js";
import { validatePlan } from "../src/validate.js";

interface StoredSession {
  plan: PlanJson;
  version: number;
  caption: string;
  steps: unknown[];
}

export class StubServer {
  readonly sessions = new Map<string, StoredSession>();
  private counter = 0;

  seed(plan: PlanJson): string {
    this.counter += 1;
    const id = `s${this.counter}`;
    this.sessions.set(id, {
      plan: JSON.parse(JSON.stringify(plan)) as PlanJson,
      version: 1,
      caption: plan.caption,
      steps: [],
    });
    return id;
  }

  /** fetch-compatible entry point. */
  readonly fetch = async (input: string, init?: RequestInit): Promise<Response> => {
    const method = init?.method ?? "GET";
    const url = new URL(input, "http://stub");
    const body = init?.body ? (JSON.parse(String(init.body)) as Record<string, unknown>) : {};
    const match = url.pathname.match(/^\/session(?:\/([^/]+)(?:\/(.+))?)?$/);
    if (!match) {
      return this.json(404, { detail: "no route" });
    }
    const [, sessionId, tail] = match;

    if (!sessionId && method === "POST") {
      const plan = body["plan"] as PlanJson | undefined;
      if (!plan) {
        return this.json(400, { detail: { error: "plan required" } });
      }
      const id = this.seed(plan);
      const session = this.sessions.get(id)!;
      return this.json(200, { session_id: id, version: session.version, plan: session.plan });
    }

    const session = sessionId ? this.sessions.get(sessionId) : undefined;
    if (!session) {
      return this.json(404, { detail: "unknown session" });
    }

    if (tail === "plan" && method === "GET") {
      return this.json(200, {
        plan: session.plan,
        version: session.version,
        caption: session.caption,
      });
    }
    if (tail === "plan" && method === "PUT") {
      const plan = body["plan"] as PlanJson;
      const violations: ViolationJson[] = validatePlan(plan);
      if (violations.length) {
        return this.json(400, { detail: { error: "invalid", violations } });
      }
      if (body["version"] !== session.version) {
        return this.json(409, {
          detail: { error: "version conflict", current_version: session.version },
        });
      }
      session.plan = JSON.parse(JSON.stringify(plan)) as PlanJson;
      session.version += 1;
      return this.json(200, { version: session.version, plan: session.plan });
    }
    if (tail === "audit" && method === "POST") {
      return this.json(200, { verdict: "approved", issues: [] });
    }
    if (tail === "refine" && method === "POST") {
      return this.json(200, {
        plan: session.plan,
        version: session.version,
        termination: "approved",
        steps: [
          {
            plan: session.plan,
            verdict: "approved",
            feedback: "",
            issues: [],
            revision_source: null,
          },
        ],
      });
    }
    if (tail?.startsWith("render.svg")) {
      const layouts = JSON.stringify(session.plan.layouts);
      return new Response(`<svg data-layouts='${layouts}'></svg>`, {
        status: 200,
        headers: { "Content-Type": "image/svg+xml" },
      });
    }
    if (tail === "trace") {
      return this.json(200, {
        steps: session.steps,
        final_plan: session.plan,
        termination: null,
      });
    }
    return this.json(404, { detail: "no route" });
  };

  private json(status: number, payload: unknown): Response {
    return new Response(JSON.stringify(payload), {
      status,
      headers: { "Content-Type": "application/json" },
    });
  }
}
