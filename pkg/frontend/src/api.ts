/** Typed fetch client for the diagramkit session API.
 *
 * Expected failure modes come back as values, not exceptions: a stale
 * version save resolves to {kind: "conflict"} and a rejected plan to
 * {kind: "invalid"} with the server's violation list.
 */
import type {
  AuditReportJson,
  PlanJson,
  TraceJson,
  TraceStepJson,
  ViolationJson,
} from "./types.js";

export interface SessionInfo {
  sessionId: string;
  version: number;
  plan: PlanJson;
}

export type SaveResult =
  | { kind: "saved"; version: number; plan: PlanJson }
  | { kind: "conflict"; currentVersion: number }
  | { kind: "invalid"; violations: ViolationJson[] };

export interface RefineResult {
  plan: PlanJson;
  version: number;
  termination: string;
  steps: TraceStepJson[];
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    return this.fetchFn(`${this.baseUrl}${path}`, init);
  }

  private async json(path: string, init?: RequestInit): Promise<unknown> {
    const response = await this.request(path, init);
    if (!response.ok) {
      throw new Error(`${init?.method ?? "GET"} ${path} failed with ${response.status}`);
    }
    return response.json();
  }

  private post(body: unknown): RequestInit {
    return {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    };
  }

  async createSession(body: {
    plan?: PlanJson;
    dsl?: string;
    caption?: string;
    topic?: string;
  }): Promise<SessionInfo> {
    const data = (await this.json("/session", this.post(body))) as {
      session_id: string;
      version: number;
      plan: PlanJson;
    };
    return { sessionId: data.session_id, version: data.version, plan: data.plan };
  }

  async getPlan(sessionId: string): Promise<{ plan: PlanJson; version: number; caption: string }> {
    return (await this.json(`/session/${sessionId}/plan`)) as {
      plan: PlanJson;
      version: number;
      caption: string;
    };
  }

  async putPlan(sessionId: string, plan: PlanJson, version: number): Promise<SaveResult> {
    const response = await this.request(`/session/${sessionId}/plan`, {
      method: "PUT",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ plan, version }),
    });
    if (response.status === 409) {
      const body = (await response.json()) as { detail: { current_version: number } };
      return { kind: "conflict", currentVersion: body.detail.current_version };
    }
    if (response.status === 400) {
      const body = (await response.json()) as { detail: { violations?: ViolationJson[] } };
      return { kind: "invalid", violations: body.detail.violations ?? [] };
    }
    if (!response.ok) {
      throw new Error(`PUT /session/${sessionId}/plan failed with ${response.status}`);
    }
    const body = (await response.json()) as { version: number; plan: PlanJson };
    return { kind: "saved", version: body.version, plan: body.plan };
  }

  async audit(sessionId: string): Promise<AuditReportJson> {
    return (await this.json(`/session/${sessionId}/audit`, this.post({}))) as AuditReportJson;
  }

  async refine(sessionId: string): Promise<RefineResult> {
    return (await this.json(`/session/${sessionId}/refine`, this.post({}))) as RefineResult;
  }

  async renderSvg(sessionId: string, canvasSide = 512): Promise<string> {
    const response = await this.request(
      `/session/${sessionId}/render.svg?canvas=${canvasSide}`,
    );
    if (!response.ok) {
      throw new Error(`render failed with ${response.status}`);
    }
    return response.text();
  }

  async exportScript(sessionId: string, dialect: "office" | "inkscape"): Promise<{
    dialect: string;
    text: string;
    assets: Record<string, string>;
  }> {
    return (await this.json(`/session/${sessionId}/export`, this.post({ dialect }))) as {
      dialect: string;
      text: string;
      assets: Record<string, string>;
    };
  }

  async trace(sessionId: string): Promise<TraceJson> {
    return (await this.json(`/session/${sessionId}/trace`)) as TraceJson;
  }
}
