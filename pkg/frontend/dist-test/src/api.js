export class ApiClient {
    baseUrl;
    fetchFn;
    constructor(baseUrl = "", fetchFn = (input, init) => fetch(input, init)) {
        this.baseUrl = baseUrl;
        this.fetchFn = fetchFn;
    }
    async request(path, init) {
        return this.fetchFn(`${this.baseUrl}${path}`, init);
    }
    async json(path, init) {
        const response = await this.request(path, init);
        if (!response.ok) {
            throw new Error(`${init?.method ?? "GET"} ${path} failed with ${response.status}`);
        }
        return response.json();
    }
    post(body) {
        return {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(body),
        };
    }
    async createSession(body) {
        const data = (await this.json("/session", this.post(body)));
        return { sessionId: data.session_id, version: data.version, plan: data.plan };
    }
    async getPlan(sessionId) {
        return (await this.json(`/session/${sessionId}/plan`));
    }
    async putPlan(sessionId, plan, version) {
        const response = await this.request(`/session/${sessionId}/plan`, {
            method: "PUT",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify({ plan, version }),
        });
        if (response.status === 409) {
            const body = (await response.json());
            return { kind: "conflict", currentVersion: body.detail.current_version };
        }
        if (response.status === 400) {
            const body = (await response.json());
            return { kind: "invalid", violations: body.detail.violations ?? [] };
        }
        if (!response.ok) {
            throw new Error(`PUT /session/${sessionId}/plan failed with ${response.status}`);
        }
        const body = (await response.json());
        return { kind: "saved", version: body.version, plan: body.plan };
    }
    async audit(sessionId) {
        return (await this.json(`/session/${sessionId}/audit`, this.post({})));
    }
    async refine(sessionId) {
        return (await this.json(`/session/${sessionId}/refine`, this.post({})));
    }
    async renderSvg(sessionId, canvasSide = 512) {
        const response = await this.request(`/session/${sessionId}/render.svg?canvas=${canvasSide}`);
        if (!response.ok) {
            throw new Error(`render failed with ${response.status}`);
        }
        return response.text();
    }
    async exportScript(sessionId, dialect) {
        return (await this.json(`/session/${sessionId}/export`, this.post({ dialect })));
    }
    async trace(sessionId) {
        return (await this.json(`/session/${sessionId}/trace`));
    }
}
