/** DOM layer: draws the rendered SVG with draggable overlays on top and
 * projects the editor state into badges, dialogs, and the timeline. */
import { ApiClient } from "./api.js";
import { gridToPixel, hitTest, pixelToGrid } from "./geometry.js";
import {
  EditorState,
  beginDrag,
  dragTo,
  endDrag,
  select,
} from "./state.js";
import { loadSession, refineOnce, reloadAfterConflict, saveAndRerender } from "./session.js";
import type { AuditReportJson } from "./types.js";

const CANVAS_SIDE = 512;
const HANDLE = 10; // px; pointer offsets inside this corner square resize

export class EditorApp {
  private state!: EditorState;
  private audit: AuditReportJson | null = null;

  private readonly canvas: HTMLElement;
  private readonly overlayLayer: HTMLElement;
  private readonly svgHost: HTMLElement;
  private readonly status: HTMLElement;
  private readonly issues: HTMLElement;
  private readonly timeline: HTMLElement;
  private readonly conflictDialog: HTMLElement;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient = new ApiClient(),
  ) {
    root.innerHTML = `
      <div class="toolbar">
        <button data-action="save">Save &amp; re-render</button>
        <button data-action="refine">Refine once</button>
        <button data-action="export-office">Export VBA</button>
        <button data-action="export-inkscape">Export Inkscape</button>
        <span class="status"></span>
      </div>
      <div class="canvas" style="position:relative;width:${CANVAS_SIDE}px;height:${CANVAS_SIDE}px">
        <div class="svg-host"></div>
        <div class="overlays" style="position:absolute;inset:0"></div>
      </div>
      <div class="issues"></div>
      <div class="timeline"></div>
      <div class="conflict-dialog" hidden>
        <p>Someone else changed this plan (version conflict). Reload the server copy?</p>
        <button data-action="reload">Reload</button>
      </div>`;
    this.canvas = root.querySelector(".canvas") as HTMLElement;
    this.svgHost = root.querySelector(".svg-host") as HTMLElement;
    this.overlayLayer = root.querySelector(".overlays") as HTMLElement;
    this.status = root.querySelector(".status") as HTMLElement;
    this.issues = root.querySelector(".issues") as HTMLElement;
    this.timeline = root.querySelector(".timeline") as HTMLElement;
    this.conflictDialog = root.querySelector(".conflict-dialog") as HTMLElement;
    this.wireEvents();
  }

  async start(sessionId: string): Promise<void> {
    const loaded = await loadSession(this.api, sessionId);
    this.state = loaded.state;
    this.svgHost.innerHTML = loaded.svg;
    await this.refreshAudit();
    this.render();
  }

  private wireEvents(): void {
    this.root.addEventListener("click", (event) => {
      const target = event.target as HTMLElement;
      const action = target.dataset["action"];
      if (action === "save") void this.save();
      if (action === "refine") void this.refine();
      if (action === "reload") void this.reload();
      if (action === "export-office") void this.export("office");
      if (action === "export-inkscape") void this.export("inkscape");
    });

    this.overlayLayer.addEventListener("pointerdown", (event) => {
      const gx = pixelToGrid(event.offsetX + (event.target as HTMLElement).offsetLeft, CANVAS_SIDE);
      const gy = pixelToGrid(event.offsetY + (event.target as HTMLElement).offsetTop, CANVAS_SIDE);
      const hit = hitTest(this.state.plan, gx, gy);
      if (!hit) {
        this.state = select(this.state, null);
        this.render();
        return;
      }
      const box = this.state.plan.layouts[hit]!;
      const nearRight = gx >= box[0] + box[2] - pixelToGrid(HANDLE, CANVAS_SIDE);
      const nearBottom = gy >= box[1] + box[3] - pixelToGrid(HANDLE, CANVAS_SIDE);
      const mode = nearRight && nearBottom ? "resize" : "move";
      this.state = beginDrag(this.state, hit, mode, gx, gy);
      this.overlayLayer.setPointerCapture(event.pointerId);
      this.render();
    });

    this.overlayLayer.addEventListener("pointermove", (event) => {
      if (!this.state?.drag) return;
      const rect = this.canvas.getBoundingClientRect();
      const gx = pixelToGrid(event.clientX - rect.left, CANVAS_SIDE);
      const gy = pixelToGrid(event.clientY - rect.top, CANVAS_SIDE);
      this.state = dragTo(this.state, gx, gy);
      this.render();
    });

    this.overlayLayer.addEventListener("pointerup", () => {
      if (!this.state?.drag) return;
      this.state = endDrag(this.state);
      void this.refreshAudit().then(() => this.render());
    });
  }

  private async refreshAudit(): Promise<void> {
    try {
      this.audit = await this.api.audit(this.state.sessionId);
    } catch {
      this.audit = null;
    }
  }

  private async save(): Promise<void> {
    const outcome = await saveAndRerender(this.api, this.state);
    this.state = outcome.state;
    if (outcome.svg !== null) {
      this.svgHost.innerHTML = outcome.svg;
      await this.refreshAudit();
    }
    this.render();
  }

  private async reload(): Promise<void> {
    const loaded = await reloadAfterConflict(this.api, this.state);
    this.state = loaded.state;
    this.svgHost.innerHTML = loaded.svg;
    await this.refreshAudit();
    this.render();
  }

  private async refine(): Promise<void> {
    const loaded = await refineOnce(this.api, this.state);
    this.state = loaded.state;
    this.svgHost.innerHTML = loaded.svg;
    await this.refreshAudit();
    this.render();
  }

  private async export(dialect: "office" | "inkscape"): Promise<void> {
    const script = await this.api.exportScript(this.state.sessionId, dialect);
    const blob = new Blob([script.text], { type: "text/plain" });
    const link = document.createElement("a");
    link.href = URL.createObjectURL(blob);
    link.download = dialect === "office" ? "diagram.bas" : "diagram_inkscape.py";
    link.click();
    URL.revokeObjectURL(link.href);
  }

  private badgedEntities(): Set<string> {
    const flagged = new Set<string>();
    for (const issue of this.audit?.issues ?? []) {
      for (const subject of issue.subjects) {
        flagged.add(subject);
      }
    }
    return flagged;
  }

  private render(): void {
    const { plan, selection, dirty, conflict, error } = this.state;
    this.status.textContent = [
      `v${this.state.version}`,
      dirty ? "unsaved edits" : "saved",
      error ?? "",
    ]
      .filter(Boolean)
      .join(" · ");
    this.conflictDialog.hidden = !conflict;

    const flagged = this.badgedEntities();
    this.overlayLayer.replaceChildren();
    for (const entity of plan.entities) {
      const box = plan.layouts[entity.id];
      if (!box) continue;
      const div = document.createElement("div");
      div.className = "overlay";
      div.dataset["entity"] = entity.id;
      Object.assign(div.style, {
        position: "absolute",
        left: `${gridToPixel(box[0], CANVAS_SIDE)}px`,
        top: `${gridToPixel(box[1], CANVAS_SIDE)}px`,
        width: `${gridToPixel(box[2], CANVAS_SIDE)}px`,
        height: `${gridToPixel(box[3], CANVAS_SIDE)}px`,
        border: entity.id === selection ? "2px solid #2563eb" : "1px dashed #64748b",
        background: flagged.has(entity.id) ? "rgba(220,38,38,.15)" : "transparent",
        cursor: "move",
        boxSizing: "border-box",
      });
      if (flagged.has(entity.id)) {
        div.title = (this.audit?.issues ?? [])
          .filter((issue) => issue.subjects.includes(entity.id))
          .map((issue) => issue.message)
          .join("\n");
      }
      this.overlayLayer.append(div);
    }

    this.issues.replaceChildren();
    for (const issue of this.audit?.issues ?? []) {
      const li = document.createElement("div");
      li.className = `issue issue-${issue.kind}`;
      li.textContent = `[${issue.kind}] ${issue.message}`;
      this.issues.append(li);
    }

    this.timeline.replaceChildren();
    this.state.timeline.forEach((step, index) => {
      const li = document.createElement("div");
      li.className = "timeline-step";
      li.textContent = `#${index + 1} ${step.verdict}${
        step.revision_source ? ` → revised by ${step.revision_source}` : ""
      }`;
      this.timeline.append(li);
    });
  }
}
