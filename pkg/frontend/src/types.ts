/** Canonical plan JSON shapes shared with the diagramkit service. */

export type EntityKind = "object" | "text_label";
export type RelationKind = "arrow" | "line" | "labels";

/** [x, y, w, h] in integer grid units on the 100x100 plan grid. */
export type BoxTuple = [number, number, number, number];

export interface EntityJson {
  id: string;
  kind: EntityKind;
  description: string;
}

export interface RelationshipJson {
  source: string;
  target: string;
  kind: RelationKind;
}

export interface PlanJson {
  caption: string;
  entities: EntityJson[];
  relationships: RelationshipJson[];
  layouts: Record<string, BoxTuple>;
}

export interface ViolationJson {
  rule: string;
  subjects: string[];
  message: string;
}

export interface AuditIssueJson {
  kind: string;
  subjects: string[];
  message: string;
  measure: number | number[] | null;
}

export interface AuditReportJson {
  verdict: "approved" | "needs_revision";
  issues: AuditIssueJson[];
}

export interface TraceStepJson {
  plan: PlanJson;
  verdict: string;
  feedback: string;
  issues: AuditIssueJson[];
  revision_source: string | null;
}

export interface TraceJson {
  steps: TraceStepJson[];
  final_plan: PlanJson;
  termination: string | null;
}

export function clonePlan(plan: PlanJson): PlanJson {
  return {
    caption: plan.caption,
    entities: plan.entities.map((e) => ({ ...e })),
    relationships: plan.relationships.map((r) => ({ ...r })),
    layouts: Object.fromEntries(
      Object.entries(plan.layouts).map(([id, box]) => [id, [...box] as BoxTuple]),
    ),
  };
}
