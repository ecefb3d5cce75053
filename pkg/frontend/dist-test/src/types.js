/** Canonical plan JSON shapes shared with the diagramkit service. */
export function clonePlan(plan) {
    return {
        caption: plan.caption,
        entities: plan.entities.map((e) => ({ ...e })),
        relationships: plan.relationships.map((r) => ({ ...r })),
        layouts: Object.fromEntries(Object.entries(plan.layouts).map(([id, box]) => [id, [...box]])),
    };
}
