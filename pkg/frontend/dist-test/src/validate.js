/** Client-side structural validation.
 *
 * Mirrors the service's rules so the editor can refuse to send a broken
 * plan instead of waiting for a 400: unique ids, live relationship
 * endpoints, label links from text labels to objects, connectors between
 * objects, one legal layout box per entity.
 */
import { isValidBox } from "./geometry.js";
export function validatePlan(plan) {
    const violations = [];
    const kinds = new Map();
    for (const entity of plan.entities) {
        if (kinds.has(entity.id)) {
            violations.push({
                rule: "duplicate_id",
                subjects: [entity.id],
                message: `entity id ${entity.id} declared more than once`,
            });
            continue;
        }
        kinds.set(entity.id, entity.kind);
        if (!entity.description.trim()) {
            violations.push({
                rule: "empty_description",
                subjects: [entity.id],
                message: `entity ${entity.id} has an empty description`,
            });
        }
    }
    for (const rel of plan.relationships) {
        if (rel.source === rel.target) {
            violations.push({
                rule: "self_reference",
                subjects: [rel.source],
                message: `relationship links ${rel.source} to itself`,
            });
            continue;
        }
        const missing = [rel.source, rel.target].filter((id) => !kinds.has(id));
        if (missing.length) {
            for (const id of missing) {
                violations.push({
                    rule: "dangling_reference",
                    subjects: [id],
                    message: `relationship references undeclared entity ${id}`,
                });
            }
            continue;
        }
        if (rel.kind === "labels") {
            if (kinds.get(rel.source) !== "text_label" || kinds.get(rel.target) !== "object") {
                violations.push({
                    rule: "bad_labels_link",
                    subjects: [rel.source, rel.target],
                    message: `labels link must go from a text label to an object: ${rel.source} labels ${rel.target}`,
                });
            }
        }
        else if (kinds.get(rel.source) !== "object" || kinds.get(rel.target) !== "object") {
            violations.push({
                rule: "bad_connector_link",
                subjects: [rel.source, rel.target],
                message: `${rel.kind} must connect two objects: ${rel.source} -> ${rel.target}`,
            });
        }
    }
    for (const entity of plan.entities) {
        const box = plan.layouts[entity.id];
        if (!box) {
            violations.push({
                rule: "missing_layout",
                subjects: [entity.id],
                message: `entity ${entity.id} has no layout box`,
            });
        }
        else if (!isValidBox(box)) {
            violations.push({
                rule: "bad_box",
                subjects: [entity.id],
                message: `layout box of ${entity.id} is off the grid or below minimum size`,
            });
        }
    }
    for (const id of Object.keys(plan.layouts)) {
        if (!kinds.has(id)) {
            violations.push({
                rule: "dangling_reference",
                subjects: [id],
                message: `layout references undeclared entity ${id}`,
            });
        }
    }
    return violations;
}
export function isStructurallyValid(plan) {
    return validatePlan(plan).length === 0;
}
