import assert from "node:assert/strict";
import { test } from "node:test";
import { boxContains, clampExtent, clampPosition, gridToPixel, hitTest, isValidBox, movedBox, pixelToGrid, resizedBox, snap, } from "../src/geometry.js";
const plan = {
    caption: "c",
    entities: [
        { id: "I0", kind: "object", description: "sun" },
        { id: "I1", kind: "object", description: "moon" },
    ],
    relationships: [],
    layouts: { I0: [10, 10, 20, 20], I1: [20, 20, 20, 20] },
};
test("grid/pixel mapping is the renderer's uniform scale", () => {
    assert.equal(gridToPixel(24, 512), 122.88);
    assert.equal(pixelToGrid(122.88, 512), 24);
    assert.equal(gridToPixel(pixelToGrid(300, 512), 512), 300);
});
test("snapping and clamping keep boxes legal", () => {
    assert.equal(snap(13.4), 13);
    assert.equal(snap(13.5), 14);
    assert.equal(clampPosition(-3), 0);
    assert.equal(clampPosition(104.2), 100);
    assert.equal(clampExtent(0.2), 1);
    assert.equal(clampExtent(250), 100);
});
test("movedBox translates with snapping", () => {
    const box = [24, 50, 14, 14];
    assert.deepEqual(movedBox(box, -14.2, 0.4), [10, 50, 14, 14]);
    assert.deepEqual(movedBox(box, -40, -60), [0, 0, 14, 14]);
});
test("resizedBox never collapses below one grid unit", () => {
    const box = [10, 10, 4, 4];
    assert.deepEqual(resizedBox(box, -10, -10), [10, 10, 1, 1]);
    assert.deepEqual(resizedBox(box, 2.6, 0), [10, 10, 7, 4]);
});
test("hit testing returns the topmost (later-declared) entity", () => {
    assert.equal(hitTest(plan, 25, 25), "I1"); // overlap region
    assert.equal(hitTest(plan, 12, 12), "I0");
    assert.equal(hitTest(plan, 90, 90), null);
    assert.ok(boxContains([10, 10, 20, 20], 30, 30)); // edges inclusive
});
test("isValidBox mirrors the server's box rules", () => {
    assert.ok(isValidBox([0, 0, 1, 1]));
    assert.ok(isValidBox([100, 100, 100, 100])); // x+w may exceed the grid
    assert.ok(!isValidBox([0, 0, 0, 5]));
    assert.ok(!isValidBox([-1, 0, 5, 5]));
    assert.ok(!isValidBox([0.5, 0, 5, 5]));
});
