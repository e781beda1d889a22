/** Session-state tests: local display state never leaks into engine state. */

import { describe, expect, it } from "vitest";
import {
  clearEdits,
  dragTag,
  generateEnabled,
  newSession,
  setBrush,
  setMode,
  stageEdit,
  toggleOnionFrame,
} from "../src/session";
import { confidenceBucket, motionTags, roiToRect, sliderModels } from "../src/viewmodels";
import { FIXTURE_RESULT } from "./mock-server";

describe("session", () => {
  it("mode toggle switches the stroke target layer", () => {
    let session = newSession("w1");
    expect(session.mode).toBe("drawing");
    session = setMode(session, "notation");
    expect(session.mode).toBe("notation");
  });

  it("brush settings update independently", () => {
    let session = newSession("w1");
    session = setBrush(session, { size: 12 });
    session = setBrush(session, { color: "#ff0000" });
    expect(session.brush).toEqual({ size: 12, color: "#ff0000" });
  });

  it("tag drags accumulate as display-only offsets", () => {
    let session = newSession("w1");
    session = dragTag(session, "body_run", 5, -3);
    session = dragTag(session, "body_run", 2, 1);
    expect(session.tagOffsets["body_run"]).toEqual({ dx: 7, dy: -2 });
    // engine-facing state is untouched by dragging
    const before = JSON.stringify(FIXTURE_RESULT);
    motionTags(FIXTURE_RESULT, 480, 480);
    expect(JSON.stringify(FIXTURE_RESULT)).toBe(before);
  });

  it("onion selection toggles per frame index", () => {
    let session = newSession("w1");
    session = toggleOnionFrame(session, 1);
    session = toggleOnionFrame(session, 0);
    expect(session.onionSelection).toEqual([0, 1]);
    session = toggleOnionFrame(session, 1);
    expect(session.onionSelection).toEqual([0]);
  });

  it("stale-result guard disables Generate while edits are unconfirmed", () => {
    let session = newSession("w1");
    expect(generateEnabled(session, true)).toBe(true);
    session = stageEdit(session, { unitId: "u1", field: "target", value: "x" });
    expect(generateEnabled(session, true)).toBe(false);
    session = clearEdits(session);
    expect(generateEnabled(session, true)).toBe(true);
    expect(generateEnabled({ ...session, generating: true }, true)).toBe(false);
    expect(generateEnabled(session, false)).toBe(false);
  });

  it("staged edits replace earlier edits of the same field", () => {
    let session = newSession("w1");
    session = stageEdit(session, { unitId: "u1", field: "target", value: "a" });
    session = stageEdit(session, { unitId: "u1", field: "target", value: "b" });
    expect(session.pendingEdits).toEqual([{ unitId: "u1", field: "target", value: "b" }]);
  });
});

describe("view models", () => {
  it("buckets confidence for badges", () => {
    expect(confidenceBucket(0.1)).toBe("low");
    expect(confidenceBucket(0.55)).toBe("medium");
    expect(confidenceBucket(0.9)).toBe("high");
  });

  it("anchors tags via roi rects with the bottom-left grid origin", () => {
    const rect = roiToRect([0, 0, 30, 30], 480, 480);
    expect(rect).toEqual({ left: 0, top: 0, width: 480, height: 480 });
    const top = roiToRect([0, 29, 1, 30], 300, 300);
    expect(top.top).toBe(0); // high grid y is the top of the screen
    expect(top.left).toBe(0);
  });

  it("labels slider endpoints with semantic anchors when present", () => {
    const models = sliderModels(FIXTURE_RESULT.units[0]);
    expect(models[0].minLabel).toBe("shuffle");
    expect(models[0].maxLabel).toBe("full sprint");
    const bare = sliderModels(FIXTURE_RESULT.units[1]);
    expect(bare[0].minLabel).toBe("0.5"); // numeric fallback
  });
});
