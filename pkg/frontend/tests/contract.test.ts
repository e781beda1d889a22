/**
 * UI contract tests against the mock engine server: the view layer must be
 * a pure projection of what the API returns.
 */

import { afterEach, beforeEach, describe, expect, it } from "vitest";
import { ApiClient, ApiRequestError } from "../src/api";
import {
  blockViewModels,
  hoverPanelModel,
  markerViewModels,
  onionToggleEnabled,
} from "../src/viewmodels";
import { FIXTURE_RESULT, startMockServer, type MockServer } from "./mock-server";

let server: MockServer;
let api: ApiClient;

beforeEach(async () => {
  server = await startMockServer();
  api = new ApiClient(server.baseUrl);
});

afterEach(async () => {
  await server.close();
});

describe("tag hover panel", () => {
  it("displays the triplet fields verbatim from the API", async () => {
    await api.createWorkspace(480, 480);
    const result = await api.infer("w1");
    for (const unit of result.units) {
      const rows = hoverPanelModel(unit);
      const fixture = FIXTURE_RESULT.units.find((u) => u.id === unit.id)!;
      expect(rows.find((r) => r.field === "source")?.value).toBe(fixture.primary.source);
      expect(rows.find((r) => r.field === "path")?.value).toBe(fixture.primary.path);
      expect(rows.find((r) => r.field === "target")?.value).toBe(fixture.primary.target);
      expect(rows.find((r) => r.field === "description")?.value).toBe(
        fixture.natural_language_summary,
      );
    }
  });

  it("round-trips an edit through the API and shows the new value", async () => {
    await api.infer("w1");
    const updated = await api.editUnit("w1", "hair_drag", {
      target: "hair settles behind head",
    });
    const unit = updated.units.find((u) => u.id === "hair_drag")!;
    expect(hoverPanelModel(unit).find((r) => r.field === "target")?.value).toBe(
      "hair settles behind head",
    );
  });
});

describe("timeline blocks", () => {
  it("colors every block with its owning unit's tag color", async () => {
    await api.infer("w1");
    const manifest = await api.getWorkspace("w1");
    const colorsByUnit = new Map(
      manifest.interpretation!.units.map((u) => [u.id, u.color]),
    );
    const blocks = blockViewModels(manifest.timeline!);
    expect(blocks.length).toBeGreaterThan(0);
    for (const block of blocks) {
      expect(block.color).toBe(colorsByUnit.get(block.unitId));
    }
  });

  it("moves a block through the API", async () => {
    await api.infer("w1");
    const timeline = await api.moveBlock("w1", "b3", 0.5);
    expect(timeline.blocks.find((b) => b.id === "b3")?.start).toBe(0.5);
  });
});

describe("onion-skin toggle", () => {
  it("stays disabled until at least one frame is done", async () => {
    await api.infer("w1");
    let manifest = await api.getWorkspace("w1");
    expect(onionToggleEnabled(manifest.frames)).toBe(false);

    await api.generate("w1");
    manifest = await api.getWorkspace("w1");
    expect(onionToggleEnabled(manifest.frames)).toBe(true);
  });

  it("is enabled by a single done frame among pending ones", () => {
    expect(
      onionToggleEnabled([
        { frame_id: "f0", marker_id: "k1", index: 0, status: "done",
          prompt_digest: "", parent_frame_id: null, has_image: true },
        { frame_id: "f1", marker_id: "k2", index: 1, status: "pending",
          prompt_digest: "", parent_frame_id: "f0", has_image: false },
      ]),
    ).toBe(true);
  });
});

describe("generation stream", () => {
  it("streams generating/done per frame then resolves the final list", async () => {
    await api.infer("w1");
    const seen: [number, string][] = [];
    const frames = await api.generate("w1", (frame) => seen.push([frame.index, frame.status]));
    expect(seen).toEqual([
      [0, "generating"],
      [0, "done"],
      [1, "generating"],
      [1, "done"],
    ]);
    expect(frames.map((f) => f.frame_id)).toEqual(["f0", "f1"]);
  });

  it("marks timeline markers generated with thumbnail frame indices", async () => {
    await api.infer("w1");
    await api.generate("w1");
    const manifest = await api.getWorkspace("w1");
    const markers = markerViewModels(manifest.timeline!, manifest.frames);
    expect(markers.map((m) => m.status)).toEqual(["generated", "generated"]);
    expect(markers.map((m) => m.frameIndex)).toEqual([0, 1]);
  });
});

describe("layer upload", () => {
  it("PUTs the exported notation bytes verbatim", async () => {
    const bytes = new Uint8Array([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a, 1, 2, 3]);
    await api.putLayer("w1", "notation", bytes);
    expect(new Uint8Array(server.receivedLayers.get("notation")!)).toEqual(bytes);
  });
});

describe("error surfacing", () => {
  it("raises typed errors with the engine's machine code", async () => {
    await api.infer("w1");
    await expect(api.editUnit("w1", "ghost", { target: "x" })).rejects.toMatchObject({
      code: "unknown_unit",
      status: 404,
    });
    const error = await api.editUnit("w1", "ghost", { target: "x" }).catch((e) => e);
    expect(error).toBeInstanceOf(ApiRequestError);
  });
});

describe("slider updates", () => {
  it("PATCHes on release and reflects the clamped value", async () => {
    await api.infer("w1");
    const unit = await api.setSlider("w1", "body_run", "s1", 9.0);
    expect(server.sliderPatches).toEqual([{ unitId: "body_run", sliderId: "s1", value: 9.0 }]);
    expect(unit.sliders[0].value).toBe(1.5);
  });
});
