/**
 * In-process mock of the engine API for contract tests. Serves the
 * documented wire shapes with a run-scene-like fixture and records what it
 * receives (uploaded layer bytes, slider patches) for assertions.
 */

import http from "node:http";
import type { AddressInfo } from "node:net";
import type {
  AnimationUnit,
  FrameRecord,
  InterpretationResult,
  Timeline,
  WorkspaceManifest,
} from "../src/types";

export const FIXTURE_RESULT: InterpretationResult = {
  units: [
    {
      id: "body_run",
      color: "#e67e22",
      roi_bbox: [5, 5, 27, 15],
      primary: {
        source: "the child's whole body",
        path: "long straight arrow sweeping to the right",
        target: "several strides to the right of the current stance",
      },
      secondary_modifiers: [
        { property: "text", value: "RUN", intended_meaning: "names the motion", scope: "unit" },
      ],
      temporal_order: 1,
      confidence: 0.9,
      natural_language_summary: "The child runs to the right, brisk and bouncy.",
      sliders: [
        {
          id: "s1", label: "stride length", kind: "amplitude",
          min: 0.5, max: 1.5, default: 1.0, value: 1.0,
          min_label: "shuffle", max_label: "full sprint",
        },
      ],
    },
    {
      id: "hair_drag",
      color: "#27ae60",
      roi_bbox: [7, 18, 13, 24],
      primary: {
        source: "the ponytail and loose hair",
        path: "small arc curling back against the run direction",
        target: "hair trailing behind the head, settling late",
      },
      secondary_modifiers: [],
      temporal_order: 2,
      confidence: 0.55,
      natural_language_summary: "The hair drags behind the head, loose and floppy.",
      sliders: [
        {
          id: "s1", label: "drag amount", kind: "amplitude",
          min: 0.5, max: 1.5, default: 1.0, value: 1.0,
        },
      ],
    },
  ],
  unassigned_marks: [{ note: "stray tick near the ground line", bbox: [3, 3, 4, 4] }],
  global_timeline: ["body_run", "hair_drag"],
  legend_inferred: [{ cue: "orange marks", meaning: "primary body motion" }],
};

export const FIXTURE_TIMELINE: Timeline = {
  tracks: [
    { id: "t1", part_name: "torso", unit_id: "body_run", color: "#e67e22" },
    { id: "t2", part_name: "legs", unit_id: "body_run", color: "#e67e22" },
    { id: "t3", part_name: "ponytail", unit_id: "hair_drag", color: "#27ae60" },
  ],
  blocks: [
    { id: "b1", track_id: "t1", label: "torso lean forward", start: 0, duration: 1, description: "tips into the run" },
    { id: "b2", track_id: "t2", label: "legs stride", start: 0, duration: 1, description: "legs cycle" },
    { id: "b3", track_id: "t3", label: "ponytail lag behind", start: 1, duration: 1, description: "trails the head" },
  ],
  markers: [
    { id: "k1", time: 1, status: "placeholder", frame_ref: null },
    { id: "k2", time: 2, status: "placeholder", frame_ref: null },
  ],
  beat_duration_hint: 0.5,
};

const PNG_STUB = Buffer.from(
  "iVBORw0KGgoAAAANSUhEUgAAAAEAAAABCAYAAAAfFcSJAAAADUlEQVR4nGNgYGBgAAAABQAB" +
    "pfZFQAAAAABJRU5ErkJggg==",
  "base64",
);

export interface MockServer {
  baseUrl: string;
  close(): Promise<void>;
  /** Raw bytes of the last PUT layer body, keyed by layer name. */
  receivedLayers: Map<string, Buffer>;
  sliderPatches: { unitId: string; sliderId: string; value: number }[];
  generateCalls: number;
}

function deepCopy<T>(value: T): T {
  return JSON.parse(JSON.stringify(value)) as T;
}

export async function startMockServer(): Promise<MockServer> {
  const receivedLayers = new Map<string, Buffer>();
  const sliderPatches: MockServer["sliderPatches"] = [];
  let result: InterpretationResult | null = null;
  let timeline: Timeline | null = null;
  let frames: FrameRecord[] = [];
  const state = { generateCalls: 0 };

  const manifest = (): WorkspaceManifest => ({
    id: "w1",
    created_at: "t0",
    modified_at: "t1",
    width: 480,
    height: 480,
    brush_state: { mode: "drawing", size: 4, color: "#1a1a1a" },
    interpretation: result,
    decomposition: [],
    timeline,
    frames,
  });

  const server = http.createServer((req, res) => {
    const chunks: Buffer[] = [];
    req.on("data", (chunk) => chunks.push(chunk as Buffer));
    req.on("end", () => {
      const body = Buffer.concat(chunks);
      const url = req.url ?? "";
      const send = (status: number, payload: unknown) => {
        res.writeHead(status, { "Content-Type": "application/json" });
        res.end(JSON.stringify(payload));
      };

      if (req.method === "POST" && url === "/workspaces") {
        return send(201, { id: "w1" });
      }
      if (req.method === "GET" && url === "/workspaces/w1") {
        return send(200, manifest());
      }
      if (req.method === "PUT" && url.startsWith("/workspaces/w1/layers/")) {
        receivedLayers.set(url.split("/").pop() as string, body);
        res.writeHead(204);
        return res.end();
      }
      if (req.method === "POST" && url === "/workspaces/w1/infer") {
        result = deepCopy(FIXTURE_RESULT);
        timeline = deepCopy(FIXTURE_TIMELINE);
        return send(200, result);
      }
      if (req.method === "POST" && /\/units\/[^/]+\/edits$/.test(url)) {
        const unitId = url.split("/")[4];
        if (!result) return send(404, { code: "not_found", message: "no interpretation" });
        const unit = result.units.find((u) => u.id === unitId);
        if (!unit) return send(404, { code: "unknown_unit", message: `no unit ${unitId}` });
        const edits = JSON.parse(body.toString()) as Record<string, string | null>;
        for (const [field, value] of Object.entries(edits)) {
          if (field === "summary") unit.natural_language_summary = value ?? "";
          else (unit.primary as Record<string, string | null>)[field] = value;
        }
        unit.edited_fields = Object.keys(edits);
        return send(200, result);
      }
      if (req.method === "POST" && url === "/workspaces/w1/reinfer") {
        if (!result) return send(404, { code: "not_found", message: "no interpretation" });
        return send(200, result);
      }
      if (req.method === "PATCH" && /\/sliders\/[^/]+$/.test(url)) {
        const parts = url.split("/");
        const unitId = parts[4];
        const sliderId = parts[6];
        const { value } = JSON.parse(body.toString()) as { value: number };
        sliderPatches.push({ unitId, sliderId, value });
        const unit = result?.units.find((u) => u.id === unitId);
        if (!unit) return send(404, { code: "unknown_unit", message: "?" });
        const slider = unit.sliders.find((s) => s.id === sliderId);
        if (!slider) return send(404, { code: "unknown_slider", message: "?" });
        slider.value = Math.min(Math.max(value, slider.min), slider.max);
        return send(200, unit satisfies AnimationUnit);
      }
      if (req.method === "POST" && /:move$/.test(url)) {
        const blockId = url.split("/").pop()?.replace(":move", "") as string;
        const { start } = JSON.parse(body.toString()) as { start: number };
        const block = timeline?.blocks.find((b) => b.id === blockId);
        if (!block) return send(404, { code: "unknown_block", message: "?" });
        block.start = start;
        return send(200, timeline);
      }
      if (req.method === "POST" && url === "/workspaces/w1/generate") {
        state.generateCalls += 1;
        res.writeHead(200, { "Content-Type": "text/event-stream" });
        const statuses: FrameRecord[] = [0, 1].flatMap((index) => [
          { frame_id: `f${index}`, marker_id: `k${index + 1}`, index,
            status: "generating" as const, prompt_digest: `d${index}`,
            parent_frame_id: index ? `f${index - 1}` : null, has_image: false },
          { frame_id: `f${index}`, marker_id: `k${index + 1}`, index,
            status: "done" as const, prompt_digest: `d${index}`,
            parent_frame_id: index ? `f${index - 1}` : null, has_image: true },
        ]);
        let i = 0;
        const tick = () => {
          if (i < statuses.length) {
            res.write(`event: frame\ndata: ${JSON.stringify(statuses[i])}\n\n`);
            i += 1;
            setTimeout(tick, 5);
            return;
          }
          frames = statuses.filter((s) => s.status === "done");
          if (timeline) {
            for (const marker of timeline.markers) {
              const frame = frames.find((f) => f.marker_id === marker.id);
              if (frame) {
                marker.status = "generated";
                marker.frame_ref = frame.frame_id;
              }
            }
          }
          res.write(`event: done\ndata: ${JSON.stringify({ frames })}\n\n`);
          res.end();
        };
        tick();
        return;
      }
      if (req.method === "GET" && /\/frames\/\d+$/.test(url)) {
        res.writeHead(200, { "Content-Type": "image/png" });
        return res.end(PNG_STUB);
      }
      if (req.method === "GET" && url.startsWith("/workspaces/w1/onion")) {
        res.writeHead(200, { "Content-Type": "image/png" });
        return res.end(PNG_STUB);
      }
      if (req.method === "POST" && url === "/workspaces/w1/save") {
        return send(200, { snapshot_id: "s000001", workspace_id: "w1",
                           taken_at: "t2", digest: "abc" });
      }
      if (req.method === "GET" && url === "/workspaces/w1/history") {
        return send(200, []);
      }
      if (req.method === "GET" && url === "/health") {
        return send(200, { status: "ok", backends: { interpreter: "ok", image: "ok" } });
      }
      send(404, { code: "not_found", message: `no route for ${req.method} ${url}` });
    });
  });

  await new Promise<void>((resolve) => server.listen(0, "127.0.0.1", resolve));
  const { port } = server.address() as AddressInfo;
  return {
    baseUrl: `http://127.0.0.1:${port}`,
    receivedLayers,
    sliderPatches,
    get generateCalls() {
      return state.generateCalls;
    },
    close: () => new Promise((resolve) => server.close(() => resolve())),
  };
}
