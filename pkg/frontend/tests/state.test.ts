import { describe, expect, it } from "vitest";

import type { ServerMessage, Snapshot } from "../src/protocol.js";
import {
  applyServer,
  beginStroke,
  endStroke,
  extendStroke,
  initialModel,
  strokeLength,
  undoStroke,
} from "../src/state.js";

function snapshot(time: number): Snapshot {
  return {
    v: 1,
    type: "snapshot",
    time,
    playing: false,
    completed: false,
    robots: [],
    objects: [],
    phase_counts: {},
  };
}

describe("view model reduction", () => {
  it("snapshot replaces, never merges", () => {
    let model = initialModel();
    model = applyServer(model, snapshot(1.0), 0);
    model = applyServer(model, snapshot(2.0), 0);
    expect(model.snapshot?.time).toBe(2.0);
  });

  it("events append to the feed with a flash window", () => {
    let model = initialModel();
    const ev: ServerMessage = { v: 1, type: "event", time: 3.2, kind: "move", text: "move robot 1" };
    model = applyServer(model, ev, 1000);
    expect(model.events).toHaveLength(1);
    expect(model.events[0].flashUntil).toBeGreaterThan(1000);
  });

  it("feed is bounded", () => {
    let model = initialModel();
    for (let i = 0; i < 200; i++) {
      model = applyServer(
        model,
        { v: 1, type: "event", time: i, kind: "place", text: `${i}` },
        0,
      );
    }
    expect(model.events.length).toBeLessThanOrEqual(60);
    expect(model.events[model.events.length - 1].text).toBe("199");
  });

  it("errors and metrics land in the model", () => {
    let model = initialModel();
    model = applyServer(model, { v: 1, type: "error", code: "rejected", text: "nope" }, 0);
    expect(model.lastError).toContain("nope");
    model = applyServer(model, { v: 1, type: "metrics", metrics: { makespan_s: 5 } }, 0);
    expect(model.metrics).toEqual({ makespan_s: 5 });
  });

  it("reduction is pure: the input model is untouched", () => {
    const model = initialModel();
    const next = applyServer(model, snapshot(1.0), 0);
    expect(model.snapshot).toBeNull();
    expect(next.snapshot?.time).toBe(1.0);
  });
});

describe("stroke editing", () => {
  it("collects points with minimum spacing", () => {
    let model = initialModel();
    model = beginStroke(model, [0, 0]);
    model = extendStroke(model, [1, 0]); // below 3 mm spacing: dropped
    model = extendStroke(model, [10, 0]);
    model = extendStroke(model, [20, 0]);
    expect(model.activeStroke).toHaveLength(3);
    model = endStroke(model);
    expect(model.strokes).toHaveLength(1);
    expect(strokeLength(model.strokes[0])).toBeCloseTo(20);
  });

  it("zero-length strokes are discarded", () => {
    let model = initialModel();
    model = beginStroke(model, [5, 5]);
    model = endStroke(model);
    expect(model.strokes).toHaveLength(0);
  });

  it("undo removes the last stroke only", () => {
    let model = initialModel();
    for (const x of [0, 100]) {
      model = beginStroke(model, [x, 0]);
      model = extendStroke(model, [x + 50, 0]);
      model = endStroke(model);
    }
    expect(model.strokes).toHaveLength(2);
    model = undoStroke(model);
    expect(model.strokes).toHaveLength(1);
    expect(model.strokes[0][0]).toEqual([0, 0]);
  });
});
