import { describe, expect, it } from "vitest";

import type { Snapshot } from "../src/protocol.js";
import { buildDisplayList, heightColor } from "../src/renderer.js";
import { applyServer, initialModel } from "../src/state.js";

function squareSnapshot(): Snapshot {
  const robots = [
    { x: 50, y: 0, theta: 0 },
    { x: 100, y: 50, theta: Math.PI / 2 },
    { x: 50, y: 100, theta: Math.PI },
    { x: 0, y: 50, theta: -Math.PI / 2 },
  ].map((p, i) => ({
    id: i,
    ...p,
    phase: "holding",
    extension: 100,
    mount: "horizontal",
    goal: null,
  }));
  return {
    v: 1,
    type: "snapshot",
    time: 12.5,
    playing: false,
    completed: true,
    robots,
    objects: [],
    phase_counts: { holding: 4 },
  };
}

describe("display list", () => {
  it("four-robot square renders four bodies and four extension strips", () => {
    const model = applyServer(initialModel(), squareSnapshot(), 0);
    const list = buildDisplayList(model);
    expect(list.filter((p) => p.kind === "body")).toHaveLength(4);
    expect(list.filter((p) => p.kind === "strip")).toHaveLength(4);
  });

  it("strips span the extension, centred on the body", () => {
    const model = applyServer(initialModel(), squareSnapshot(), 0);
    const strip = buildDisplayList(model).find((p) => p.kind === "strip") as any;
    expect(Math.hypot(strip.x2 - strip.x1, strip.y2 - strip.y1)).toBeCloseTo(100);
    expect((strip.x1 + strip.x2) / 2).toBeCloseTo(50);
  });

  it("vertical robots get height shading and a label; a 200 mm unit is at the top of the scale", () => {
    const snap = squareSnapshot();
    snap.robots = [
      { ...snap.robots[0], mount: "vertical", extension: 200 },
      { ...snap.robots[1], mount: "vertical", extension: 25 },
    ];
    const model = applyServer(initialModel(), snap, 0);
    const list = buildDisplayList(model);
    const bodies = list.filter((p) => p.kind === "body") as any[];
    expect(bodies[0].heightColor).toBe(heightColor(200));
    expect(bodies[0].heightColor).not.toBe(bodies[1].heightColor);
    const labels = list.filter((p) => p.kind === "heightLabel") as any[];
    expect(labels.map((l) => l.text)).toEqual(["200", "25"]);
    expect(list.filter((p) => p.kind === "strip")).toHaveLength(0);
  });

  it("empty snapshot renders just the grid and frame", () => {
    const model = initialModel();
    const list = buildDisplayList(model);
    expect(list.map((p) => p.kind)).toEqual(["grid", "frame"]);
  });

  it("pending strokes and overlay shapes appear", () => {
    let model = initialModel();
    model = {
      ...model,
      strokes: [
        [
          [0, 0],
          [100, 0],
        ],
      ],
      overlayShape: { kind: "rectangle", width: 100, height: 50, center: [50, 25] },
    };
    const kinds = buildDisplayList(model).map((p) => p.kind);
    expect(kinds.filter((k) => k === "stroke")).toHaveLength(2);
  });
});
