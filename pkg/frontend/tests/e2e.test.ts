// End-to-end against the real simulation server: spawns the Python
// service, speaks the production websocket protocol, and drives the two
// flagship flows (draw a square -> formation; drag-to-scale a rectangle).

import { spawn, type ChildProcess } from "node:child_process";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import WebSocket from "ws";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { msg, type ClientMessage, type ServerMessage, type Snapshot } from "../src/protocol.js";
import { commitStrokesMessage } from "../src/tools.js";

const here = dirname(fileURLToPath(import.meta.url));
const repoRoot = join(here, "..", "..");
const PORT = 8931;

let server: ChildProcess;

async function waitForServer(timeoutMs = 20_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const res = await fetch(`http://127.0.0.1:${PORT}/state`);
      if (res.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 200));
  }
  throw new Error("simulation server did not come up");
}

beforeAll(async () => {
  server = spawn(
    "python3",
    ["-m", "swarmshape.cli", "--serve", "--scenario", "scenarios/rectangle.json", "--port", String(PORT)],
    { cwd: repoRoot, stdio: "ignore", env: { ...process.env, PYTHONPATH: join(repoRoot, "src") } },
  );
  await waitForServer();
}, 30_000);

afterAll(() => {
  server?.kill();
});

class Session {
  private socket: WebSocket;
  private queue: ServerMessage[] = [];
  private waiters: ((m: ServerMessage) => void)[] = [];

  constructor() {
    this.socket = new WebSocket(`ws://127.0.0.1:${PORT}/ws`);
    this.socket.on("message", (data) => {
      const parsed = JSON.parse(data.toString()) as ServerMessage;
      const waiter = this.waiters.shift();
      if (waiter) waiter(parsed);
      else this.queue.push(parsed);
    });
  }

  ready(): Promise<void> {
    return new Promise((resolve, reject) => {
      this.socket.on("open", () => resolve());
      this.socket.on("error", reject);
    });
  }

  send(message: ClientMessage): void {
    this.socket.send(JSON.stringify(message));
  }

  next(timeoutMs = 10_000): Promise<ServerMessage> {
    const queued = this.queue.shift();
    if (queued) return Promise.resolve(queued);
    return new Promise((resolve, reject) => {
      const timer = setTimeout(() => reject(new Error("timed out waiting for message")), timeoutMs);
      this.waiters.push((m) => {
        clearTimeout(timer);
        resolve(m);
      });
    });
  }

  async until(type: ServerMessage["type"], limit = 300): Promise<ServerMessage> {
    for (let i = 0; i < limit; i++) {
      const m = await this.next();
      if (m.type === type) return m;
    }
    throw new Error(`no ${type} message in ${limit} receives`);
  }

  close(): void {
    this.socket.close();
  }
}

describe("end-to-end against the live server", () => {
  it(
    "draw-square flow: committed strokes become a held formation",
    async () => {
      const session = new Session();
      await session.ready();
      const first = (await session.until("snapshot")) as Snapshot;
      expect(first.robots.length).toBe(4);

      // four strokes around a 160 mm square, as the draw tool would commit
      const cx = 575;
      const cy = 370;
      const h = 80;
      const strokes: [number, number][][] = [
        [
          [cx - h, cy - h],
          [cx + h, cy - h],
        ],
        [
          [cx + h, cy - h],
          [cx + h, cy + h],
        ],
        [
          [cx + h, cy + h],
          [cx - h, cy + h],
        ],
        [
          [cx - h, cy + h],
          [cx - h, cy - h],
        ],
      ];
      const commit = commitStrokesMessage(strokes, "line");
      expect(commit).not.toBeNull();
      session.send(commit!);
      const assigned = (await session.until("snapshot")) as Snapshot;
      expect(assigned.robots.every((r) => r.goal !== null)).toBe(true);

      session.send(msg.stepOnce(3000)); // 30 simulated seconds
      let snap: Snapshot | null = null;
      for (let i = 0; i < 300; i++) {
        const m = await session.next();
        if (m.type === "snapshot" && m.time >= 29.9) {
          snap = m;
          break;
        }
      }
      expect(snap).not.toBeNull();
      expect(snap!.completed).toBe(true);
      expect(snap!.robots.every((r) => r.phase === "holding")).toBe(true);
      const extensions = snap!.robots.map((r) => Math.round(r.extension)).sort((a, b) => a - b);
      expect(extensions).toEqual([160, 160, 160, 160]);
      session.close();
    },
    60_000,
  );

  it(
    "interactive scaling: dragging a corner to 2x doubles the extensions within 10 s",
    async () => {
      const session = new Session();
      await session.ready();
      await session.until("snapshot");

      // restore the rectangle formation deterministically
      session.send(
        msg.setShape({ kind: "rectangle", width: 90, height: 60, center: [575, 370] }, "line"),
      );
      await session.until("snapshot");
      session.send(msg.stepOnce(3000));
      let snap: Snapshot | null = null;
      for (let i = 0; i < 300; i++) {
        const m = await session.next();
        if (m.type === "snapshot" && m.completed && m.robots.every((r) => r.phase === "holding")) {
          snap = m;
          break;
        }
      }
      expect(snap).not.toBeNull();
      const before = snap!.robots.map((r) => r.extension).sort((a, b) => a - b);
      expect(before[0]).toBeCloseTo(60, 0);
      expect(before[3]).toBeCloseTo(90, 0);

      const target = snap!.robots.reduce((a, b) => (a.x > b.x ? a : b));
      const others = snap!.robots.filter((r) => r.id !== target.id);
      const cx = others.reduce((s, r) => s + r.goal!.x, 0) / others.length;
      const cy = others.reduce((s, r) => s + r.goal!.y, 0) / others.length;
      const nx = cx + 2 * (target.goal!.x - cx);
      const ny = cy + 2 * (target.goal!.y - cy);
      session.send(msg.dragRobot(target.id, nx, ny, target.theta));
      await session.until("snapshot");

      const dragTime = snap!.time;
      session.send(msg.stepOnce(1000)); // exactly 10 simulated seconds
      let after: Snapshot | null = null;
      for (let i = 0; i < 400; i++) {
        const m = await session.next();
        if (m.type === "snapshot" && m.time >= dragTime + 9.99) {
          after = m;
          break;
        }
      }
      expect(after).not.toBeNull();
      expect(after!.completed).toBe(true);
      const extensions = after!.robots.map((r) => Math.round(r.extension)).sort((a, b) => a - b);
      expect(extensions).toEqual([120, 120, 180, 180]);
      session.close();
    },
    60_000,
  );

  it("server rejects malformed messages with an error reply", async () => {
    const session = new Session();
    await session.ready();
    await session.until("snapshot");
    session.send({ v: 1, type: "drag_robot" } as unknown as ClientMessage);
    const err = await session.until("error");
    expect((err as { code: string }).code).toBe("bad_message");
    session.close();
  });
});
