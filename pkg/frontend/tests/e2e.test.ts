// End-to-end acceptance: the real cockpit (DOM + input capture + socket)
// against the real Python gateway, no mocks.

import { ChildProcess, spawn } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import WebSocket from "ws";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { CockpitApp, createSession } from "../src/app.js";
import { Frame, TaskSpecInfo } from "../src/protocol.js";

const PORT = 8732 + Math.floor(Math.random() * 200);
const BASE = `http://127.0.0.1:${PORT}`;
let gateway: ChildProcess;

// A sped-up but structurally identical configuration so the scripted task
// run finishes in seconds: same sequence library, faster arm, shorter
// timers, 150 ms short/long boundary.
const FAST_CONFIG = `
sequences:
  - {id: fb, codes: [1, 1], mode: translate_fb}
  - {id: lr, codes: [1, 2], mode: translate_lr}
  - {id: ud, codes: [1, -1], mode: translate_ud}
  - {id: rx, codes: [2, 1], mode: rotate_x}
  - {id: ry, codes: [2, 2], mode: rotate_y}
  - {id: rz, codes: [2, -1], mode: rotate_z}
  - {id: grip, codes: [-1, 1], mode: fingers}
  - {id: save, codes: [-1, 2], mode: save_point}
  - {id: goto, codes: [-1, -1], mode: goto_point}
timers: {t_match_ms: 500, t_idle_ms: 400}
detector: {debounce_ms: 30, long_threshold_ms: 150}
arm: {linear_rate_mps: 0.4, gripper_rate_ps: 2.0}
`;

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

async function waitForHealth(): Promise<void> {
  for (let attempt = 0; attempt < 100; attempt++) {
    try {
      const response = await fetch(`${BASE}/health`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await sleep(100);
  }
  throw new Error("gateway did not become healthy");
}

beforeAll(async () => {
  const store = mkdtempSync(join(tmpdir(), "cockpit-e2e-"));
  writeFileSync(join(store, "fast.yaml"), FAST_CONFIG);
  gateway = spawn(
    "python3",
    ["-c", `from sippuff.gateway import serve; serve(${PORT}, store_path=${JSON.stringify(store)})`],
    { stdio: "ignore" },
  );
  await waitForHealth();
});

afterAll(() => {
  gateway?.kill();
});

interface Harness {
  app: CockpitApp;
  frames: Frame[];
  taskSpec: () => TaskSpecInfo | null;
  waitForFrame: (predicate: (frame: Frame) => boolean, timeoutMs?: number) => Promise<Frame>;
  keyDown: (key: string) => void;
  keyUp: (key: string) => void;
  stop: () => void;
}

async function startCockpit(body: Record<string, unknown>): Promise<Harness> {
  const descriptor = await createSession(BASE, body as never);
  document.body.innerHTML = "<div id='app'></div>";
  const frames: Frame[] = [];
  let spec: TaskSpecInfo | null = null;
  const waiters: Array<{ predicate: (f: Frame) => boolean; resolve: (f: Frame) => void }> = [];
  const app = new CockpitApp(document.getElementById("app") as HTMLElement, {
    baseUrl: BASE,
    sessionId: descriptor.session_id,
    socketFactory: (url) => new WebSocket(url) as never,
    inputTarget: window,
    onHello: (hello) => {
      spec = hello.task_spec;
    },
    onFrame: (frame) => {
      frames.push(frame);
      for (let i = waiters.length - 1; i >= 0; i--) {
        if (waiters[i].predicate(frame)) {
          const [waiter] = waiters.splice(i, 1);
          waiter.resolve(frame);
        }
      }
    },
  });
  app.start();
  const harness: Harness = {
    app,
    frames,
    taskSpec: () => spec,
    waitForFrame: (predicate, timeoutMs = 15_000) =>
      new Promise<Frame>((resolve, reject) => {
        const latest = frames[frames.length - 1];
        if (latest && predicate(latest)) {
          resolve(latest);
          return;
        }
        const timer = setTimeout(
          () => reject(new Error("timed out waiting for frame")),
          timeoutMs,
        );
        waiters.push({
          predicate,
          resolve: (frame) => {
            clearTimeout(timer);
            resolve(frame);
          },
        });
      }),
    keyDown: (key) => window.dispatchEvent(new KeyboardEvent("keydown", { key })),
    keyUp: (key) => window.dispatchEvent(new KeyboardEvent("keyup", { key })),
    stop: () => app.stop(),
  };
  await harness.waitForFrame(() => true);
  return harness;
}

describe("cockpit against the live gateway", () => {
  it("shows code 1 in the CS panel within 2 frames of a 150 ms sip", async () => {
    const harness = await startCockpit({ interface: "asp", tick_ms: 50 });
    try {
      harness.keyDown("s");
      await sleep(150);
      harness.keyUp("s");
      const framesAtRelease = harness.app.view.frameCount;
      await harness.waitForFrame((frame) => frame.cs.length > 0, 5_000);
      const panel = document.getElementById("cs-panel") as HTMLElement;
      expect(JSON.parse(panel.dataset.cs ?? "[]")).toEqual([1]);
      expect(harness.app.view.frameCount - framesAtRelease).toBeLessThanOrEqual(2);
    } finally {
      harness.stop();
    }
  });

  it("completes task1 by scripted key sequences and reports exact metrics", async () => {
    const harness = await startCockpit({
      interface: "asp",
      task: "task1_jar",
      config: "fast",
      tick_ms: 20,
    });
    const pressKey = async (key: string, ms: number) => {
      harness.keyDown(key);
      await sleep(ms);
      harness.keyUp(key);
    };
    const pulse = async (code: number) => {
      await pressKey(code > 0 ? "s" : "p", Math.abs(code) === 1 ? 80 : 230);
      await sleep(150);
    };

    const modesByAxis = ["translate_fb", "translate_lr", "translate_ud"];
    const planLeg = (frame: Frame) => {
      const spec = harness.taskSpec();
      if (!spec || !frame.task || frame.task.done) return null;
      const wp = spec.waypoints[frame.task.next_waypoint_index ?? 0];
      const target = [wp.x, wp.y, wp.z];
      const band = 0.02;
      for (let axis = 0; axis < 3; axis++) {
        if (Math.abs(target[axis] - frame.arm.position[axis]) > band) {
          return {
            mode: modesByAxis[axis],
            direction: target[axis] - frame.arm.position[axis] > 0 ? 1 : -1,
            stop: (f: Frame) => Math.abs(target[axis] - f.arm.position[axis]) <= band,
          };
        }
      }
      if (wp.grip === "close" && frame.arm.gripper > 0.15) {
        return { mode: "fingers", direction: -1, stop: (f: Frame) => f.arm.gripper <= 0.15 };
      }
      if (wp.grip === "open" && frame.arm.gripper < 0.85) {
        return { mode: "fingers", direction: 1, stop: (f: Frame) => f.arm.gripper >= 0.85 };
      }
      return null;
    };

    try {
      const hello = harness.taskSpec();
      expect(hello).not.toBeNull();
      let doneFrame: Frame | null = null;
      for (let leg = 0; leg < 40; leg++) {
        const idle = await harness.waitForFrame(
          (frame) => frame.phase === "detection" || frame.task?.done === true,
          20_000,
        );
        if (idle.task?.done) {
          doneFrame = idle;
          break;
        }
        const plan = planLeg(idle);
        if (plan === null) {
          // Between waypoint updates; let the engine settle one frame.
          await sleep(50);
          continue;
        }
        const binding = [
          ["translate_fb", [1, 1]],
          ["translate_lr", [1, 2]],
          ["translate_ud", [1, -1]],
          ["fingers", [-1, 1]],
        ].find(([mode]) => mode === plan.mode) as [string, number[]];
        for (const code of binding[1]) {
          await pulse(code);
        }
        const entered = await harness.waitForFrame(
          (frame) => frame.phase === "command" || frame.task?.done === true,
          10_000,
        );
        if (entered.task?.done) {
          doneFrame = entered;
          break;
        }
        expect(entered.active_mode).toBe(plan.mode);
        harness.keyDown(plan.direction > 0 ? "p" : "s");
        await harness.waitForFrame(
          (frame) => plan.stop(frame) || frame.phase !== "command",
          20_000,
        );
        harness.keyUp(plan.direction > 0 ? "p" : "s");
      }
      if (doneFrame === null) {
        doneFrame = await harness.waitForFrame((frame) => frame.task?.done === true, 5_000);
      }

      // Results panel equals the completing frame's session metrics exactly.
      const results = document.getElementById("results-panel") as HTMLElement;
      expect(results.classList.contains("hidden")).toBe(false);
      const shown = document.getElementById("results-completion")?.textContent;
      expect(shown).toBe(String(doneFrame.metrics.completion_ms));
      expect(document.getElementById("results-moving")?.textContent).toBe(
        String(doneFrame.metrics.moving_ms),
      );
      expect(document.getElementById("results-wasted")?.textContent).toBe(
        String(doneFrame.metrics.wasted_ms),
      );
      expect(doneFrame.metrics.moving_ms + doneFrame.metrics.wasted_ms).toBe(
        doneFrame.metrics.completion_ms,
      );
    } finally {
      harness.stop();
    }
  }, 120_000);
});
