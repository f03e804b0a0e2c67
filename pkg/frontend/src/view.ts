// DOM rendering. The view is strictly frame-driven: every displayed
// decision (match, reset, phase, highlight) comes from the most recent
// frame, never from local prediction.

import {
  BindingRow,
  CODE_GLYPHS,
  CODE_LABELS,
  Frame,
  Hello,
  TaskSpecInfo,
} from "./protocol.js";

const MODE_LABELS: Record<string, string> = {
  translate_fb: "forward / back",
  translate_lr: "left / right",
  translate_ud: "up / down",
  rotate_x: "rotate x",
  rotate_y: "rotate y",
  rotate_z: "rotate z",
  fingers: "fingers",
  save_point: "save point",
  goto_point: "go to point",
};

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function codeGlyphs(codes: number[]): string {
  return codes.map((code) => CODE_GLYPHS[code] ?? "?").join(" ");
}

// Headless test environments have no 2D canvas; probe each canvas once.
const contextCache = new WeakMap<HTMLCanvasElement, CanvasRenderingContext2D | null>();

function context2d(canvas: HTMLCanvasElement): CanvasRenderingContext2D | null {
  if (!contextCache.has(canvas)) {
    let ctx: CanvasRenderingContext2D | null = null;
    try {
      ctx = canvas.getContext("2d");
    } catch {
      ctx = null;
    }
    contextCache.set(canvas, ctx);
  }
  return contextCache.get(canvas) ?? null;
}

export class CockpitView {
  private hello: Hello | null = null;
  private modeRows = new Map<string, HTMLElement>(); // by sequence id
  private scrollRows: HTMLElement[] = [];
  lastFrame: Frame | null = null;
  frameCount = 0;

  readonly status: HTMLElement;
  readonly modePanel: HTMLElement;
  readonly csPanel: HTMLElement;
  readonly csCodes: HTMLElement;
  readonly phaseBadge: HTMLElement;
  readonly matchBar: HTMLElement;
  readonly idleBar: HTMLElement;
  readonly matchValue: HTMLElement;
  readonly idleValue: HTMLElement;
  readonly gaugeBar: HTMLElement;
  readonly gaugeValue: HTMLElement;
  readonly taskPanel: HTMLElement;
  readonly taskProgress: HTMLElement;
  readonly resultsPanel: HTMLElement;
  readonly topCanvas: HTMLCanvasElement;
  readonly sideCanvas: HTMLCanvasElement;

  constructor(readonly root: HTMLElement) {
    root.classList.add("cockpit");

    const header = el("header", "cockpit-header");
    this.status = el("span", "status status-connecting", "connecting…");
    this.phaseBadge = el("span", "phase-badge", "—");
    header.append(el("h1", undefined, "sip-and-puff cockpit"), this.phaseBadge, this.status);

    const grid = el("div", "cockpit-grid");

    const left = el("section", "panel-column");
    this.modePanel = el("div", "mode-panel");
    left.append(el("h2", undefined, "modes"), this.modePanel);

    this.csPanel = el("div", "cs-panel");
    this.csPanel.id = "cs-panel";
    this.csCodes = el("div", "cs-codes", "(empty)");
    this.csPanel.append(this.csCodes);
    left.append(el("h2", undefined, "current sequence"), this.csPanel);

    const timers = el("div", "timers");
    this.matchBar = el("div", "bar bar-match");
    this.matchValue = el("span", "bar-value", "—");
    this.idleBar = el("div", "bar bar-idle");
    this.idleValue = el("span", "bar-value", "—");
    timers.append(
      this.timerRow("match timeout", this.matchBar, this.matchValue),
      this.timerRow("idle timeout", this.idleBar, this.idleValue),
    );
    left.append(el("h2", undefined, "timers"), timers);

    const gauge = el("div", "gauge");
    this.gaugeBar = el("div", "bar bar-gauge");
    this.gaugeValue = el("span", "bar-value", "idle");
    gauge.append(this.timerRow("hold duration", this.gaugeBar, this.gaugeValue));
    left.append(el("h2", undefined, "input"), gauge);

    const right = el("section", "panel-column");
    const canvases = el("div", "arm-views");
    this.topCanvas = el("canvas", "arm-canvas");
    this.topCanvas.width = 260;
    this.topCanvas.height = 260;
    this.sideCanvas = el("canvas", "arm-canvas");
    this.sideCanvas.width = 260;
    this.sideCanvas.height = 220;
    const topWrap = el("figure");
    topWrap.append(this.topCanvas, el("figcaption", undefined, "top (x–y)"));
    const sideWrap = el("figure");
    sideWrap.append(this.sideCanvas, el("figcaption", undefined, "side (x–z)"));
    canvases.append(topWrap, sideWrap);
    right.append(el("h2", undefined, "arm"), canvases);

    this.taskPanel = el("div", "task-panel");
    this.taskProgress = el("div", "task-progress", "no task");
    this.taskPanel.append(this.taskProgress);
    right.append(el("h2", undefined, "task"), this.taskPanel);

    this.resultsPanel = el("div", "results-panel hidden");
    this.resultsPanel.id = "results-panel";
    right.append(this.resultsPanel);

    grid.append(left, right);
    root.append(header, grid);
  }

  private timerRow(label: string, bar: HTMLElement, value: HTMLElement): HTMLElement {
    const row = el("div", "timer-row");
    const track = el("div", "bar-track");
    track.append(bar);
    row.append(el("span", "timer-label", label), track, value);
    return row;
  }

  setConnected(connected: boolean): void {
    this.status.textContent = connected ? "live" : "reconnecting… (inputs disabled)";
    this.status.className = `status ${connected ? "status-live" : "status-down"}`;
  }

  applyHello(hello: Hello): void {
    this.hello = hello;
    this.modePanel.replaceChildren();
    this.modeRows.clear();
    this.scrollRows = [];
    if (hello.interface === "asp") {
      for (const row of hello.binding_table) {
        const node = this.bindingRow(row);
        this.modeRows.set(row.id, node);
        this.modePanel.append(node);
      }
    } else {
      // Auto-scroll baseline: the nine modes in scroll order.
      for (const mode of Object.keys(MODE_LABELS)) {
        const node = el("div", "mode-row");
        node.append(el("span", "mode-name", MODE_LABELS[mode] ?? mode));
        this.scrollRows.push(node);
        this.modePanel.append(node);
      }
    }
  }

  private bindingRow(row: BindingRow): HTMLElement {
    const node = el("div", "mode-row");
    node.dataset.sequenceId = row.id;
    const seq = el("span", "mode-codes", codeGlyphs(row.codes));
    seq.title = row.codes.map((code) => CODE_LABELS[code] ?? String(code)).join(", ");
    node.append(seq, el("span", "mode-name", MODE_LABELS[row.mode] ?? row.mode));
    return node;
  }

  renderGauge(holdMs: number | null): void {
    const boundary = this.hello?.detector.long_threshold_ms ?? 400;
    if (holdMs === null) {
      this.gaugeBar.style.width = "0%";
      this.gaugeBar.classList.remove("bar-long");
      this.gaugeValue.textContent = "idle";
      return;
    }
    const ratio = Math.min(1, holdMs / (2 * boundary));
    this.gaugeBar.style.width = `${(ratio * 100).toFixed(1)}%`;
    this.gaugeBar.classList.toggle("bar-long", holdMs >= boundary);
    this.gaugeValue.textContent = `${Math.round(holdMs)} ms ${holdMs >= boundary ? "(long)" : "(short)"}`;
  }

  applyFrame(frame: Frame): void {
    this.lastFrame = frame;
    this.frameCount += 1;

    this.phaseBadge.textContent =
      frame.phase === "command" ? `command: ${MODE_LABELS[frame.active_mode ?? ""] ?? frame.active_mode}` : frame.phase;
    this.phaseBadge.className = `phase-badge phase-${frame.phase}`;

    // Current sequence: exactly the frame's CS, no local prediction.
    this.csPanel.dataset.cs = JSON.stringify(frame.cs);
    this.csCodes.textContent = frame.cs.length ? codeGlyphs(frame.cs) : "(empty)";
    this.csCodes.title = frame.cs.map((code) => CODE_LABELS[code] ?? String(code)).join(", ");

    const candidateSet = new Set(frame.candidates);
    for (const [sequenceId, node] of this.modeRows) {
      node.classList.toggle("candidate", candidateSet.has(sequenceId));
    }
    if (this.scrollRows.length > 0) {
      this.scrollRows.forEach((node, index) =>
        node.classList.toggle("highlighted", frame.highlight_index === index),
      );
    }
    if (this.hello?.interface === "asp") {
      for (const [sequenceId, node] of this.modeRows) {
        const row = this.hello.binding_table.find((r) => r.id === sequenceId);
        node.classList.toggle(
          "active",
          frame.phase === "command" && row !== undefined && row.mode === frame.active_mode,
        );
      }
    }

    const tMatchTotal = this.hello?.timers.t_match_ms ?? 1500;
    const tIdleTotal = this.hello?.timers.t_idle_ms ?? 3000;
    this.renderBar(this.matchBar, this.matchValue, frame.t_match_remaining_ms, tMatchTotal);
    this.renderBar(this.idleBar, this.idleValue, frame.t_idle_remaining_ms, tIdleTotal);

    this.renderTask(frame);
    this.drawArm(frame);
    if (frame.task?.done) this.renderResults(frame);
  }

  private renderBar(
    bar: HTMLElement,
    value: HTMLElement,
    remaining: number | null,
    total: number,
  ): void {
    if (remaining === null) {
      bar.style.width = "0%";
      value.textContent = "—";
      return;
    }
    bar.style.width = `${((remaining / total) * 100).toFixed(1)}%`;
    value.textContent = `${remaining} ms`;
  }

  private renderTask(frame: Frame): void {
    if (frame.task === null) {
      this.taskProgress.textContent = "no task";
      return;
    }
    const { fraction, done, next_waypoint_index, waypoint_count, id } = frame.task;
    const state = done
      ? "done"
      : `waypoint ${(next_waypoint_index ?? 0) + 1} of ${waypoint_count}`;
    this.taskProgress.textContent = `${id}: ${(fraction * 100).toFixed(0)}% (${state})`;
  }

  private renderResults(frame: Frame): void {
    if (!this.resultsPanel.classList.contains("hidden")) {
      // Keep the values from the completing frame.
      return;
    }
    this.resultsPanel.classList.remove("hidden");
    const metrics = frame.metrics;
    this.resultsPanel.replaceChildren(
      el("h2", undefined, "task complete"),
      this.resultRow("completion", metrics.completion_ms, "results-completion"),
      this.resultRow("moving", metrics.moving_ms, "results-moving"),
      this.resultRow("wasted", metrics.wasted_ms, "results-wasted"),
      this.resultRow("mode selections", metrics.mode_selection_count, "results-selections"),
    );
  }

  private resultRow(label: string, value: number, id: string): HTMLElement {
    const row = el("div", "result-row");
    const amount = el("span", "result-value", String(value));
    amount.id = id;
    row.append(el("span", "result-label", label), amount);
    return row;
  }

  // -- schematic ---------------------------------------------------------

  private drawArm(frame: Frame): void {
    const bounds = this.hello?.arm;
    if (!bounds) return;
    const task = this.hello?.task_spec ?? null;
    this.drawProjection(this.topCanvas, frame, task, 0, 1, bounds);
    this.drawProjection(this.sideCanvas, frame, task, 0, 2, bounds);
  }

  private drawProjection(
    canvas: HTMLCanvasElement,
    frame: Frame,
    task: TaskSpecInfo | null,
    axisA: number,
    axisB: number,
    bounds: { workspace_min: number[]; workspace_max: number[] },
  ): void {
    const ctx = context2d(canvas);
    if (!ctx) return;
    const pad = 14;
    const minA = bounds.workspace_min[axisA];
    const maxA = bounds.workspace_max[axisA];
    const minB = bounds.workspace_min[axisB];
    const maxB = bounds.workspace_max[axisB];
    const sx = (canvas.width - 2 * pad) / (maxA - minA);
    const sy = (canvas.height - 2 * pad) / (maxB - minB);
    const px = (a: number) => pad + (a - minA) * sx;
    const py = (b: number) => canvas.height - pad - (b - minB) * sy;

    ctx.clearRect(0, 0, canvas.width, canvas.height);
    ctx.strokeStyle = "#445";
    ctx.strokeRect(px(minA), py(maxB), (maxA - minA) * sx, (maxB - minB) * sy);

    if (task) {
      const reached = frame.task
        ? frame.task.done
          ? task.waypoints.length
          : frame.task.next_waypoint_index ?? 0
        : 0;
      task.waypoints.forEach((wp, index) => {
        const coords = [wp.x, wp.y, wp.z];
        ctx.beginPath();
        ctx.arc(px(coords[axisA]), py(coords[axisB]), Math.max(3, wp.tol_m * sx), 0, Math.PI * 2);
        ctx.strokeStyle = index < reached ? "#3a5" : index === reached ? "#fa3" : "#667";
        ctx.stroke();
      });
    }

    if (frame.arm.saved_point) {
      const saved = frame.arm.saved_point.position;
      ctx.fillStyle = "#58f";
      ctx.fillRect(px(saved[axisA]) - 3, py(saved[axisB]) - 3, 6, 6);
    }

    const pos = frame.arm.position;
    ctx.beginPath();
    ctx.arc(px(pos[axisA]), py(pos[axisB]), 6, 0, Math.PI * 2);
    ctx.fillStyle = frame.arm.goto_active ? "#58f" : "#eee";
    ctx.fill();
    // Gripper aperture as a split ring around the end effector.
    const gap = 2 + frame.arm.gripper * 6;
    ctx.beginPath();
    ctx.arc(px(pos[axisA]), py(pos[axisB]), 9, gap / 10, Math.PI - gap / 10);
    ctx.strokeStyle = "#9cf";
    ctx.stroke();
    ctx.beginPath();
    ctx.arc(px(pos[axisA]), py(pos[axisB]), 9, Math.PI + gap / 10, 2 * Math.PI - gap / 10);
    ctx.stroke();
  }
}
