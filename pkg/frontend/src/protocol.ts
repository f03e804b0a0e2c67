// Wire types for the gateway protocol (see the repository README).

export type Channel = "sip" | "puff";

export interface BindingRow {
  id: string;
  codes: number[];
  mode: string;
}

export interface WaypointSpec {
  x: number;
  y: number;
  z: number;
  grip: string;
  tol_m: number;
}

export interface TaskSpecInfo {
  id: string;
  description: string;
  waypoints: WaypointSpec[];
}

export interface Hello {
  type: "hello";
  session_id: string;
  interface: string;
  task: string | null;
  tick_ms: number;
  binding_table: BindingRow[];
  timers: { t_match_ms: number; t_idle_ms: number };
  detector: { long_threshold_ms: number };
  bsp: { scroll_period_ms: number };
  arm: { workspace_min: number[]; workspace_max: number[] };
  task_spec: TaskSpecInfo | null;
}

export interface SessionMetrics {
  completion_ms: number;
  moving_ms: number;
  wasted_ms: number;
  mode_selection_count: number;
  reset_count: number;
}

export interface ArmView {
  position: number[];
  orientation: number[];
  gripper: number;
  goto_active: boolean;
  saved_point: { position: number[]; orientation: number[]; gripper: number } | null;
}

export interface TaskView {
  id: string;
  fraction: number;
  done: boolean;
  next_waypoint_index: number | null;
  waypoint_count: number;
}

export interface Frame {
  t_ms: number;
  interface: string;
  phase: string;
  active_mode: string | null;
  command: { mode: string | null; direction: number; momentary_fire: boolean };
  cs: number[];
  candidates: string[];
  t_match_remaining_ms: number | null;
  t_idle_remaining_ms: number | null;
  highlight_index: number | null;
  arm: ArmView;
  task: TaskView | null;
  metrics: SessionMetrics;
}

export type ServerMessage =
  | Hello
  | { type: "frame"; frame: Frame }
  | { type: "ack"; t_ms?: number }
  | { type: "error"; reason: string }
  | { type: "closed"; reason: string };

export type InputMessage =
  | { type: "press" | "release"; channel: Channel; t_ms: number }
  | { type: "sample"; t_ms: number; v: number };

export function isFrame(value: unknown): value is Frame {
  if (typeof value !== "object" || value === null) return false;
  const frame = value as Record<string, unknown>;
  return (
    typeof frame.t_ms === "number" &&
    typeof frame.phase === "string" &&
    Array.isArray(frame.cs) &&
    Array.isArray(frame.candidates) &&
    typeof frame.arm === "object" &&
    frame.arm !== null &&
    typeof frame.metrics === "object" &&
    frame.metrics !== null
  );
}

export const CODE_LABELS: Record<number, string> = {
  1: "short sip",
  2: "long sip",
  [-1]: "short puff",
  [-2]: "long puff",
};

export const CODE_GLYPHS: Record<number, string> = {
  1: "s",
  2: "S",
  [-1]: "p",
  [-2]: "P",
};
