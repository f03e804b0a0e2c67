// Wires the connection, the hold-input capture and the view together.

import { ConnectionEvents, SessionConnection, SocketFactory } from "./connection.js";
import { HoldInput } from "./input.js";
import { Frame, Hello } from "./protocol.js";
import { CockpitView } from "./view.js";

export interface CockpitOptions {
  baseUrl: string; // e.g. http://localhost:8000
  sessionId: string;
  socketFactory?: SocketFactory;
  inputTarget?: EventTarget;
  onFrame?: (frame: Frame) => void;
  onHello?: (hello: Hello) => void;
}

export interface SessionRequest {
  interface: "asp" | "bsp";
  task?: string | null;
  config?: string | null;
  tick_ms?: number;
}

export async function createSession(
  baseUrl: string,
  request: SessionRequest,
): Promise<{ session_id: string }> {
  const response = await fetch(`${baseUrl}/sessions`, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(request),
  });
  if (!response.ok) {
    throw new Error(`session create failed: ${response.status} ${await response.text()}`);
  }
  return (await response.json()) as { session_id: string };
}

export class CockpitApp {
  readonly view: CockpitView;
  readonly input: HoldInput;
  readonly connection: SessionConnection;
  private gaugeTimer: ReturnType<typeof setInterval> | null = null;

  constructor(root: HTMLElement, options: CockpitOptions) {
    this.view = new CockpitView(root);
    const wsUrl =
      options.baseUrl.replace(/^http/, "ws") + `/sessions/${options.sessionId}/ws`;
    const events: ConnectionEvents = {
      onHello: (hello) => {
        this.view.applyHello(hello);
        options.onHello?.(hello);
      },
      onFrame: (frame) => {
        this.view.applyFrame(frame);
        options.onFrame?.(frame);
      },
      onStatus: (connected) => {
        this.view.setConnected(connected);
        if (connected) {
          this.input.onReconnect();
        } else {
          this.input.onDisconnect();
        }
      },
      onReject: (reason) => console.warn("cockpit: input rejected:", reason),
      onClosed: (reason) => {
        this.view.setConnected(false);
        this.view.status.textContent = `session closed: ${reason}`;
      },
    };
    this.connection = new SessionConnection(wsUrl, events, options.socketFactory);
    this.input = new HoldInput(
      options.inputTarget ?? window,
      (message) => this.connection.sendInput(message),
    );
  }

  start(): void {
    this.input.attach();
    this.connection.connect();
    this.gaugeTimer = setInterval(() => {
      this.view.renderGauge(this.input.holdDuration());
    }, 50);
  }

  stop(): void {
    if (this.gaugeTimer !== null) clearInterval(this.gaugeTimer);
    this.input.detach();
    this.connection.close();
  }
}
