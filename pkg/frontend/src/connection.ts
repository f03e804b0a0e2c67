// WebSocket session client: reconnects with backoff, keeps input
// timestamps monotone, and filters malformed frames (logged, skipped).

import { Frame, Hello, InputMessage, ServerMessage, isFrame } from "./protocol.js";

export interface SocketLike {
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
  send(data: string): void;
  close(): void;
}

export type SocketFactory = (url: string) => SocketLike;

export interface ConnectionEvents {
  onHello?(hello: Hello): void;
  onFrame?(frame: Frame): void;
  onStatus?(connected: boolean): void;
  onReject?(reason: string): void;
  onClosed?(reason: string): void;
}

const defaultFactory: SocketFactory = (url) =>
  new (globalThis as any).WebSocket(url) as SocketLike;

export class SessionConnection {
  private socket: SocketLike | null = null;
  private lastT = 0;
  private stopped = false;
  private reconnectTimer: ReturnType<typeof setTimeout> | null = null;
  connected = false;

  constructor(
    private readonly url: string,
    private readonly events: ConnectionEvents,
    private readonly factory: SocketFactory = defaultFactory,
    private readonly reconnectDelayMs = 1000,
  ) {}

  connect(): void {
    this.stopped = false;
    this.open();
  }

  private open(): void {
    const socket = this.factory(this.url);
    this.socket = socket;
    socket.onopen = () => {
      this.connected = true;
      this.events.onStatus?.(true);
    };
    socket.onmessage = (event) => this.handle(String(event.data));
    socket.onerror = () => {
      /* onclose follows */
    };
    socket.onclose = () => {
      const wasConnected = this.connected;
      this.connected = false;
      this.socket = null;
      if (wasConnected) this.events.onStatus?.(false);
      if (!this.stopped) {
        this.reconnectTimer = setTimeout(() => this.open(), this.reconnectDelayMs);
      }
    };
  }

  close(): void {
    this.stopped = true;
    if (this.reconnectTimer !== null) clearTimeout(this.reconnectTimer);
    this.socket?.close();
    this.socket = null;
    this.connected = false;
  }

  private handle(raw: string): void {
    let message: ServerMessage;
    try {
      message = JSON.parse(raw) as ServerMessage;
    } catch (error) {
      console.warn("cockpit: unparseable message skipped", error);
      return;
    }
    switch (message.type) {
      case "hello":
        this.events.onHello?.(message);
        break;
      case "frame":
        if (isFrame(message.frame)) {
          this.events.onFrame?.(message.frame);
        } else {
          console.warn("cockpit: malformed frame skipped", message);
        }
        break;
      case "error":
        this.events.onReject?.(message.reason);
        break;
      case "closed":
        this.events.onClosed?.(message.reason);
        break;
      case "ack":
        break;
    }
  }

  /** Browser-measured, strictly monotone per session. */
  nextTimestamp(): number {
    const measured = Math.round(performance.now());
    this.lastT = Math.max(this.lastT + 1, measured);
    return this.lastT;
  }

  sendInput(message: Omit<InputMessage, "t_ms">): boolean {
    if (!this.connected || this.socket === null) return false;
    const stamped = { ...message, t_ms: this.nextTimestamp() } as InputMessage;
    this.socket.send(JSON.stringify(stamped));
    return true;
  }
}
