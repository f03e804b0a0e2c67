// Keyboard / mouse hold capture: holding the sip or puff key maps to a
// press/release pair on that channel. The sensor has one channel, so a
// second key is ignored while the first is held. When the connection
// drops mid-hold, a synthetic release goes out on reconnect so the
// session never sees a stuck press.

import { Channel } from "./protocol.js";

export interface InputOptions {
  sipKeys?: string[];
  puffKeys?: string[];
}

export type SendInput = (message: { type: "press" | "release"; channel: Channel }) => boolean;

export class HoldInput {
  readonly sipKeys: Set<string>;
  readonly puffKeys: Set<string>;
  enabled = true;
  held: Channel | null = null;
  heldSince: number | null = null;
  private pendingSyntheticRelease: Channel | null = null;

  constructor(
    private readonly target: EventTarget,
    private readonly send: SendInput,
    options: InputOptions = {},
  ) {
    this.sipKeys = new Set(options.sipKeys ?? ["s"]);
    this.puffKeys = new Set(options.puffKeys ?? ["p"]);
  }

  attach(): void {
    this.target.addEventListener("keydown", this.onKeyDown as EventListener);
    this.target.addEventListener("keyup", this.onKeyUp as EventListener);
    this.target.addEventListener("blur", this.onBlur);
  }

  detach(): void {
    this.target.removeEventListener("keydown", this.onKeyDown as EventListener);
    this.target.removeEventListener("keyup", this.onKeyUp as EventListener);
    this.target.removeEventListener("blur", this.onBlur);
  }

  private channelForKey(key: string): Channel | null {
    const lower = key.toLowerCase();
    if (this.sipKeys.has(lower)) return "sip";
    if (this.puffKeys.has(lower)) return "puff";
    return null;
  }

  private onKeyDown = (event: KeyboardEvent): void => {
    if (event.repeat) return;
    const channel = this.channelForKey(event.key);
    if (channel !== null) {
      event.preventDefault?.();
      this.press(channel);
    }
  };

  private onKeyUp = (event: KeyboardEvent): void => {
    const channel = this.channelForKey(event.key);
    if (channel !== null) this.release(channel);
  };

  private onBlur = (): void => {
    if (this.held !== null) this.release(this.held);
  };

  press(channel: Channel): void {
    if (!this.enabled) return;
    if (this.held !== null) return; // one pneumatic channel: second key ignored
    if (this.send({ type: "press", channel })) {
      this.held = channel;
      this.heldSince = performance.now();
    }
  }

  release(channel: Channel): void {
    if (this.held !== channel) return;
    this.held = null;
    this.heldSince = null;
    if (this.enabled) this.send({ type: "release", channel });
  }

  /** Milliseconds the current hold has lasted; null when idle. */
  holdDuration(now: number = performance.now()): number | null {
    return this.heldSince === null ? null : now - this.heldSince;
  }

  /** Connection dropped: disable inputs, remember any in-flight hold. */
  onDisconnect(): void {
    this.enabled = false;
    if (this.held !== null) {
      this.pendingSyntheticRelease = this.held;
      this.held = null;
      this.heldSince = null;
    }
  }

  /** Connection is back: flush the synthetic release, re-enable inputs. */
  onReconnect(): void {
    this.enabled = true;
    if (this.pendingSyntheticRelease !== null) {
      this.send({ type: "release", channel: this.pendingSyntheticRelease });
      this.pendingSyntheticRelease = null;
    }
  }
}
