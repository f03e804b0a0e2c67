import { afterEach, beforeEach, describe, expect, it } from "vitest";

import { HoldInput } from "../src/input.js";

type Sent = { type: "press" | "release"; channel: "sip" | "puff" };

function key(type: "keydown" | "keyup", key: string, repeat = false): KeyboardEvent {
  return new KeyboardEvent(type, { key, repeat });
}

describe("HoldInput", () => {
  let sent: Sent[];
  let input: HoldInput;

  beforeEach(() => {
    sent = [];
    input = new HoldInput(window, (message) => {
      sent.push(message);
      return true;
    });
    input.attach();
  });

  afterEach(() => {
    input.detach();
  });

  it("maps a held sip key to press then release", () => {
    window.dispatchEvent(key("keydown", "s"));
    expect(sent).toEqual([{ type: "press", channel: "sip" }]);
    expect(input.held).toBe("sip");
    window.dispatchEvent(key("keyup", "s"));
    expect(sent).toEqual([
      { type: "press", channel: "sip" },
      { type: "release", channel: "sip" },
    ]);
    expect(input.held).toBeNull();
  });

  it("ignores the second key while the first is held", () => {
    window.dispatchEvent(key("keydown", "s"));
    window.dispatchEvent(key("keydown", "p"));
    expect(sent).toEqual([{ type: "press", channel: "sip" }]);
    // Releasing the ignored key changes nothing.
    window.dispatchEvent(key("keyup", "p"));
    expect(sent).toHaveLength(1);
    window.dispatchEvent(key("keyup", "s"));
    expect(sent).toHaveLength(2);
  });

  it("ignores auto-repeat keydown", () => {
    window.dispatchEvent(key("keydown", "p"));
    window.dispatchEvent(key("keydown", "p", true));
    window.dispatchEvent(key("keydown", "p", true));
    expect(sent).toEqual([{ type: "press", channel: "puff" }]);
  });

  it("measures hold duration for the gauge", async () => {
    expect(input.holdDuration()).toBeNull();
    window.dispatchEvent(key("keydown", "s"));
    await new Promise((resolve) => setTimeout(resolve, 30));
    const duration = input.holdDuration();
    expect(duration).not.toBeNull();
    expect(duration!).toBeGreaterThanOrEqual(20);
    window.dispatchEvent(key("keyup", "s"));
    expect(input.holdDuration()).toBeNull();
  });

  it("disables input while disconnected and sends a synthetic release on reconnect", () => {
    window.dispatchEvent(key("keydown", "s"));
    expect(input.held).toBe("sip");
    input.onDisconnect();
    expect(input.enabled).toBe(false);
    // Key events during the outage go nowhere.
    window.dispatchEvent(key("keyup", "s"));
    window.dispatchEvent(key("keydown", "p"));
    expect(sent).toEqual([{ type: "press", channel: "sip" }]);
    input.onReconnect();
    expect(sent).toEqual([
      { type: "press", channel: "sip" },
      { type: "release", channel: "sip" },
    ]);
    expect(input.enabled).toBe(true);
  });

  it("releases on window blur", () => {
    window.dispatchEvent(key("keydown", "p"));
    window.dispatchEvent(new Event("blur"));
    expect(sent).toEqual([
      { type: "press", channel: "puff" },
      { type: "release", channel: "puff" },
    ]);
  });
});
