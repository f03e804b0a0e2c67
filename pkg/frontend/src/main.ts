// Browser bootstrap: create a session from the query string and start the
// cockpit against the serving gateway.

import { CockpitApp, createSession } from "./app.js";

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app element");
  const params = new URLSearchParams(window.location.search);
  const iface = params.get("interface") === "bsp" ? "bsp" : "asp";
  const task = params.get("task");
  const config = params.get("config");
  const tick = Number(params.get("tick_ms") ?? 50);
  try {
    const descriptor = await createSession(window.location.origin, {
      interface: iface,
      task: task || null,
      config: config || null,
      tick_ms: tick,
    });
    const app = new CockpitApp(root, {
      baseUrl: window.location.origin,
      sessionId: descriptor.session_id,
    });
    app.start();
  } catch (error) {
    root.textContent = `failed to start session: ${String(error)}`;
  }
}

void boot();
