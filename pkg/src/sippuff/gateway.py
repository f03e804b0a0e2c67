"""Session service: live engines behind HTTP + WebSocket.

Each session owns one engine advanced on a fixed tick. Clients send input
messages (press/release on a channel, or raw samples) over the session's
WebSocket and receive state frames at the tick rate. Session time is
logical (tick index x tick_ms); wall-clock only appears in descriptors.
Inbound messages are logged per tick, so replaying a session's log through
``POST /replay`` regenerates the exact frame sequence.

Message schema (client -> server, JSON):
    {"type": "press",   "channel": "sip"|"puff", "t_ms": int}
    {"type": "release", "channel": "sip"|"puff", "t_ms": int}
    {"type": "sample",  "t_ms": int, "v": float}

Server -> client messages:
    {"type": "hello", "binding_table": [...], ...}   (first message on connect)
    {"type": "ack", ...} | {"type": "error", "reason": str}
    {"type": "frame", "frame": {...}}
    {"type": "closed", "reason": str}
"""

from __future__ import annotations

import asyncio
import json
import re
import uuid
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, Request, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse, PlainTextResponse

from .arm import get_task
from .config import (
    ConfigError,
    EngineConfig,
    config_to_dict,
    default_config,
    default_config_text,
    parse_config,
)
from .control import binding_table
from .detection import PUFF, SIP, clamp_voltage, press_voltage
from .session import INTERFACES, Session

DEFAULT_TICK_MS = 50
_NAME_RE = re.compile(r"^[A-Za-z0-9_-]{1,64}$")


class SessionDriver:
    """Pure per-tick input application; shared by live loops and replay.

    Press/release messages hold a channel level that is synthesized into a
    square pulse; a sample message overrides the next tick's voltage.
    """

    def __init__(self, config: EngineConfig, interface: str, task_id: str | None, tick_ms: int):
        task = get_task(task_id) if task_id else None
        self.session = Session(config, interface, task, tick_ms=tick_ms)
        self.config = config
        self.held: str | None = None
        self.last_input_t: int | None = None
        self._override_v: float | None = None
        self.tick_index = 0

    def validate(self, message: dict) -> str | None:
        """Returns a rejection reason, or None when the message is applicable."""
        kind = message.get("type")
        if kind not in ("press", "release", "sample"):
            return f"unknown message type {kind!r}"
        t_ms = message.get("t_ms")
        if not isinstance(t_ms, int) or t_ms < 0:
            return "t_ms must be a non-negative integer"
        if self.last_input_t is not None and t_ms < self.last_input_t:
            return f"stale t_ms {t_ms} (already saw {self.last_input_t})"
        if kind == "sample":
            if not isinstance(message.get("v"), (int, float)):
                return "sample needs a numeric 'v'"
            return None
        channel = message.get("channel")
        if channel not in (SIP, PUFF):
            return f"channel must be '{SIP}' or '{PUFF}'"
        if kind == "press" and self.held is not None:
            return f"channel {self.held!r} already pressed (single-channel sensor)"
        if kind == "release" and self.held != channel:
            return "release without a matching press"
        return None

    def apply(self, message: dict) -> None:
        """Apply an already-validated message; mutates input state only."""
        kind = message["type"]
        self.last_input_t = message["t_ms"]
        if kind == "press":
            self.held = message["channel"]
        elif kind == "release":
            self.held = None
        else:
            self._override_v = clamp_voltage(float(message["v"]))

    def advance(self, messages: list[dict]) -> dict:
        """Apply one tick's messages and advance the engine one tick."""
        for message in messages:
            self.apply(message)
        if self._override_v is not None:
            voltage = self._override_v
            self._override_v = None
        elif self.held is not None:
            voltage = press_voltage(self.held, self.config.detector)
        else:
            voltage = self.config.detector.neutral_v
        self.session.step(voltage)
        self.tick_index += 1
        return self.session.frame()

    def binding_rows(self) -> list[dict]:
        return [
            {"id": uds_id, "codes": list(codes), "mode": mode}
            for uds_id, codes, mode in binding_table(self.config.library)
        ]

    def hello_context(self) -> dict:
        """Static session context sent once when a client subscribes."""
        task = self.session.tracker.task if self.session.tracker else None
        return {
            "binding_table": self.binding_rows(),
            "timers": {
                "t_match_ms": self.config.library.t_match_ms,
                "t_idle_ms": self.config.t_idle_ms,
            },
            "detector": {"long_threshold_ms": self.config.detector.long_threshold_ms},
            "bsp": {"scroll_period_ms": self.config.bsp_scroll_period_ms},
            "arm": {
                "workspace_min": list(self.config.arm.workspace_min),
                "workspace_max": list(self.config.arm.workspace_max),
            },
            "task_spec": (
                {
                    "id": task.id,
                    "description": task.description,
                    "waypoints": [
                        {
                            "x": wp.x,
                            "y": wp.y,
                            "z": wp.z,
                            "grip": wp.grip,
                            "tol_m": wp.tol_m,
                        }
                        for wp in task.waypoints
                    ],
                }
                if task is not None
                else None
            ),
        }


class SessionRuntime:
    def __init__(self, session_id: str, driver: SessionDriver, descriptor: dict):
        self.session_id = session_id
        self.driver = driver
        self.descriptor = descriptor
        self.pending: list[dict] = []
        self.log: list[dict] = []
        self.subscribers: list[asyncio.Queue] = []
        self.task: asyncio.Task | None = None
        self.closed = False

    def submit(self, message: dict) -> str | None:
        reason = self.driver.validate(message)
        if reason is None:
            # Validation state must advance immediately so a queued press
            # blocks a second press within the same tick.
            self.driver.apply(dict(message))
            self.pending.append(message)
        return reason

    async def run(self, tick_seconds: float) -> None:
        try:
            while not self.closed:
                await asyncio.sleep(tick_seconds)
                self.advance_once()
        except asyncio.CancelledError:
            pass

    def advance_once(self) -> dict:
        batch = self.pending
        self.pending = []
        if batch:
            self.log.append({"tick": self.driver.tick_index + 1, "messages": batch})
        # Messages were applied at submit time; advance() re-applies them in
        # replay, so here it only consumes the already-set input state.
        frame = self.driver.advance([])
        self.broadcast({"type": "frame", "frame": frame})
        return frame

    def broadcast(self, payload: dict) -> None:
        for queue in self.subscribers:
            if queue.full():
                # Slow consumer: drop the oldest frame, never reorder.
                try:
                    queue.get_nowait()
                except asyncio.QueueEmpty:
                    pass
            queue.put_nowait(payload)


def replay_log(
    config: EngineConfig,
    interface: str,
    task_id: str | None,
    tick_ms: int,
    log: list[dict],
    ticks: int,
) -> list[dict]:
    """Re-run a recorded inbound message log; returns the frame payloads."""
    driver = SessionDriver(config, interface, task_id, tick_ms)
    by_tick: dict[int, list[dict]] = {}
    for entry in log:
        by_tick.setdefault(int(entry["tick"]), []).extend(entry["messages"])
    frames = []
    for index in range(1, ticks + 1):
        frames.append(driver.advance(by_tick.get(index, [])))
    return frames


def create_app(store_path: str | Path | None = None, static_dir: str | Path | None = None) -> FastAPI:
    from contextlib import asynccontextmanager

    sessions: dict[str, SessionRuntime] = {}
    store = Path(store_path) if store_path else None
    if store:
        store.mkdir(parents=True, exist_ok=True)

    @asynccontextmanager
    async def lifespan(_: FastAPI):
        yield
        for runtime in list(sessions.values()):
            await close_runtime(runtime, "server shutdown")

    app = FastAPI(title="sippuff gateway", lifespan=lifespan)

    def resolve_config(name: str | None) -> EngineConfig:
        if name is None:
            return default_config()
        if store is None:
            raise ConfigError("no config store configured")
        path = store / f"{name}.yaml"
        if not path.exists():
            raise ConfigError(f"unknown config {name!r}")
        return parse_config(path.read_text(encoding="utf-8"))

    def flush_log(runtime: SessionRuntime) -> None:
        if store is None or not runtime.log:
            return
        log_dir = store / "session_logs"
        log_dir.mkdir(parents=True, exist_ok=True)
        with open(log_dir / f"{runtime.session_id}.jsonl", "w", encoding="utf-8") as fh:
            for entry in runtime.log:
                fh.write(json.dumps(entry) + "\n")

    async def close_runtime(runtime: SessionRuntime, reason: str) -> None:
        runtime.closed = True
        if runtime.task is not None:
            runtime.task.cancel()
        runtime.broadcast({"type": "closed", "reason": reason})
        flush_log(runtime)

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "sessions": len(sessions)}

    @app.post("/sessions")
    async def create_session(body: dict) -> JSONResponse:
        interface = body.get("interface", "asp")
        if interface not in INTERFACES:
            return JSONResponse({"error": f"interface must be one of {INTERFACES}"}, status_code=400)
        tick_ms = int(body.get("tick_ms", DEFAULT_TICK_MS))
        if tick_ms <= 0:
            return JSONResponse({"error": "tick_ms must be positive"}, status_code=400)
        task_id = body.get("task")
        try:
            config = resolve_config(body.get("config"))
            driver = SessionDriver(config, interface, task_id, tick_ms)
        except (ConfigError, KeyError, ValueError) as exc:
            return JSONResponse({"error": str(exc)}, status_code=400)
        session_id = uuid.uuid4().hex[:12]
        descriptor = {
            "session_id": session_id,
            "interface": interface,
            "task": task_id,
            "tick_ms": tick_ms,
            "config_name": body.get("config"),
            "config": config_to_dict(config),
            "created_at": datetime.now(timezone.utc).isoformat(),
        }
        runtime = SessionRuntime(session_id, driver, descriptor)
        runtime.task = asyncio.create_task(runtime.run(tick_ms / 1000.0))
        sessions[session_id] = runtime
        return JSONResponse(descriptor)

    @app.get("/sessions")
    def list_sessions() -> list[dict]:
        return [runtime.descriptor for runtime in sessions.values()]

    @app.delete("/sessions/{session_id}")
    async def delete_session(session_id: str) -> JSONResponse:
        runtime = sessions.pop(session_id, None)
        if runtime is None:
            return JSONResponse({"error": "unknown session"}, status_code=404)
        await close_runtime(runtime, "deleted")
        return JSONResponse({"deleted": session_id})

    @app.get("/sessions/{session_id}/log")
    def session_log(session_id: str):
        runtime = sessions.get(session_id)
        if runtime is None:
            return JSONResponse({"error": "unknown session"}, status_code=404)
        return {
            "session_id": session_id,
            "interface": runtime.descriptor["interface"],
            "task": runtime.descriptor["task"],
            "tick_ms": runtime.descriptor["tick_ms"],
            "ticks": runtime.driver.tick_index,
            "log": runtime.log,
        }

    @app.post("/replay")
    def replay(body: dict):
        interface = body.get("interface", "asp")
        if interface not in INTERFACES:
            return JSONResponse({"error": f"interface must be one of {INTERFACES}"}, status_code=400)
        try:
            config = resolve_config(body.get("config"))
            frames = replay_log(
                config,
                interface,
                body.get("task"),
                int(body.get("tick_ms", DEFAULT_TICK_MS)),
                body.get("log", []),
                int(body["ticks"]),
            )
        except (ConfigError, KeyError, ValueError) as exc:
            return JSONResponse({"error": str(exc)}, status_code=400)
        return {"frames": frames}

    @app.get("/configs/{name}")
    def get_config(name: str):
        if not _NAME_RE.match(name):
            return JSONResponse({"error": "invalid config name"}, status_code=400)
        if name == "default":
            return PlainTextResponse(default_config_text())
        if store is None:
            return JSONResponse({"error": "no config store configured"}, status_code=404)
        path = store / f"{name}.yaml"
        if not path.exists():
            return JSONResponse({"error": f"unknown config {name!r}"}, status_code=404)
        return PlainTextResponse(path.read_text(encoding="utf-8"))

    @app.put("/configs/{name}")
    async def put_config(name: str, request: Request):
        # Body is either the raw YAML text or JSON {"content": "<yaml>"}.
        if not _NAME_RE.match(name) or name == "default":
            return JSONResponse({"error": "invalid config name"}, status_code=400)
        if store is None:
            return JSONResponse({"error": "no config store configured"}, status_code=400)
        content = (await request.body()).decode("utf-8")
        try:
            parsed = json.loads(content)
            if isinstance(parsed, dict) and isinstance(parsed.get("content"), str):
                content = parsed["content"]
        except json.JSONDecodeError:
            pass
        try:
            parse_config(content)
        except ConfigError as exc:
            return JSONResponse({"error": str(exc)}, status_code=400)
        (store / f"{name}.yaml").write_text(content, encoding="utf-8")
        return {"stored": name}

    @app.websocket("/sessions/{session_id}/ws")
    async def session_ws(websocket: WebSocket, session_id: str) -> None:
        await websocket.accept()
        runtime = sessions.get(session_id)
        if runtime is None:
            await websocket.send_json({"type": "error", "reason": "unknown session"})
            await websocket.close()
            return
        await websocket.send_json(
            {
                "type": "hello",
                "session_id": session_id,
                "interface": runtime.descriptor["interface"],
                "task": runtime.descriptor["task"],
                "tick_ms": runtime.descriptor["tick_ms"],
                **runtime.driver.hello_context(),
            }
        )
        queue: asyncio.Queue = asyncio.Queue(maxsize=256)
        runtime.subscribers.append(queue)

        async def pump() -> None:
            while True:
                payload = await queue.get()
                await websocket.send_json(payload)
                if payload.get("type") == "closed":
                    return

        pump_task = asyncio.create_task(pump())
        try:
            while True:
                message = await websocket.receive_json()
                reason = runtime.submit(message)
                if reason is None:
                    await websocket.send_json({"type": "ack", "t_ms": message.get("t_ms")})
                else:
                    await websocket.send_json({"type": "error", "reason": reason})
        except WebSocketDisconnect:
            pass
        finally:
            pump_task.cancel()
            if queue in runtime.subscribers:
                runtime.subscribers.remove(queue)

    if static_dir and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="cockpit")

    return app


def serve(port: int, store_path: str | Path | None = None, static_dir: str | Path | None = None) -> None:
    import uvicorn

    app = create_app(store_path=store_path, static_dir=static_dir)
    uvicorn.run(app, host="0.0.0.0", port=port)
