from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from sippuff.gateway import create_app


@pytest.fixture()
def client(tmp_path):
    app = create_app(store_path=tmp_path / "store")
    with TestClient(app) as test_client:
        yield test_client


def create_session(client, **overrides) -> dict:
    body = {"interface": "asp", "tick_ms": 20}
    body.update(overrides)
    response = client.post("/sessions", json=body)
    assert response.status_code == 200, response.text
    return response.json()


def receive_until(ws, wanted: str, limit: int = 200) -> dict:
    for _ in range(limit):
        message = ws.receive_json()
        if message["type"] == wanted:
            return message
    raise AssertionError(f"no {wanted!r} message within {limit} messages")


def receive_frame_where(ws, predicate, limit: int = 400) -> dict:
    for _ in range(limit):
        message = ws.receive_json()
        if message["type"] == "frame" and predicate(message["frame"]):
            return message["frame"]
    raise AssertionError("no frame matched the predicate")


def test_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json()["status"] == "ok"


def test_session_lifecycle(client):
    descriptor = create_session(client, task="task1_jar")
    assert descriptor["interface"] == "asp"
    assert descriptor["task"] == "task1_jar"
    listed = client.get("/sessions").json()
    assert [d["session_id"] for d in listed] == [descriptor["session_id"]]
    deleted = client.delete(f"/sessions/{descriptor['session_id']}")
    assert deleted.status_code == 200
    assert client.get("/sessions").json() == []
    assert client.delete("/sessions/nope").status_code == 404


def test_bad_session_requests(client):
    assert client.post("/sessions", json={"interface": "xsp"}).status_code == 400
    assert client.post("/sessions", json={"interface": "asp", "task": "task9"}).status_code == 400


def test_hello_carries_binding_table(client):
    descriptor = create_session(client)
    with client.websocket_connect(f"/sessions/{descriptor['session_id']}/ws") as ws:
        hello = ws.receive_json()
        assert hello["type"] == "hello"
        assert len(hello["binding_table"]) == 9
        assert hello["tick_ms"] == 20


def test_short_sip_press_release_yields_code_1(client):
    descriptor = create_session(client)
    session_id = descriptor["session_id"]
    with client.websocket_connect(f"/sessions/{session_id}/ws") as ws:
        receive_until(ws, "hello")
        first = receive_until(ws, "frame")["frame"]
        ws.send_json({"type": "press", "channel": "sip", "t_ms": first["t_ms"]})
        receive_until(ws, "ack")
        # Hold for ~10 engine ticks (200 ms), then release.
        target = first["t_ms"] + 200
        receive_frame_where(ws, lambda f: f["t_ms"] >= target)
        ws.send_json({"type": "release", "channel": "sip", "t_ms": target})
        receive_until(ws, "ack")
        frame = receive_frame_where(ws, lambda f: f["cs"] == [1])
        assert frame["phase"] == "detection"
        assert frame["candidates"]  # 1 prefixes fb/lr/ud in the default library


def test_protocol_rejections(client):
    descriptor = create_session(client)
    with client.websocket_connect(f"/sessions/{descriptor['session_id']}/ws") as ws:
        receive_until(ws, "hello")
        ws.send_json({"type": "release", "channel": "sip", "t_ms": 10})
        error = receive_until(ws, "error")
        assert "without" in error["reason"]
        ws.send_json({"type": "press", "channel": "sip", "t_ms": 20})
        receive_until(ws, "ack")
        ws.send_json({"type": "press", "channel": "puff", "t_ms": 30})
        error = receive_until(ws, "error")
        assert "already pressed" in error["reason"]
        ws.send_json({"type": "sample", "t_ms": 5, "v": 2.5})
        error = receive_until(ws, "error")
        assert "stale" in error["reason"]
        ws.send_json({"type": "poke", "t_ms": 40})
        error = receive_until(ws, "error")
        assert "unknown message type" in error["reason"]


def test_unknown_session_socket(client):
    with client.websocket_connect("/sessions/nope/ws") as ws:
        message = ws.receive_json()
        assert message["type"] == "error"
        assert message["reason"] == "unknown session"


def test_sessions_are_isolated(client):
    first = create_session(client)
    second = create_session(client)
    with client.websocket_connect(f"/sessions/{first['session_id']}/ws") as ws_a:
        with client.websocket_connect(f"/sessions/{second['session_id']}/ws") as ws_b:
            receive_until(ws_a, "hello")
            receive_until(ws_b, "hello")
            frame_a = receive_until(ws_a, "frame")["frame"]
            ws_a.send_json({"type": "press", "channel": "puff", "t_ms": frame_a["t_ms"]})
            receive_until(ws_a, "ack")
            target = frame_a["t_ms"] + 200
            receive_frame_where(ws_a, lambda f: f["t_ms"] >= target)
            ws_a.send_json({"type": "release", "channel": "puff", "t_ms": target})
            frame = receive_frame_where(ws_a, lambda f: f["cs"] == [-1])
            assert frame["candidates"] == ["goto", "grip", "save"]
            # Session B never saw any input.
            frame_b = receive_frame_where(ws_b, lambda f: f["t_ms"] >= target)
            assert frame_b["cs"] == []


def test_long_puff_press_release_yields_code_minus_2(client):
    # A library where a long puff starts a sequence, so the CS shows it.
    config = (
        "sequences:\n"
        "  - {id: deep, codes: [-2, 1], mode: translate_ud}\n"
    )
    assert client.put("/configs/deep", content=config).status_code == 200
    descriptor = create_session(client, config="deep")
    with client.websocket_connect(f"/sessions/{descriptor['session_id']}/ws") as ws:
        receive_until(ws, "hello")
        first = receive_until(ws, "frame")["frame"]
        ws.send_json({"type": "press", "channel": "puff", "t_ms": first["t_ms"]})
        receive_until(ws, "ack")
        target = first["t_ms"] + 600
        receive_frame_where(ws, lambda f: f["t_ms"] >= target)
        ws.send_json({"type": "release", "channel": "puff", "t_ms": target})
        receive_until(ws, "ack")
        frame = receive_frame_where(ws, lambda f: f["cs"] == [-2])
        assert frame["candidates"] == ["deep"]


def test_frame_timestamps_strictly_increase(client):
    descriptor = create_session(client)
    with client.websocket_connect(f"/sessions/{descriptor['session_id']}/ws") as ws:
        receive_until(ws, "hello")
        stamps = []
        while len(stamps) < 10:
            message = ws.receive_json()
            if message["type"] == "frame":
                stamps.append(message["frame"]["t_ms"])
        assert stamps == sorted(stamps)
        assert len(set(stamps)) == len(stamps)


def test_config_store_round_trip(client):
    named = client.get("/configs/default")
    assert named.status_code == 200
    content = named.text
    stored = client.put("/configs/mine", content=content)
    assert stored.status_code == 200
    fetched = client.get("/configs/mine")
    assert fetched.text == content
    session = create_session(client, config="mine")
    assert session["config_name"] == "mine"
    missing = client.get("/configs/ghost")
    assert missing.status_code == 404
    invalid = client.put("/configs/broken", content="sequences: []")
    assert invalid.status_code == 200  # an empty library is legal
    really_invalid = client.put("/configs/broken", content="nonsense: [")
    assert really_invalid.status_code == 400


def test_replay_reproduces_live_frames(client):
    descriptor = create_session(client, task="task1_jar")
    session_id = descriptor["session_id"]
    live_frames: dict[int, dict] = {}
    with client.websocket_connect(f"/sessions/{session_id}/ws") as ws:
        receive_until(ws, "hello")
        first = receive_until(ws, "frame")["frame"]
        live_frames[first["t_ms"]] = first
        ws.send_json({"type": "press", "channel": "sip", "t_ms": first["t_ms"]})
        hold_until = first["t_ms"] + 200
        while True:
            message = ws.receive_json()
            if message["type"] != "frame":
                continue
            frame = message["frame"]
            live_frames[frame["t_ms"]] = frame
            if frame["t_ms"] >= hold_until:
                break
        ws.send_json({"type": "release", "channel": "sip", "t_ms": hold_until})
        while len(live_frames) < 40:
            message = ws.receive_json()
            if message["type"] == "frame":
                frame = message["frame"]
                live_frames[frame["t_ms"]] = frame
    log_response = client.get(f"/sessions/{session_id}/log")
    assert log_response.status_code == 200
    log = log_response.json()
    assert log["log"], "expected logged input batches"
    replayed = client.post(
        "/replay",
        json={
            "interface": descriptor["interface"],
            "task": descriptor["task"],
            "tick_ms": descriptor["tick_ms"],
            "ticks": max(live_frames) // descriptor["tick_ms"],
            "log": log["log"],
        },
    )
    assert replayed.status_code == 200, replayed.text
    frames = replayed.json()["frames"]
    by_t = {frame["t_ms"]: frame for frame in frames}
    assert set(live_frames) <= set(by_t)
    for t_ms, live in live_frames.items():
        assert live == by_t[t_ms], f"frame mismatch at t={t_ms}"
