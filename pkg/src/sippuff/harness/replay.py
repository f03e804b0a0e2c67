"""Deterministic replay of recorded sensor streams.

Recording format: text, header line ``t_ms,v``, then one ``t_ms,v`` record
per line. Replay runs the full detector -> matcher -> controller pipeline
and produces three trace artifacts:

* event trace      — one line per peak: ``onset_t,offset_t,code``
* match trace      — one line per matcher outcome: ``t,kind,detail``
* controller trace — one line per sample: ``t,phase,active_mode,direction,momentary``
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from ..config import EngineConfig
from ..control import AspController
from ..detection import NonMonotonicSampleError, PeakDetector, Sample
from ..matching import MATCHED, PENDING, RESET, MatchOutcome
from ..session import SessionMetrics


class RecordingError(ValueError):
    """A recording file could not be parsed; message carries the line number."""


def read_recording(path: str | Path) -> list[Sample]:
    samples: list[Sample] = []
    last_t: int | None = None
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        return samples
    if lines[0].strip() != "t_ms,v":
        raise RecordingError(f"line 1: expected header 't_ms,v', got {lines[0]!r}")
    for number, line in enumerate(lines[1:], start=2):
        text = line.strip()
        if not text:
            continue
        parts = text.split(",")
        if len(parts) != 2:
            raise RecordingError(f"line {number}: expected 't_ms,v', got {line!r}")
        try:
            t = int(parts[0])
            v = float(parts[1])
        except ValueError as exc:
            raise RecordingError(f"line {number}: {exc}") from exc
        if t < 0:
            raise RecordingError(f"line {number}: negative timestamp {t}")
        if last_t is not None and t <= last_t:
            raise RecordingError(
                f"line {number}: timestamp {t} does not advance past {last_t}"
            )
        last_t = t
        samples.append(Sample(t, v))
    return samples


def write_recording(path: str | Path, samples: list[Sample]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("t_ms,v\n")
        for s in samples:
            fh.write(f"{s.t},{s.v}\n")


@dataclass
class ReplayResult:
    event_lines: list[str] = field(default_factory=list)
    match_lines: list[str] = field(default_factory=list)
    controller_lines: list[str] = field(default_factory=list)
    metrics: SessionMetrics = field(default_factory=SessionMetrics)

    def event_text(self) -> str:
        return "".join(line + "\n" for line in self.event_lines)

    def match_text(self) -> str:
        return "".join(line + "\n" for line in self.match_lines)

    def controller_text(self) -> str:
        return "".join(line + "\n" for line in self.controller_lines)


def _outcome_detail(outcome: MatchOutcome) -> str:
    if outcome.kind == MATCHED:
        return outcome.matched_id or ""
    if outcome.kind == PENDING:
        return "+".join(outcome.candidates)
    if outcome.kind == RESET:
        return outcome.reset_reason or ""
    return ""


def replay_samples(samples: list[Sample], config: EngineConfig) -> ReplayResult:
    result = ReplayResult()
    detector = PeakDetector(config.detector)
    controller = AspController(config.library, t_idle_ms=config.t_idle_ms)
    moving_ms = 0
    last_t = 0

    def run_step(events, now: int) -> None:
        nonlocal moving_ms, last_t
        command = controller.step(detector.level, events, now)
        for outcome_t, outcome in controller.step_outcomes:
            result.match_lines.append(
                f"{outcome_t},{outcome.kind},{_outcome_detail(outcome)}"
            )
        mode = command.mode.value if command.mode else "-"
        result.controller_lines.append(
            f"{now},{controller.phase},{mode},{command.direction},{int(command.momentary_fire)}"
        )
        if command.direction != 0:
            moving_ms += now - last_t
        last_t = now

    for sample in samples:
        try:
            events = detector.feed(sample)
        except NonMonotonicSampleError as exc:
            raise RecordingError(str(exc)) from exc
        for event in events:
            result.event_lines.append(f"{event.onset_t},{event.offset_t},{event.code}")
        run_step(events, sample.t)

    if samples:
        end_t = samples[-1].t
        tail = detector.flush(end_t)
        for event in tail:
            result.event_lines.append(f"{event.onset_t},{event.offset_t},{event.code}")
        if tail:
            run_step(tail, end_t + 1)

    completion = samples[-1].t if samples else 0
    moving = min(moving_ms, completion)
    result.metrics = SessionMetrics(
        completion_ms=completion,
        moving_ms=moving,
        wasted_ms=completion - moving,
        mode_selection_count=controller.selection_count,
        reset_count=controller.reset_count,
    )
    return result


def replay_recording(path: str | Path, config: EngineConfig) -> ReplayResult:
    return replay_samples(read_recording(path), config)


def write_traces(result: ReplayResult, out_dir: str | Path, stem: str) -> dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "events": out / f"{stem}.events",
        "matches": out / f"{stem}.matches",
        "steps": out / f"{stem}.steps",
    }
    paths["events"].write_text(result.event_text(), encoding="utf-8")
    paths["matches"].write_text(result.match_text(), encoding="utf-8")
    paths["steps"].write_text(result.controller_text(), encoding="utf-8")
    return paths
