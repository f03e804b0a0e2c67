"""Scripted virtual user: a stand-in for human participants.

The user watches the live session state (arm pose, controller phase, the
auto-scroll highlight) and plans one leg at a time from the next waypoint's
deltas: pick a control mode, select it (sequence pulses on the sequence
interface; wait-for-highlight-and-confirm on the scroll interface), hold
pressure until the axis is inside its stop band, release, and let the
inactivity timeout bring the interface back to selection.

Every delay is drawn from a seeded RNG (reaction times are truncated
normal, scroll confirmations are missed with a fixed probability), so a
given (config, task, model, seed) always produces identical metrics. The
model parameters are assumptions of this harness, not measured facts.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from typing import Callable

from ..arm import ArmState, GRIP_CLOSE, GRIP_OPEN, TaskSpec, Waypoint
from ..config import EngineConfig
from ..control import COMMAND, ControlMode, MODE_ORDER
from ..detection import PUFF, SIP, press_voltage
from ..session import ASP, Session, SessionMetrics

DEFAULT_TICK_MS = 20
DEFAULT_TIME_LIMIT_MS = 20 * 60 * 1000

_ANGLE_STOP_BAND = 0.05
_GRIP_CLOSE_STOP = 0.15
_GRIP_OPEN_STOP = 0.85


class SimulationTimeoutError(RuntimeError):
    """The session did not finish the task within the simulated wall limit."""


@dataclass(frozen=True)
class VirtualUserModel:
    reaction_mean_ms: int = 250
    reaction_sd_ms: int = 50
    short_peak_ms: int = 200
    long_peak_ms: int = 600
    inter_peak_gap_ms: int = 150
    miss_probability: float = 0.1
    rng_seed: int = 0

    def with_seed(self, seed: int) -> "VirtualUserModel":
        return replace(self, rng_seed=seed)


@dataclass
class _Pulse:
    start_t: int
    end_t: int | None  # None while a hold's release is undecided
    channel: str


@dataclass
class _Leg:
    mode: ControlMode
    direction: int
    stop: Callable[[ArmState], bool]
    waypoint_index: int


_PLAN = "plan"
_ACQUIRE = "acquire"
_AWAIT_MATCH = "await_match"
_WATCH = "watch"
_DRIVING = "driving"
_DONE = "done"

_ORIENTATION_LEGS = (
    (ControlMode.ROTATE_X, 0),
    (ControlMode.ROTATE_Y, 1),
    (ControlMode.ROTATE_Z, 2),
)
_POSITION_LEGS = (
    (ControlMode.TRANSLATE_FB, 0),
    (ControlMode.TRANSLATE_LR, 1),
    (ControlMode.TRANSLATE_UD, 2),
)


class _Agent:
    def __init__(self, model: VirtualUserModel, config: EngineConfig, rng: random.Random):
        self.model = model
        self.config = config
        self.rng = rng
        self.stage = _PLAN
        self.leg: _Leg | None = None
        self.pulses: list[_Pulse] = []
        self.deadline_t = 0
        self.prev_highlight: int | None = None

    def _reaction(self) -> int:
        return max(0, round(self.rng.gauss(self.model.reaction_mean_ms, self.model.reaction_sd_ms)))

    def held_channel(self, now: int) -> str | None:
        self.pulses = [p for p in self.pulses if p.end_t is None or p.end_t > now]
        for pulse in self.pulses:
            if pulse.start_t <= now and (pulse.end_t is None or now < pulse.end_t):
                return pulse.channel
        return None

    def decide(self, session: Session) -> str | None:
        now = session.t
        # A stage change may need an immediate follow-up decision (e.g.
        # plan -> acquire -> schedule); loop until the stage settles.
        for _ in range(4):
            stage = self.stage
            if stage == _PLAN:
                self._plan(session)
            elif stage == _ACQUIRE:
                self._acquire(session)
            elif stage == _AWAIT_MATCH:
                self._await_match(session)
            elif stage == _WATCH:
                self._watch(session)
            elif stage == _DRIVING:
                self._drive(session)
            if self.stage == stage:
                break
        return self.held_channel(now)

    # -- stages ---------------------------------------------------------

    def _plan(self, session: Session) -> None:
        tracker = session.tracker
        assert tracker is not None
        if tracker.done:
            self.stage = _DONE
            return
        wp = tracker.next_waypoint
        assert wp is not None
        self.leg = self._plan_leg(session.arm, wp, tracker.reached)
        self.stage = _ACQUIRE

    def _plan_leg(self, arm: ArmState, wp: Waypoint, wp_index: int) -> _Leg:
        for mode, axis in _ORIENTATION_LEGS:
            delta = wp.orientation[axis] - arm.orientation[axis]
            if abs(delta) > _ANGLE_STOP_BAND:
                return _Leg(
                    mode,
                    1 if delta > 0 else -1,
                    _axis_stop(lambda a, ax=axis: a.orientation[ax], wp.orientation[axis], _ANGLE_STOP_BAND),
                    wp_index,
                )
        band = wp.tol_m / 2
        for mode, axis in _POSITION_LEGS:
            delta = wp.position[axis] - arm.position[axis]
            if abs(delta) > band:
                return _Leg(
                    mode,
                    1 if delta > 0 else -1,
                    _axis_stop(lambda a, ax=axis: a.position[ax], wp.position[axis], band),
                    wp_index,
                )
        if wp.grip == GRIP_CLOSE and arm.gripper > _GRIP_CLOSE_STOP:
            return _Leg(ControlMode.FINGERS, -1, lambda a: a.gripper <= _GRIP_CLOSE_STOP, wp_index)
        if wp.grip == GRIP_OPEN and arm.gripper < _GRIP_OPEN_STOP:
            return _Leg(ControlMode.FINGERS, 1, lambda a: a.gripper >= _GRIP_OPEN_STOP, wp_index)
        # Nothing exceeds its band yet the waypoint is unsatisfied: drive the
        # largest positional error with a tighter band so progress is certain.
        deltas = [wp.position[i] - arm.position[i] for i in range(3)]
        axis = max(range(3), key=lambda i: abs(deltas[i]))
        tight = max(0.005, band / 2)
        mode = _POSITION_LEGS[axis][0]
        return _Leg(
            mode,
            1 if deltas[axis] > 0 else -1,
            _axis_stop(lambda a, ax=axis: a.position[ax], wp.position[axis], tight),
            wp_index,
        )

    def _acquire(self, session: Session) -> None:
        assert self.leg is not None
        controller = session.controller
        if controller.phase == COMMAND:
            if controller.active_mode == self.leg.mode:
                start = session.t + self._reaction()
                channel = PUFF if self.leg.direction > 0 else SIP
                self.pulses.append(_Pulse(start, None, channel))
                self.stage = _DRIVING
            # else: wrong mode is still active; emit nothing and let the
            # inactivity timeout take the interface back to selection.
            return
        if session.interface == ASP:
            self._schedule_sequence(session)
            self.stage = _AWAIT_MATCH
        else:
            self.prev_highlight = None
            self.stage = _WATCH

    def _schedule_sequence(self, session: Session) -> None:
        assert self.leg is not None
        uds = next(
            u for u in self.config.library.sequences if u.mode == self.leg.mode.value
        )
        t = session.t + self._reaction()
        for code in uds.codes:
            duration = self.model.short_peak_ms if abs(code) == 1 else self.model.long_peak_ms
            channel = SIP if code > 0 else PUFF
            self.pulses.append(_Pulse(t, t + duration, channel))
            t += duration + self.model.inter_peak_gap_ms
        self.deadline_t = t + self.config.library.t_match_ms + 1000

    def _await_match(self, session: Session) -> None:
        if session.controller.phase == COMMAND:
            self.pulses.clear()
            self.stage = _ACQUIRE
            return
        if session.t > self.deadline_t and not self.pulses:
            self.stage = _ACQUIRE

    def _watch(self, session: Session) -> None:
        controller = session.controller
        if controller.phase == COMMAND:
            self.stage = _ACQUIRE
            return
        assert self.leg is not None
        highlight = controller.highlight_index(session.t)
        target = MODE_ORDER.index(self.leg.mode)
        if highlight == target and self.prev_highlight != target:
            if self.rng.random() >= self.model.miss_probability:
                start = session.t + self._reaction()
                self.pulses.append(_Pulse(start, start + self.model.short_peak_ms, PUFF))
                self.deadline_t = start + self.model.short_peak_ms + 2000
                self.stage = _AWAIT_MATCH
            # On a miss, wait for the highlight to come around again.
        self.prev_highlight = highlight

    def _drive(self, session: Session) -> None:
        assert self.leg is not None
        if not self.pulses:
            # The hold has fully elapsed; the leg is over.
            self.stage = _PLAN
            return
        hold = self.pulses[-1]
        if hold.end_t is not None or session.t < hold.start_t:
            return
        tracker = session.tracker
        assert tracker is not None
        finished = self.leg.stop(session.arm) or tracker.reached != self.leg.waypoint_index
        if finished:
            hold.end_t = session.t + self._reaction()


def _axis_stop(read: Callable[[ArmState], float], target: float, band: float):
    return lambda arm: abs(read(arm) - target) <= band


def simulate_session(
    task: TaskSpec,
    interface: str,
    user: VirtualUserModel,
    config: EngineConfig,
    tick_ms: int = DEFAULT_TICK_MS,
    time_limit_ms: int = DEFAULT_TIME_LIMIT_MS,
) -> SessionMetrics:
    """Run one virtual-user session to task completion and return metrics."""
    if not user.short_peak_ms < config.detector.long_threshold_ms <= user.long_peak_ms:
        raise ValueError(
            "user model must satisfy short_peak_ms < long_threshold_ms <= long_peak_ms"
        )
    rng = random.Random(user.rng_seed)
    session = Session(config, interface, task, tick_ms=tick_ms)
    agent = _Agent(user, config, rng)
    neutral = config.detector.neutral_v
    while not session.task_done:
        if session.t >= time_limit_ms:
            raise SimulationTimeoutError(
                f"task {task.id!r} on {interface} (seed {user.rng_seed}) "
                f"did not finish within {time_limit_ms} ms simulated"
            )
        channel = agent.decide(session)
        voltage = press_voltage(channel, config.detector) if channel else neutral
        session.step(voltage)
    return session.metrics()
