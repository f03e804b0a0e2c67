"""One live engine instance: detector, controller, arm and task, advanced
tick by tick on an injected logical clock.

Both the gateway and the benchmark harness run sessions through this class,
so a replayed input stream reproduces frames and metrics exactly.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

from .arm import ArmState, TaskSpec, TaskTracker, apply_command
from .config import EngineConfig
from .control import AspController, BspController, DeviceCommand
from .detection import PeakDetector, Sample

ASP = "asp"
BSP = "bsp"
INTERFACES = (ASP, BSP)


@dataclass
class SessionMetrics:
    """Timing and bookkeeping for one session run."""

    completion_ms: int = 0
    moving_ms: int = 0
    wasted_ms: int = 0
    mode_selection_count: int = 0
    reset_count: int = 0

    def as_dict(self) -> dict:
        return asdict(self)


class Session:
    """Deterministic per-tick pipeline for one interface instance."""

    def __init__(
        self,
        config: EngineConfig,
        interface: str,
        task: TaskSpec | None = None,
        tick_ms: int = 50,
    ) -> None:
        if interface not in INTERFACES:
            raise ValueError(f"interface must be one of {INTERFACES}, got {interface!r}")
        if tick_ms <= 0:
            raise ValueError("tick_ms must be positive")
        self.config = config
        self.interface = interface
        self.tick_ms = tick_ms
        self.detector = PeakDetector(config.detector)
        if interface == ASP:
            self.controller: AspController | BspController = AspController(
                config.library, t_idle_ms=config.t_idle_ms
            )
        else:
            self.controller = BspController(
                t_idle_ms=config.t_idle_ms,
                scroll_period_ms=config.bsp_scroll_period_ms,
            )
        self.arm = ArmState.home(config.arm)
        self.tracker = TaskTracker(task) if task is not None else None
        self.t = 0
        self._moving_ms = 0
        self._done_t: int | None = None
        self.last_command: DeviceCommand = DeviceCommand(mode=None)
        self.last_events = []

    @property
    def task_done(self) -> bool:
        return self.tracker is not None and self.tracker.done

    def step(self, voltage: float) -> DeviceCommand:
        """Advance one tick with the given input voltage."""
        now = self.t + self.tick_ms
        events = self.detector.feed(Sample(now, voltage))
        level = self.detector.level
        command = self.controller.step(level, events, now)
        apply_command(self.arm, command, self.tick_ms, self.config.arm)
        if self._done_t is None:
            if command.direction != 0 or self.arm.goto_active:
                self._moving_ms += self.tick_ms
            if self.tracker is not None:
                self.tracker.update(self.arm, now)
                if self.tracker.done:
                    self._done_t = now
        self.t = now
        self.last_command = command
        self.last_events = events
        return command

    def metrics(self) -> SessionMetrics:
        completion = self._done_t if self._done_t is not None else self.t
        moving = min(self._moving_ms, completion)
        if self.interface == ASP:
            assert isinstance(self.controller, AspController)
            resets = self.controller.reset_count
        else:
            resets = 0
        return SessionMetrics(
            completion_ms=completion,
            moving_ms=moving,
            wasted_ms=completion - moving,
            mode_selection_count=self.controller.selection_count,
            reset_count=resets,
        )

    def frame(self) -> dict:
        """State snapshot for streaming clients, in logical session time."""
        now = self.t
        controller = self.controller
        frame: dict = {
            "t_ms": now,
            "interface": self.interface,
            "phase": controller.phase,
            "active_mode": controller.active_mode.value if controller.active_mode else None,
            "command": {
                "mode": self.last_command.mode.value if self.last_command.mode else None,
                "direction": self.last_command.direction,
                "momentary_fire": self.last_command.momentary_fire,
            },
            "arm": {
                "position": list(self.arm.position),
                "orientation": list(self.arm.orientation),
                "gripper": self.arm.gripper,
                "goto_active": self.arm.goto_active,
                "saved_point": (
                    {
                        "position": list(self.arm.saved_point.position),
                        "orientation": list(self.arm.saved_point.orientation),
                        "gripper": self.arm.saved_point.gripper,
                    }
                    if self.arm.saved_point is not None
                    else None
                ),
            },
            "metrics": self.metrics().as_dict(),
        }
        if isinstance(controller, AspController):
            frame["cs"] = list(controller.matcher.cs)
            frame["candidates"] = list(controller.matcher.candidates)
            frame["t_match_remaining_ms"] = controller.match_remaining(now)
            frame["t_idle_remaining_ms"] = controller.idle_remaining(now)
            frame["highlight_index"] = None
        else:
            frame["cs"] = []
            frame["candidates"] = []
            frame["t_match_remaining_ms"] = None
            frame["t_idle_remaining_ms"] = controller.idle_remaining(now)
            frame["highlight_index"] = controller.highlight_index(now)
        if self.tracker is not None:
            frame["task"] = {
                "id": self.tracker.task.id,
                "fraction": self.tracker.fraction,
                "done": self.tracker.done,
                "next_waypoint_index": None if self.tracker.done else self.tracker.reached,
                "waypoint_count": len(self.tracker.task.waypoints),
            }
        else:
            frame["task"] = None
        return frame
