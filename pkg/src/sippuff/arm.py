"""Kinematic simulator for a JACO-like assistive arm.

Pure integration, no dynamics: axis modes move position/orientation/gripper
at constant configured rates while a command is held, the workspace box
clamps position, and the point memory supports one saved pose. Tasks are
ordered waypoint lists (pose + gripper requirement + tolerance) checked by
``TaskTracker``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import yaml

from .control import ControlMode, DeviceCommand

GRIP_OPEN = "open"
GRIP_CLOSE = "close"
GRIP_NONE = "none"

# Aperture bands that count as "closed" / "open" for waypoint checks.
GRIP_CLOSED_MAX = 0.25
GRIP_OPEN_MIN = 0.75

_POSITION_AXES = {
    ControlMode.TRANSLATE_FB: 0,
    ControlMode.TRANSLATE_LR: 1,
    ControlMode.TRANSLATE_UD: 2,
}
_ORIENTATION_AXES = {
    ControlMode.ROTATE_X: 0,
    ControlMode.ROTATE_Y: 1,
    ControlMode.ROTATE_Z: 2,
}


@dataclass(frozen=True)
class ArmConfig:
    linear_rate_mps: float = 0.08
    angular_rate_rps: float = 0.5
    gripper_rate_ps: float = 0.5
    workspace_min: tuple[float, float, float] = (-0.8, -0.8, 0.0)
    workspace_max: tuple[float, float, float] = (0.8, 0.8, 1.2)
    snap_tolerance_m: float = 0.001
    home_position: tuple[float, float, float] = (0.0, 0.0, 0.6)
    home_orientation: tuple[float, float, float] = (0.0, 0.0, 0.0)
    home_gripper: float = 1.0

    def __post_init__(self) -> None:
        if min(self.linear_rate_mps, self.angular_rate_rps, self.gripper_rate_ps) <= 0:
            raise ValueError("rates must be positive")
        for lo, hi in zip(self.workspace_min, self.workspace_max):
            if lo >= hi:
                raise ValueError("workspace_min must be below workspace_max")

    @property
    def workspace_diagonal_m(self) -> float:
        return math.dist(self.workspace_min, self.workspace_max)


@dataclass(frozen=True)
class Pose:
    position: tuple[float, float, float]
    orientation: tuple[float, float, float]
    gripper: float


@dataclass
class ArmState:
    position: list[float]
    orientation: list[float]
    gripper: float
    saved_point: Pose | None = None
    goto_active: bool = False
    history: list[str] = field(default_factory=list)

    @classmethod
    def home(cls, config: ArmConfig) -> "ArmState":
        return cls(
            position=list(config.home_position),
            orientation=list(config.home_orientation),
            gripper=config.home_gripper,
        )

    def pose(self) -> Pose:
        return Pose(tuple(self.position), tuple(self.orientation), self.gripper)


def apply_command(arm: ArmState, cmd: DeviceCommand, dt_ms: int, config: ArmConfig) -> None:
    """Advance the arm by ``dt_ms`` under ``cmd``. Mutates ``arm`` in place."""
    if dt_ms <= 0:
        raise ValueError("dt_ms must be positive")
    dt = dt_ms / 1000.0

    if cmd.momentary_fire:
        if cmd.mode is ControlMode.SAVE_POINT:
            arm.saved_point = arm.pose()
        elif cmd.mode is ControlMode.GOTO_POINT:
            if arm.saved_point is None:
                arm.history.append("goto_ignored_no_saved_point")
            else:
                arm.goto_active = True

    if arm.goto_active:
        _step_goto(arm, dt, config)
        return

    if cmd.mode is None or cmd.direction == 0 or cmd.mode in (
        ControlMode.SAVE_POINT,
        ControlMode.GOTO_POINT,
    ):
        return

    if cmd.mode in _POSITION_AXES:
        axis = _POSITION_AXES[cmd.mode]
        value = arm.position[axis] + config.linear_rate_mps * cmd.direction * dt
        lo = config.workspace_min[axis]
        hi = config.workspace_max[axis]
        arm.position[axis] = min(hi, max(lo, value))
    elif cmd.mode in _ORIENTATION_AXES:
        axis = _ORIENTATION_AXES[cmd.mode]
        arm.orientation[axis] += config.angular_rate_rps * cmd.direction * dt
    elif cmd.mode is ControlMode.FINGERS:
        value = arm.gripper + config.gripper_rate_ps * cmd.direction * dt
        arm.gripper = min(1.0, max(0.0, value))


def _step_goto(arm: ArmState, dt: float, config: ArmConfig) -> None:
    # Autonomous return to the saved position; axis input is ignored while
    # it runs. Position only: orientation integrates unbounded, so driving
    # it here could not honour the bounded-convergence guarantee.
    assert arm.saved_point is not None
    target = arm.saved_point.position
    distance = math.dist(arm.position, target)
    step = config.linear_rate_mps * dt
    if distance <= max(step, config.snap_tolerance_m):
        arm.position = list(target)
        arm.goto_active = False
        return
    scale = step / distance
    for axis in range(3):
        arm.position[axis] += (target[axis] - arm.position[axis]) * scale


@dataclass(frozen=True)
class Waypoint:
    x: float
    y: float
    z: float
    roll: float = 0.0
    pitch: float = 0.0
    yaw: float = 0.0
    grip: str = GRIP_NONE
    tol_m: float = 0.05

    def __post_init__(self) -> None:
        if self.tol_m <= 0:
            raise ValueError("waypoint tolerance must be positive")
        if self.grip not in (GRIP_OPEN, GRIP_CLOSE, GRIP_NONE):
            raise ValueError(f"unknown grip action {self.grip!r}")

    @property
    def position(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)

    @property
    def orientation(self) -> tuple[float, float, float]:
        return (self.roll, self.pitch, self.yaw)


@dataclass(frozen=True)
class TaskSpec:
    id: str
    description: str
    waypoints: tuple[Waypoint, ...]

    def __post_init__(self) -> None:
        if not self.waypoints:
            raise ValueError(f"task {self.id!r} has no waypoints")


def waypoint_satisfied(arm: ArmState, wp: Waypoint) -> bool:
    if math.dist(arm.position, wp.position) > wp.tol_m:
        return False
    if wp.grip == GRIP_CLOSE:
        return arm.gripper <= GRIP_CLOSED_MAX
    if wp.grip == GRIP_OPEN:
        return arm.gripper >= GRIP_OPEN_MIN
    return True


class TaskTracker:
    """Orders waypoint completion: each must be satisfied after the previous."""

    def __init__(self, task: TaskSpec) -> None:
        self.task = task
        self.reached = 0
        self.hits: list[tuple[int, int | None]] = []

    @property
    def done(self) -> bool:
        return self.reached >= len(self.task.waypoints)

    @property
    def fraction(self) -> float:
        return self.reached / len(self.task.waypoints)

    @property
    def next_waypoint(self) -> Waypoint | None:
        if self.done:
            return None
        return self.task.waypoints[self.reached]

    def update(self, arm: ArmState, t_ms: int | None = None) -> None:
        while not self.done and waypoint_satisfied(arm, self.task.waypoints[self.reached]):
            self.hits.append((self.reached, t_ms))
            self.reached += 1


def task_from_dict(doc: dict) -> TaskSpec:
    try:
        waypoints = tuple(
            Waypoint(
                x=float(wp["x"]),
                y=float(wp["y"]),
                z=float(wp["z"]),
                roll=float(wp.get("roll", 0.0)),
                pitch=float(wp.get("pitch", 0.0)),
                yaw=float(wp.get("yaw", 0.0)),
                grip=str(wp.get("grip", GRIP_NONE)),
                tol_m=float(wp.get("tol_m", 0.05)),
            )
            for wp in doc["waypoints"]
        )
        return TaskSpec(
            id=str(doc["id"]),
            description=str(doc.get("description", "")),
            waypoints=waypoints,
        )
    except KeyError as exc:
        raise ValueError(f"task document missing field {exc.args[0]!r}") from exc


def load_task(path: str | Path) -> TaskSpec:
    with open(path, "r", encoding="utf-8") as fh:
        doc = yaml.safe_load(fh)
    if not isinstance(doc, dict):
        raise ValueError(f"task file {path} is not a mapping")
    return task_from_dict(doc)


def shipped_tasks() -> dict[str, TaskSpec]:
    """The three bundled pick-and-place tasks, keyed by id."""
    from importlib.resources import files

    tasks: dict[str, TaskSpec] = {}
    task_dir = files("sippuff.data").joinpath("tasks")
    for entry in sorted(task_dir.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".yaml"):
            doc = yaml.safe_load(entry.read_text(encoding="utf-8"))
            task = task_from_dict(doc)
            tasks[task.id] = task
    return tasks


def get_task(task_id: str) -> TaskSpec:
    tasks = shipped_tasks()
    if task_id not in tasks:
        raise KeyError(
            f"unknown task {task_id!r}; shipped tasks: {', '.join(sorted(tasks))}"
        )
    return tasks[task_id]


def copy_arm(arm: ArmState) -> ArmState:
    """Independent deep copy (saved_point is immutable and shared)."""
    clone = replace(
        arm,
        position=list(arm.position),
        orientation=list(arm.orientation),
        history=list(arm.history),
    )
    return clone
