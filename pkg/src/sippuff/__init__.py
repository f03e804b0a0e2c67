"""sippuff: sequence-matching sip-and-puff control for high-DOF devices.

A one-channel pressure signal is turned into short/long sip/puff events,
matched against a user-defined sequence library to select control modes,
and used to drive a simulated assistive arm. Includes the auto-scroll
baseline interface, a replay/benchmark harness with an exact signed-rank
test, and a WebSocket gateway for live clients.
"""

from .arm import ArmConfig, ArmState, TaskSpec, TaskTracker, Waypoint, apply_command
from .config import ConfigError, EngineConfig, default_config, load_config, parse_config
from .control import (
    AspController,
    BspController,
    ControlMode,
    DeviceCommand,
    MODE_ORDER,
    binding_table,
)
from .detection import (
    DetectorConfig,
    NonMonotonicSampleError,
    PeakDetector,
    PeakEvent,
    Sample,
)
from .matching import (
    LibraryError,
    MatchOutcome,
    SequenceLibrary,
    SequenceMatcher,
    UserDefinedSequence,
)
from .session import Session, SessionMetrics

__version__ = "0.1.0"

__all__ = [
    "ArmConfig",
    "ArmState",
    "AspController",
    "BspController",
    "ConfigError",
    "ControlMode",
    "DetectorConfig",
    "DeviceCommand",
    "EngineConfig",
    "LibraryError",
    "MODE_ORDER",
    "MatchOutcome",
    "NonMonotonicSampleError",
    "PeakDetector",
    "PeakEvent",
    "Sample",
    "SequenceLibrary",
    "SequenceMatcher",
    "Session",
    "SessionMetrics",
    "TaskSpec",
    "TaskTracker",
    "UserDefinedSequence",
    "Waypoint",
    "apply_command",
    "binding_table",
    "default_config",
    "load_config",
    "parse_config",
    "__version__",
]
