"""Replay, virtual-user simulation, benchmark and stats tooling."""

from .bench import BenchReport, bench_report
from .replay import (
    RecordingError,
    ReplayResult,
    read_recording,
    replay_recording,
    replay_samples,
    write_recording,
    write_traces,
)
from .stats import (
    ALT_GREATER,
    ALT_LESS,
    ALT_TWO_SIDED,
    AllDifferencesZeroError,
    WilcoxonResult,
    wilcoxon_signed_rank,
)
from .virtual_user import (
    SimulationTimeoutError,
    VirtualUserModel,
    simulate_session,
)

__all__ = [
    "ALT_GREATER",
    "ALT_LESS",
    "ALT_TWO_SIDED",
    "AllDifferencesZeroError",
    "BenchReport",
    "RecordingError",
    "ReplayResult",
    "SimulationTimeoutError",
    "VirtualUserModel",
    "WilcoxonResult",
    "bench_report",
    "read_recording",
    "replay_recording",
    "replay_samples",
    "simulate_session",
    "wilcoxon_signed_rank",
    "write_recording",
    "write_traces",
]
