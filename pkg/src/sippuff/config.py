"""The shared engine configuration document.

One human-editable YAML document configures the whole pipeline:

    sequences: list of {id, codes, mode}
    timers:    {t_match_ms, t_idle_ms}
    detector:  DetectorConfig fields
    bsp:       {scroll_period_ms}          (optional)
    arm:       ArmConfig fields            (optional)

Unknown control modes, duplicate or empty code lists and out-of-alphabet
codes are load errors.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from pathlib import Path

import yaml

from .arm import ArmConfig
from .control import (
    DEFAULT_SCROLL_PERIOD_MS,
    DEFAULT_T_IDLE_MS,
    ControlMode,
)
from .detection import DetectorConfig
from .matching import (
    DEFAULT_T_MATCH_MS,
    LibraryError,
    SequenceLibrary,
    UserDefinedSequence,
)


class ConfigError(ValueError):
    """A configuration document failed parsing or validation."""


@dataclass
class EngineConfig:
    library: SequenceLibrary
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    t_idle_ms: int = DEFAULT_T_IDLE_MS
    bsp_scroll_period_ms: int = DEFAULT_SCROLL_PERIOD_MS
    arm: ArmConfig = field(default_factory=ArmConfig)


_MODE_NAMES = {mode.value for mode in ControlMode}


def config_from_dict(doc: dict) -> EngineConfig:
    if not isinstance(doc, dict):
        raise ConfigError("configuration document must be a mapping")

    raw_sequences = doc.get("sequences")
    if not isinstance(raw_sequences, list):
        raise ConfigError("configuration needs a 'sequences' list")

    sequences = []
    for i, entry in enumerate(raw_sequences):
        if not isinstance(entry, dict):
            raise ConfigError(f"sequences[{i}] must be a mapping")
        try:
            uds_id = str(entry["id"])
            codes = entry["codes"]
            mode = str(entry["mode"])
        except KeyError as exc:
            raise ConfigError(
                f"sequences[{i}] missing field {exc.args[0]!r}"
            ) from exc
        if not isinstance(codes, list):
            raise ConfigError(f"sequence {uds_id!r}: 'codes' must be a list")
        if mode not in _MODE_NAMES:
            raise ConfigError(
                f"sequence {uds_id!r} binds unknown mode {mode!r}; "
                f"known modes: {', '.join(sorted(_MODE_NAMES))}"
            )
        try:
            sequences.append(
                UserDefinedSequence(id=uds_id, codes=tuple(int(c) for c in codes), mode=mode)
            )
        except (LibraryError, TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    timers = doc.get("timers") or {}
    t_match_ms = int(timers.get("t_match_ms", DEFAULT_T_MATCH_MS))
    t_idle_ms = int(timers.get("t_idle_ms", DEFAULT_T_IDLE_MS))
    if t_idle_ms <= 0:
        raise ConfigError("timers.t_idle_ms must be positive")

    try:
        library = SequenceLibrary(tuple(sequences), t_match_ms=t_match_ms)
    except LibraryError as exc:
        raise ConfigError(str(exc)) from exc

    try:
        detector = DetectorConfig(**(doc.get("detector") or {}))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"detector: {exc}") from exc

    bsp = doc.get("bsp") or {}
    scroll_period_ms = int(bsp.get("scroll_period_ms", DEFAULT_SCROLL_PERIOD_MS))
    if scroll_period_ms <= 0:
        raise ConfigError("bsp.scroll_period_ms must be positive")

    arm_doc = dict(doc.get("arm") or {})
    for key in ("workspace_min", "workspace_max", "home_position", "home_orientation"):
        if key in arm_doc:
            arm_doc[key] = tuple(float(v) for v in arm_doc[key])
    try:
        arm = ArmConfig(**arm_doc)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"arm: {exc}") from exc

    return EngineConfig(
        library=library,
        detector=detector,
        t_idle_ms=t_idle_ms,
        bsp_scroll_period_ms=scroll_period_ms,
        arm=arm,
    )


def parse_config(text: str) -> EngineConfig:
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML: {exc}") from exc
    return config_from_dict(doc)


def load_config(path: str | Path) -> EngineConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def config_to_dict(config: EngineConfig) -> dict:
    return {
        "sequences": [
            {"id": uds.id, "codes": list(uds.codes), "mode": uds.mode}
            for uds in config.library.sequences
        ],
        "timers": {
            "t_match_ms": config.library.t_match_ms,
            "t_idle_ms": config.t_idle_ms,
        },
        "detector": asdict(config.detector),
        "bsp": {"scroll_period_ms": config.bsp_scroll_period_ms},
        "arm": {
            **asdict(config.arm),
            "workspace_min": list(config.arm.workspace_min),
            "workspace_max": list(config.arm.workspace_max),
            "home_position": list(config.arm.home_position),
            "home_orientation": list(config.arm.home_orientation),
        },
    }


def default_config_text() -> str:
    from importlib.resources import files

    return files("sippuff.data").joinpath("default_config.yaml").read_text(encoding="utf-8")


def default_config() -> EngineConfig:
    return parse_config(default_config_text())
