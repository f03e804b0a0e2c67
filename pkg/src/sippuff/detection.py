"""Peak detection on the 0-5 V sip-and-puff sensor channel.

Turns a stream of timestamped voltage samples into discrete peak events.
A peak is an excursion past an activation threshold; it ends when the
signal re-crosses the matching release threshold (hysteresis). The time
between onset and offset classifies the peak as short or long. Peaks
shorter than the debounce floor are dropped; a peak held past the
force-close ceiling is emitted as long and the detector latches until the
signal actually releases.

All transitions are driven by caller-supplied timestamps; the detector
never reads a clock, so identical sample streams always produce identical
event lists.
"""

from __future__ import annotations

from dataclasses import dataclass

SIP = "sip"
PUFF = "puff"
SHORT = "short"
LONG = "long"

NEUTRAL = "neutral"
SIP_ACTIVE = "sip_active"
PUFF_ACTIVE = "puff_active"

# Event code table: sips are positive, puffs negative; magnitude 2 = long.
CODE_TABLE = {
    (SIP, SHORT): 1,
    (SIP, LONG): 2,
    (PUFF, SHORT): -1,
    (PUFF, LONG): -2,
}

VALID_CODES = frozenset(CODE_TABLE.values())

V_MIN = 0.0
V_MAX = 5.0


class NonMonotonicSampleError(ValueError):
    """Raised when a sample's timestamp does not advance; nothing is ingested."""


@dataclass(frozen=True)
class Sample:
    """One sensor reading: milliseconds since session start, volts."""

    t: int
    v: float


@dataclass(frozen=True)
class PeakEvent:
    """A classified peak. ``code`` encodes direction x duration class."""

    code: int
    direction: str
    duration_class: str
    onset_t: int
    offset_t: int

    @property
    def duration_ms(self) -> int:
        return self.offset_t - self.onset_t


@dataclass(frozen=True)
class DetectorConfig:
    """Thresholds and timing floors/ceilings for the peak detector.

    Voltages must be ordered sip_on < sip_off < neutral < puff_off < puff_on
    (hysteresis around the neutral rest level), and timings must satisfy
    0 < debounce < long_threshold < max_peak.
    """

    neutral_v: float = 2.5
    puff_on_v: float = 3.2
    puff_off_v: float = 2.8
    sip_on_v: float = 1.8
    sip_off_v: float = 2.2
    debounce_ms: int = 50
    long_threshold_ms: int = 400
    max_peak_ms: int = 5000

    def __post_init__(self) -> None:
        ordered = (
            self.sip_on_v < self.sip_off_v < self.neutral_v
            and self.neutral_v < self.puff_off_v < self.puff_on_v
        )
        if not ordered:
            raise ValueError(
                "voltage thresholds must satisfy "
                "sip_on < sip_off < neutral < puff_off < puff_on"
            )
        if not 0 < self.debounce_ms < self.long_threshold_ms < self.max_peak_ms:
            raise ValueError(
                "timings must satisfy 0 < debounce_ms < long_threshold_ms < max_peak_ms"
            )


def clamp_voltage(v: float) -> float:
    """Clamp a reading into the sensor's 0-5 V range (never reject)."""
    return min(V_MAX, max(V_MIN, v))


def press_voltage(channel: str, config: DetectorConfig) -> float:
    """A voltage that reliably activates the given channel under ``config``.

    Used wherever a square pulse must be synthesized (gateway press/release
    messages, the virtual user).
    """
    if channel == PUFF:
        return clamp_voltage(config.puff_on_v + 0.5)
    if channel == SIP:
        return clamp_voltage(config.sip_on_v - 0.5)
    raise ValueError(f"unknown channel: {channel!r}")


class PeakDetector:
    """Hysteresis + debounce peak detector over a monotonic sample stream."""

    def __init__(self, config: DetectorConfig | None = None) -> None:
        self.config = config or DetectorConfig()
        self._last_t: int | None = None
        self._direction: str | None = None
        self._onset_t = 0
        self._latched = False

    @property
    def last_t(self) -> int | None:
        """Timestamp of the most recently ingested sample, if any."""
        return self._last_t

    @property
    def level(self) -> str:
        """Current held level: neutral until an excursion outlives debounce."""
        if self._direction is None or self._last_t is None:
            return NEUTRAL
        if self._last_t - self._onset_t < self.config.debounce_ms:
            return NEUTRAL
        return PUFF_ACTIVE if self._direction == PUFF else SIP_ACTIVE

    def feed(self, sample: Sample) -> list[PeakEvent]:
        """Ingest one sample; returns zero or one emitted peak events."""
        if self._last_t is not None and sample.t <= self._last_t:
            raise NonMonotonicSampleError(
                f"sample at t={sample.t} does not advance past t={self._last_t}"
            )
        t = sample.t
        v = clamp_voltage(sample.v)
        self._last_t = t
        cfg = self.config
        events: list[PeakEvent] = []

        if self._direction is not None:
            if self._direction == PUFF:
                released = v <= cfg.puff_off_v
            else:
                released = v >= cfg.sip_off_v
            if released:
                if not self._latched:
                    event = self._close(t)
                    if event is not None:
                        events.append(event)
                self._direction = None
                self._latched = False
            elif not self._latched and t - self._onset_t >= cfg.max_peak_ms:
                # Stuck past the ceiling: emit long now, re-arm only on release.
                events.append(self._emit(t, LONG))
                self._latched = True

        if self._direction is None:
            # A single sample may end one peak and open the opposite one.
            if v >= cfg.puff_on_v:
                self._direction = PUFF
                self._onset_t = t
            elif v <= cfg.sip_on_v:
                self._direction = SIP
                self._onset_t = t

        return events

    def flush(self, now: int) -> list[PeakEvent]:
        """Close any open peak at ``now`` and return to neutral.

        Used to finalize replayed recordings; classification follows the
        same debounce/long rules as a live release.
        """
        events: list[PeakEvent] = []
        if self._direction is not None and not self._latched:
            event = self._close(now)
            if event is not None:
                events.append(event)
        self._direction = None
        self._latched = False
        if self._last_t is None or now > self._last_t:
            self._last_t = now
        return events

    def _close(self, offset_t: int) -> PeakEvent | None:
        duration = offset_t - self._onset_t
        if duration < self.config.debounce_ms:
            return None
        cls = LONG if duration >= self.config.long_threshold_ms else SHORT
        return self._emit(offset_t, cls)

    def _emit(self, offset_t: int, duration_class: str) -> PeakEvent:
        direction = self._direction
        assert direction is not None
        return PeakEvent(
            code=CODE_TABLE[(direction, duration_class)],
            direction=direction,
            duration_class=duration_class,
            onset_t=self._onset_t,
            offset_t=offset_t,
        )
