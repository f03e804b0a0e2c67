from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sippuff import default_config
from sippuff.detection import Sample
from sippuff.matching import SequenceLibrary, UserDefinedSequence


@pytest.fixture(scope="session")
def config():
    return default_config()


@pytest.fixture()
def three_sequence_library() -> SequenceLibrary:
    # S2 is a proper prefix of S1, so <1,2> is ambiguous until the next
    # event or the completion timeout.
    return SequenceLibrary(
        (
            UserDefinedSequence("S1", (1, 2, -1), "translate_fb"),
            UserDefinedSequence("S2", (1, 2), "translate_lr"),
            UserDefinedSequence("S3", (2, 1), "translate_ud"),
        ),
        t_match_ms=1500,
    )


def square_wave(segments: list[tuple[int, float]], rate_hz: int = 100) -> list[Sample]:
    """Samples for back-to-back constant-voltage segments, t starting at 0."""
    period = 1000 // rate_hz
    samples: list[Sample] = []
    t = 0
    for duration_ms, voltage in segments:
        end = t + duration_ms
        while t < end:
            samples.append(Sample(t, voltage))
            t += period
    return samples


def pulse_segments(
    codes: list[int],
    neutral_v: float = 2.5,
    sip_v: float = 1.0,
    puff_v: float = 4.0,
    short_ms: int = 200,
    long_ms: int = 600,
    gap_ms: int = 300,
    lead_ms: int = 100,
    tail_ms: int = 2000,
) -> list[tuple[int, float]]:
    """Segment list whose waveform produces exactly ``codes`` as peaks."""
    segments: list[tuple[int, float]] = [(lead_ms, neutral_v)]
    for code in codes:
        voltage = sip_v if code > 0 else puff_v
        duration = short_ms if abs(code) == 1 else long_ms
        segments.append((duration, voltage))
        segments.append((gap_ms, neutral_v))
    segments.append((tail_ms, neutral_v))
    return segments
