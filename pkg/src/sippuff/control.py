"""Top-level interface state machines.

Two interfaces share one command surface:

* ``AspController`` — detection mode matches peak sequences against the
  library; a match enters command mode for the bound control mode.
* ``BspController`` — the auto-scroll baseline: modes cycle on a fixed
  period, a puff peak enters the highlighted one.

In command mode both behave identically (held puff drives +1, held sip -1,
momentary modes fire once on the first puff peak), and both fall back to
their selection phase after the inactivity timeout.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .detection import NEUTRAL, PUFF_ACTIVE, SIP_ACTIVE, PeakEvent
from .matching import MATCHED, RESET, MatchOutcome, SequenceLibrary, SequenceMatcher


class ControlMode(str, enum.Enum):
    TRANSLATE_FB = "translate_fb"
    TRANSLATE_LR = "translate_lr"
    TRANSLATE_UD = "translate_ud"
    ROTATE_X = "rotate_x"
    ROTATE_Y = "rotate_y"
    ROTATE_Z = "rotate_z"
    FINGERS = "fingers"
    SAVE_POINT = "save_point"
    GOTO_POINT = "goto_point"


# Display/scroll order of the nine modes.
MODE_ORDER: tuple[ControlMode, ...] = tuple(ControlMode)

# Fire-once modes; the other seven drive an axis while pressure is held.
MOMENTARY_MODES = frozenset({ControlMode.SAVE_POINT, ControlMode.GOTO_POINT})

DETECTION = "detection"
COMMAND = "command"
SCROLL = "scroll"

DEFAULT_T_IDLE_MS = 3000
DEFAULT_SCROLL_PERIOD_MS = 2000


@dataclass(frozen=True)
class DeviceCommand:
    """What the device should do this step."""

    mode: ControlMode | None
    direction: int = 0
    momentary_fire: bool = False


NEUTRAL_COMMAND = DeviceCommand(mode=None)


class _CommandPhase:
    """Shared command-mode behaviour for both interfaces.

    Keeping this in one place is what guarantees the two interfaces emit
    identical command streams for identical level/event input.
    """

    def __init__(self, mode: ControlMode, now: int) -> None:
        self.mode = mode
        self.entered_t = now
        self.last_activity_t = now
        self.fired = False

    def step(
        self, level: str, events: list[PeakEvent], now: int, t_idle_ms: int
    ) -> DeviceCommand | None:
        """One command step; returns None when the inactivity timeout fires."""
        if level != NEUTRAL or events:
            self.last_activity_t = now
        if now - self.last_activity_t >= t_idle_ms:
            return None
        if self.mode in MOMENTARY_MODES:
            fire = False
            if not self.fired and any(e.code < 0 for e in events):
                self.fired = True
                fire = True
            return DeviceCommand(self.mode, 0, fire)
        if level == PUFF_ACTIVE:
            direction = 1
        elif level == SIP_ACTIVE:
            direction = -1
        else:
            direction = 0
        return DeviceCommand(self.mode, direction)

    def idle_remaining(self, now: int, t_idle_ms: int) -> int:
        return max(0, t_idle_ms - (now - self.last_activity_t))


class AspController:
    """Sequence-selected interface: detection phase feeds the matcher."""

    def __init__(self, library: SequenceLibrary, t_idle_ms: int = DEFAULT_T_IDLE_MS) -> None:
        self.matcher = SequenceMatcher(library)
        self.t_idle_ms = t_idle_ms
        self._bindings = {uds.id: ControlMode(uds.mode) for uds in library.sequences}
        self._command: _CommandPhase | None = None
        self.selection_count = 0
        self.reset_count = 0
        self.last_outcome: MatchOutcome = MatchOutcome.idle()
        # Matcher outcomes produced by the most recent step: every push plus
        # any fired timeout (pending ticks repeat and are not recorded).
        self.step_outcomes: list[tuple[int, MatchOutcome]] = []

    @property
    def phase(self) -> str:
        return COMMAND if self._command is not None else DETECTION

    @property
    def active_mode(self) -> ControlMode | None:
        return self._command.mode if self._command is not None else None

    def match_remaining(self, now: int) -> int | None:
        if self._command is not None:
            return None
        return self.matcher.time_remaining(now)

    def idle_remaining(self, now: int) -> int | None:
        if self._command is None:
            return None
        return self._command.idle_remaining(now, self.t_idle_ms)

    def step(self, level: str, events: list[PeakEvent], now: int) -> DeviceCommand:
        entered_this_step = False
        pending_events = list(events)
        self.step_outcomes = []

        if self._command is None:
            while pending_events and self._command is None:
                event = pending_events.pop(0)
                outcome = self.matcher.push(event.code, event.offset_t)
                self.step_outcomes.append((event.offset_t, outcome))
                self._note(outcome, now)
            if self._command is None:
                outcome = self.matcher.tick(now)
                if outcome.kind in (MATCHED, RESET):
                    self.step_outcomes.append((now, outcome))
                self._note(outcome, now)
            entered_this_step = self._command is not None

        if self._command is None:
            return NEUTRAL_COMMAND

        if entered_this_step:
            # The step that selects a mode emits a neutral command.
            return DeviceCommand(self._command.mode, 0, False)

        command = self._command.step(level, pending_events, now, self.t_idle_ms)
        if command is None:
            self._command = None
            return NEUTRAL_COMMAND
        return command

    def _note(self, outcome: MatchOutcome, now: int) -> None:
        self.last_outcome = outcome
        if outcome.kind == RESET:
            self.reset_count += 1
        elif outcome.kind == MATCHED:
            assert outcome.matched_id is not None
            self.matcher.reset()
            self.selection_count += 1
            self._command = _CommandPhase(self._bindings[outcome.matched_id], now)


class BspController:
    """Auto-scroll baseline: highlight cycles, a puff peak enters the mode."""

    def __init__(
        self,
        t_idle_ms: int = DEFAULT_T_IDLE_MS,
        scroll_period_ms: int = DEFAULT_SCROLL_PERIOD_MS,
        modes: tuple[ControlMode, ...] = MODE_ORDER,
    ) -> None:
        if scroll_period_ms <= 0:
            raise ValueError("scroll_period_ms must be positive")
        self.t_idle_ms = t_idle_ms
        self.scroll_period_ms = scroll_period_ms
        self.modes = modes
        self._scroll_anchor_t = 0
        self._command: _CommandPhase | None = None
        self.selection_count = 0

    @property
    def phase(self) -> str:
        return COMMAND if self._command is not None else SCROLL

    @property
    def active_mode(self) -> ControlMode | None:
        return self._command.mode if self._command is not None else None

    def highlight_index(self, now: int) -> int | None:
        if self._command is not None:
            return None
        elapsed = max(0, now - self._scroll_anchor_t)
        return (elapsed // self.scroll_period_ms) % len(self.modes)

    def idle_remaining(self, now: int) -> int | None:
        if self._command is None:
            return None
        return self._command.idle_remaining(now, self.t_idle_ms)

    def step(self, level: str, events: list[PeakEvent], now: int) -> DeviceCommand:
        if self._command is None:
            for event in events:
                if event.code < 0:
                    # Enter whichever mode was highlighted when the puff ended.
                    index = self.highlight_index(event.offset_t)
                    assert index is not None
                    self._command = _CommandPhase(self.modes[index], now)
                    self.selection_count += 1
                    return DeviceCommand(self._command.mode, 0, False)
            return NEUTRAL_COMMAND

        command = self._command.step(level, list(events), now, self.t_idle_ms)
        if command is None:
            # Back to scrolling, restarting from index 0.
            self._command = None
            self._scroll_anchor_t = now
            return NEUTRAL_COMMAND
        return command


def binding_table(
    library: SequenceLibrary,
) -> list[tuple[str, tuple[int, ...], str]]:
    """Display-ready (id, codes, mode) rows in library order."""
    return [(uds.id, uds.codes, uds.mode) for uds in library.sequences]
