"""Matching peak-code streams against a library of user-defined sequences.

Incoming codes accumulate in the current sequence (CS). After every push the
CS is classified against the library:

* equals exactly one sequence and extends no other -> matched immediately,
* equals a sequence but is also a proper prefix of a longer one -> pending
  (ambiguous; the next code or the completion timeout decides),
* is only a proper prefix -> pending,
* extends nothing -> reset, the offending code discarded.

A timeout tick on a non-empty CS resolves the ambiguity: the exact sequence
matches if there is one, otherwise the CS resets. The library is held as a
trie over the four-code alphabet so each push is O(1).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .detection import VALID_CODES

IDLE = "idle"
PENDING = "pending"
MATCHED = "matched"
RESET = "reset"

RESET_TIMEOUT = "timeout"
RESET_NO_CANDIDATE = "no_candidate"

DEFAULT_T_MATCH_MS = 1500


class LibraryError(ValueError):
    """A sequence library failed validation at load time."""


@dataclass(frozen=True)
class UserDefinedSequence:
    """One selectable sequence: ordered peak codes bound to a control mode."""

    id: str
    codes: tuple[int, ...]
    mode: str

    def __post_init__(self) -> None:
        if not self.codes:
            raise LibraryError(f"sequence {self.id!r} has empty codes")
        bad = [c for c in self.codes if c not in VALID_CODES]
        if bad:
            raise LibraryError(
                f"sequence {self.id!r} uses unknown code symbol(s) {bad}; "
                f"valid codes are {sorted(VALID_CODES)}"
            )


@dataclass
class SequenceLibrary:
    """The user's sequence set plus the shared completion timeout."""

    sequences: tuple[UserDefinedSequence, ...]
    t_match_ms: int = DEFAULT_T_MATCH_MS

    def __post_init__(self) -> None:
        self.sequences = tuple(self.sequences)
        if self.t_match_ms <= 0:
            raise LibraryError("t_match_ms must be positive")
        seen: dict[tuple[int, ...], str] = {}
        for uds in self.sequences:
            if uds.codes in seen:
                raise LibraryError(
                    f"sequences {seen[uds.codes]!r} and {uds.id!r} "
                    f"have identical codes {list(uds.codes)}"
                )
            seen[uds.codes] = uds.id

    def by_id(self, uds_id: str) -> UserDefinedSequence:
        for uds in self.sequences:
            if uds.id == uds_id:
                return uds
        raise KeyError(uds_id)


@dataclass(frozen=True)
class MatchOutcome:
    """Result of one matcher step."""

    kind: str
    candidates: tuple[str, ...] = ()
    matched_id: str | None = None
    reset_reason: str | None = None

    @staticmethod
    def idle() -> "MatchOutcome":
        return MatchOutcome(IDLE)

    @staticmethod
    def pending(candidates: tuple[str, ...]) -> "MatchOutcome":
        return MatchOutcome(PENDING, candidates=candidates)

    @staticmethod
    def matched(uds_id: str) -> "MatchOutcome":
        return MatchOutcome(MATCHED, matched_id=uds_id)

    @staticmethod
    def reset(reason: str) -> "MatchOutcome":
        return MatchOutcome(RESET, reset_reason=reason)


@dataclass
class _TrieNode:
    children: dict[int, "_TrieNode"] = field(default_factory=dict)
    terminal_id: str | None = None
    # All sequence ids reachable at or below this node, sorted by id so
    # outcomes never depend on library insertion order.
    candidates: tuple[str, ...] = ()


def _build_trie(library: SequenceLibrary) -> _TrieNode:
    root = _TrieNode()
    for uds in library.sequences:
        node = root
        for code in uds.codes:
            node = node.children.setdefault(code, _TrieNode())
        node.terminal_id = uds.id

    def fill(node: _TrieNode) -> list[str]:
        ids = [] if node.terminal_id is None else [node.terminal_id]
        for child in node.children.values():
            ids.extend(fill(child))
        ids.sort()
        node.candidates = tuple(ids)
        return ids

    fill(root)
    return root


class SequenceMatcher:
    """Streaming matcher over one library; timestamps are injected."""

    def __init__(self, library: SequenceLibrary) -> None:
        self.library = library
        self._root = _build_trie(library)
        self._node = self._root
        self._cs: list[int] = []
        self._last_event_t = 0

    @property
    def cs(self) -> tuple[int, ...]:
        """Codes accumulated since the last match or reset."""
        return tuple(self._cs)

    @property
    def candidates(self) -> tuple[str, ...]:
        """Ids of sequences the current CS could still become."""
        if not self._cs:
            return ()
        return self._node.candidates

    @property
    def last_event_t(self) -> int:
        return self._last_event_t

    def time_remaining(self, now: int) -> int | None:
        """Milliseconds until the completion timeout fires; None when idle."""
        if not self._cs:
            return None
        return max(0, self.library.t_match_ms - (now - self._last_event_t))

    def push(self, code: int, t: int) -> MatchOutcome:
        """Append one peak code to the CS and classify it."""
        if code not in VALID_CODES:
            raise ValueError(f"invalid peak code {code!r}")
        self._last_event_t = t
        child = self._node.children.get(code)
        if child is None:
            self._clear()
            return MatchOutcome.reset(RESET_NO_CANDIDATE)
        self._cs.append(code)
        self._node = child
        if child.terminal_id is not None and not child.children:
            matched_id = child.terminal_id
            self._clear()
            return MatchOutcome.matched(matched_id)
        return MatchOutcome.pending(child.candidates)

    def tick(self, now: int) -> MatchOutcome:
        """Advance time; an elapsed completion timeout resolves the CS."""
        if not self._cs:
            return MatchOutcome.idle()
        if now - self._last_event_t >= self.library.t_match_ms:
            terminal = self._node.terminal_id
            self._clear()
            if terminal is not None:
                return MatchOutcome.matched(terminal)
            return MatchOutcome.reset(RESET_TIMEOUT)
        return MatchOutcome.pending(self._node.candidates)

    def reset(self) -> None:
        """Clear the CS; idempotent."""
        self._clear()

    def _clear(self) -> None:
        self._cs.clear()
        self._node = self._root
