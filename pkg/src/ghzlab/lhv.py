"""Instruction-kit local model that survives inefficient detectors.

Each particle triple carries a kit: a pre-assigned reply for every
(player, question) slot, where a reply is +1, -1, or an instruction for
the detector to stay silent.  An admissible kit has exactly one silent
slot and satisfies the two game constraints whose question sets avoid
that slot; the other two constraints are never tested, because the silent
slot suppresses one answer whenever they come up.

Played against a referee who draws patterns uniformly, such kits produce
triple detections in exactly half the runs, win every one of those runs,
and never produce runs with fewer than two detections.  That last feature
separates the model from a quantum team with lossy detectors, whose
detection failures are independent across players.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

from .game import (
    NO_DETECTION,
    PATTERNS,
    QuestionPattern,
    TrialStreams,
    _NoDetection,
    draw_pattern,
    wins,
)
from .qsim import Axis

PLAYER_NAMES = ("A", "B", "C")
_AXES = (Axis.X, Axis.Y)


class InstructionEntry(Enum):
    PLUS = "+1"
    MINUS = "-1"
    NOT_DETECTED = "not_detected"

    @property
    def sign(self) -> int | None:
        if self is InstructionEntry.PLUS:
            return 1
        if self is InstructionEntry.MINUS:
            return -1
        return None


_ENTRY_RANK = {e: k for k, e in enumerate(InstructionEntry)}


def _slot(player: int, axis: Axis) -> int:
    return 2 * player + (0 if axis is Axis.X else 1)


@dataclass(frozen=True)
class InstructionKit:
    """Six instruction entries, indexed by (player, axis) slots.

    Slot order is (A.X, A.Y, B.X, B.Y, C.X, C.Y).
    """

    entries: tuple[InstructionEntry, ...]

    def __post_init__(self):
        if len(self.entries) != 6:
            raise ValueError(f"a kit has 6 entries, got {len(self.entries)}")

    def entry(self, player: int, axis: Axis) -> InstructionEntry:
        return self.entries[_slot(player, axis)]

    @property
    def silent_slot(self) -> tuple[int, Axis]:
        """The (player, axis) carrying the stay-silent instruction."""
        for player in range(3):
            for axis in _AXES:
                if self.entry(player, axis) is InstructionEntry.NOT_DETECTED:
                    return player, axis
        raise ValueError("kit has no stay-silent entry")

    def describe(self) -> str:
        parts = []
        for player in range(3):
            for axis in _AXES:
                e = self.entry(player, axis)
                text = "silent" if e.sign is None else f"{e.sign:+d}"
                parts.append(f"{PLAYER_NAMES[player]}.{axis.value}={text}")
        return " ".join(parts)


def _pattern_tests_slot(pattern: QuestionPattern, player: int, axis: Axis) -> bool:
    return pattern.axes[player] is axis


@lru_cache(maxsize=256)
def kit_is_admissible(kit: InstructionKit) -> bool:
    """Exactly one silent slot, and both untouched patterns satisfied."""
    silent = [
        (p, a) for p in range(3) for a in _AXES
        if kit.entry(p, a) is InstructionEntry.NOT_DETECTED
    ]
    if len(silent) != 1:
        return False
    player, axis = silent[0]
    for pattern in PATTERNS:
        if _pattern_tests_slot(pattern, player, axis):
            continue  # this pattern never gets three answers, so it is untested
        product = 1
        for j in range(3):
            sign = kit.entry(j, pattern.axes[j]).sign
            assert sign is not None  # distinct slots cannot hit the silent one
            product *= sign
        if product != pattern.target:
            return False
    return True


@lru_cache(maxsize=1)
def enumerate_kits() -> tuple[InstructionKit, ...]:
    """All admissible kits, sorted lexicographically by slot entries."""
    kits = []
    for silent in range(6):
        for signs in itertools.product(
            (InstructionEntry.PLUS, InstructionEntry.MINUS), repeat=5
        ):
            entries = list(signs[:silent]) + [InstructionEntry.NOT_DETECTED] + list(signs[silent:])
            kit = InstructionKit(tuple(entries))
            if kit_is_admissible(kit):
                kits.append(kit)
    kits.sort(key=lambda k: tuple(_ENTRY_RANK[e] for e in k.entries))
    return tuple(kits)


def play_with_kit(
    kit: InstructionKit, pattern: QuestionPattern
) -> tuple["int | _NoDetection", ...]:
    """Per-player replies for a pattern: +1, -1, or NO_DETECTION."""
    if not kit_is_admissible(kit):
        raise ValueError("kit is not admissible")
    replies = []
    for player in range(3):
        sign = kit.entry(player, pattern.axes[player]).sign
        replies.append(NO_DETECTION if sign is None else sign)
    return tuple(replies)


@dataclass(frozen=True)
class LhvReport:
    strategy: str
    trials: int
    wins: int
    win_rate: float
    per_pattern_trials: dict[str, int]
    per_pattern_win_rates: dict[str, float | None]
    triple_detection_rate: float
    master_seed: int
    conditional_win_rate: float | None
    single_detections: int
    null_detections: int

    def to_json_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "trials": self.trials,
            "wins": self.wins,
            "win_rate": self.win_rate,
            "per_pattern_trials": self.per_pattern_trials,
            "per_pattern_win_rates": self.per_pattern_win_rates,
            "triple_detection_rate": self.triple_detection_rate,
            "master_seed": self.master_seed,
            "conditional_win_rate": self.conditional_win_rate,
            "single_detections": self.single_detections,
            "null_detections": self.null_detections,
        }


def lhv_statistics(
    trials: int,
    master_seed: int,
    kits: tuple[InstructionKit, ...] | None = None,
) -> LhvReport:
    """Sample (kit, pattern) pairs independently and tally detections.

    A run counts as a win only when all three players answer and the
    answer product hits the pattern target.  ``kits`` defaults to the full
    admissible family, sampled uniformly.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if kits is None:
        kits = enumerate_kits()
    streams = TrialStreams(master_seed, 2)
    win_count = 0
    triple = 0
    singles = 0
    nulls = 0
    pattern_trials = {p: 0 for p in PATTERNS}
    pattern_wins = {p: 0 for p in PATTERNS}
    for i in range(trials):
        _, (referee, kit_rnd) = streams.trial(i)
        pattern = draw_pattern(referee)
        kit = kits[int(kit_rnd.integers(len(kits)))]
        replies = play_with_kit(kit, pattern)
        detected = [r is not NO_DETECTION for r in replies]
        n_detected = sum(detected)
        pattern_trials[pattern] += 1
        if n_detected == 3:
            triple += 1
            won = wins(pattern, replies)  # type: ignore[arg-type]
            win_count += won
            pattern_wins[pattern] += won
        elif n_detected == 1:
            singles += 1
        elif n_detected == 0:
            nulls += 1
    return LhvReport(
        strategy="lhv-instruction-kits",
        trials=trials,
        wins=win_count,
        win_rate=win_count / trials,
        per_pattern_trials={p.value: pattern_trials[p] for p in PATTERNS},
        per_pattern_win_rates={
            p.value: (pattern_wins[p] / pattern_trials[p] if pattern_trials[p] else None)
            for p in PATTERNS
        },
        triple_detection_rate=triple / trials,
        master_seed=master_seed,
        conditional_win_rate=(win_count / triple if triple else None),
        single_detections=singles,
        null_detections=nulls,
    )
