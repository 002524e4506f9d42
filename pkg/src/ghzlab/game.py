"""The three-player parity game: referee, strategies, and experiment harness.

Each round the referee asks every player one of two questions, X or Y,
drawn from the four legal patterns XXX, XYY, YXY, YYX.  Players answer
+1 or -1 without communicating.  The team wins when the product of the
answers is -1 for the XXX pattern and +1 for the other three patterns.

Players are isolated by construction: a strategy's ``setup`` returns three
callables and the harness hands each one only its own question and its own
random stream, so no implementation can react to a teammate's question.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Sequence

import numpy as np

from .qsim import Axis, RandomSource, make_ghz, measure_pauli


class QuestionPattern(Enum):
    """One of the four legal question assignments to players (A, B, C)."""

    XXX = "XXX"
    XYY = "XYY"
    YXY = "YXY"
    YYX = "YYX"

    @property
    def axes(self) -> tuple[Axis, Axis, Axis]:
        return _PATTERN_AXES[self]

    @property
    def target(self) -> int:
        """The answer product the team must produce to win."""
        return -1 if self is QuestionPattern.XXX else 1


PATTERNS: tuple[QuestionPattern, ...] = tuple(QuestionPattern)

_PATTERN_AXES = {
    p: tuple(Axis(c.lower()) for c in p.value) for p in PATTERNS
}


class _NoDetection:
    """Sentinel a player returns when its detector does not fire."""

    __slots__ = ()

    def __repr__(self) -> str:
        return "NO_DETECTION"


NO_DETECTION = _NoDetection()

# A player handle: (own question, own random stream) -> +1 | -1 | NO_DETECTION
Player = Callable[[Axis, RandomSource], "int | _NoDetection"]


def draw_pattern(
    rnd: RandomSource, weights: Sequence[float] | None = None
) -> QuestionPattern:
    """Draw a question pattern, uniformly unless weights are given."""
    if weights is None:
        return PATTERNS[int(rnd.random() * 4) & 3]
    w = np.asarray(weights, dtype=float)
    if w.shape != (4,) or np.any(w < 0) or w.sum() <= 0:
        raise ValueError("weights must be 4 non-negative numbers with positive sum")
    u = rnd.random() * w.sum()
    acc = 0.0
    for p, wi in zip(PATTERNS, w):
        acc += wi
        if u < acc:
            return p
    return PATTERNS[-1]


def wins(pattern: QuestionPattern, answers: Sequence[int]) -> bool:
    """Referee predicate: does the answer product hit the pattern's target?"""
    a, b, c = answers
    return a * b * c == pattern.target


# ---------------------------------------------------------------------------
# Deterministic strategies and the exhaustive scan


class DeterministicTable(
    tuple
):  # (x_a, y_a, x_b, y_b, x_c, y_c), each +1 or -1
    """A full pre-agreed answer table, one entry per (player, question)."""

    __slots__ = ()

    def __new__(cls, x_a: int, y_a: int, x_b: int, y_b: int, x_c: int, y_c: int):
        entries = (x_a, y_a, x_b, y_b, x_c, y_c)
        if any(e not in (1, -1) for e in entries):
            raise ValueError(f"table entries must be +1 or -1, got {entries}")
        return super().__new__(cls, entries)

    def answer(self, player: int, question: Axis) -> int:
        return self[2 * player + (0 if question is Axis.X else 1)]

    def expected_win_rate(self) -> float:
        """Exact win rate under uniformly drawn patterns."""
        hits = sum(wins(p, play_deterministic(self, p)) for p in PATTERNS)
        return hits / len(PATTERNS)

    def __repr__(self) -> str:
        return "DeterministicTable" + tuple.__repr__(self)


def play_deterministic(
    table: DeterministicTable, pattern: QuestionPattern
) -> tuple[int, int, int]:
    """Answers the table produces for a pattern."""
    ax = pattern.axes
    return tuple(table.answer(i, ax[i]) for i in range(3))  # type: ignore[return-value]


@dataclass(frozen=True)
class ScanResult:
    best_rate: float
    best_tables: tuple[DeterministicTable, ...]
    histogram: dict[float, int]


def all_tables() -> Iterable[DeterministicTable]:
    """All 64 deterministic tables, in ascending lexicographic order."""
    for entries in itertools.product((-1, 1), repeat=6):
        yield DeterministicTable(*entries)


def scan_deterministic() -> ScanResult:
    """Exhaustively evaluate every deterministic table against all patterns."""
    histogram: dict[float, int] = {}
    best_rate = -1.0
    best: list[DeterministicTable] = []
    for table in all_tables():
        rate = table.expected_win_rate()
        histogram[rate] = histogram.get(rate, 0) + 1
        if rate > best_rate:
            best_rate = rate
            best = [table]
        elif rate == best_rate:
            best.append(table)
    return ScanResult(best_rate, tuple(best), histogram)


# ---------------------------------------------------------------------------
# Strategies


class Strategy:
    """A team recipe: per-trial setup producing three isolated players.

    ``uses_detectors`` marks strategies whose answers come out of a
    measurement device; only those are affected by detection efficiency.
    """

    name: str = "abstract"
    uses_detectors: bool = False

    def setup(self, rnd: RandomSource) -> tuple[Player, Player, Player]:
        raise NotImplementedError


class QuantumStrategy(Strategy):
    """Players share a fresh GHZ triple each round and measure their site.

    Asked X a player measures the x spin component of her own particle,
    asked Y the y component, and answers with the outcome.
    """

    name = "quantum"
    uses_detectors = True

    def setup(self, rnd: RandomSource) -> tuple[Player, Player, Player]:
        shared = [make_ghz()]

        def player(site: int) -> Player:
            def answer(question: Axis, prnd: RandomSource) -> int:
                outcome, shared[0] = measure_pauli(shared[0], site, question, prnd)
                return outcome

            return answer

        return player(0), player(1), player(2)


def quantum_strategy() -> Strategy:
    return QuantumStrategy()


class TableStrategy(Strategy):
    """Players read their answers off a pre-agreed deterministic table."""

    uses_detectors = False

    def __init__(self, table: DeterministicTable, name: str | None = None):
        self.table = table
        self.name = name or f"table{tuple(table)}"

    def setup(self, rnd: RandomSource) -> tuple[Player, Player, Player]:
        table = self.table

        def player(site: int) -> Player:
            def answer(question: Axis, prnd: RandomSource) -> int:
                return table.answer(site, question)

            return answer

        return player(0), player(1), player(2)


class RandomStrategy(Strategy):
    """Every player answers with an independent fair coin."""

    name = "random"
    uses_detectors = False

    def setup(self, rnd: RandomSource) -> tuple[Player, Player, Player]:
        def answer(question: Axis, prnd: RandomSource) -> int:
            return 1 if prnd.random() < 0.5 else -1

        return answer, answer, answer


class FillRule(Enum):
    """What a player reports when her detector stays silent."""

    RANDOM_SIGN = "random_sign"


@dataclass(frozen=True)
class EfficiencyModel:
    """Independent per-player detection with probability ``eta``."""

    eta: float
    fill_rule: FillRule = FillRule.RANDOM_SIGN

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must lie in [0, 1], got {self.eta}")


class DetectionLimitedStrategy(Strategy):
    """Wrapper that makes each detector fail independently with 1 - eta."""

    uses_detectors = True

    def __init__(self, inner: Strategy, model: EfficiencyModel):
        self.inner = inner
        self.model = model
        self.name = f"{inner.name}[eta={model.eta:g}]"

    def setup(self, rnd: RandomSource) -> tuple[Player, Player, Player]:
        eta = self.model.eta

        def wrap(p: Player) -> Player:
            def answer(question: Axis, prnd: RandomSource):
                # eta == 1 draws nothing, keeping the wrapper bit-identical
                # to the bare strategy under the same seeds
                if eta < 1.0 and prnd.random() >= eta:
                    return NO_DETECTION
                return p(question, prnd)

            return answer

        return tuple(wrap(p) for p in self.inner.setup(rnd))  # type: ignore[return-value]


def apply_detection(strategy: Strategy, model: EfficiencyModel) -> Strategy:
    """Impose limited detection efficiency on a measuring strategy.

    Strategies that never measure (pre-agreed tables, coin flipping) are
    returned unchanged; there is no detector to fail.
    """
    if not strategy.uses_detectors:
        return strategy
    return DetectionLimitedStrategy(strategy, model)


def theoretical_win_rate(eta: float) -> float:
    """Win probability of the measuring team under detector efficiency eta.

    All three detectors fire with probability eta**3 and the team then wins
    for sure; otherwise at least one answer is a fair coin, which makes the
    answer product a fair coin as well.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    p_all = eta**3
    return p_all + (1.0 - p_all) / 2.0


# ---------------------------------------------------------------------------
# Seeded experiment harness


_GOLDEN_GAMMA = 0x9E3779B97F4A7C15  # 2**64 / golden ratio, used to label trials


class TrialStreams:
    """Deterministic per-(trial, role) random streams from one master seed.

    The master seed expands once, through ``SeedSequence``, into a 128-bit
    Philox key shared by the whole experiment.  Trial ``i`` and role ``r``
    then address the counter block (draws, r, i, 0) of that keyed Philox
    stream, which is exactly the independence guarantee a counter-based
    generator provides.  Streams depend only on (master_seed, trial, role),
    never on execution order, so trials may run in any order or in
    parallel with identical results.  The per-role ``Generator`` objects
    are reused across trials by resetting the counter, which keeps stream
    derivation cheap in 1e5-trial experiments.
    """

    def __init__(self, master_seed: int, n_roles: int):
        if master_seed < 0:
            raise ValueError("master_seed must be a non-negative integer")
        self.master_seed = master_seed
        key = np.random.SeedSequence(master_seed).generate_state(2, np.uint64)
        self._key0 = int(key[0])
        self._bgs = [np.random.Philox(key=0) for _ in range(n_roles)]
        self._gens = tuple(np.random.Generator(bg) for bg in self._bgs)
        self._states = [bg.state for bg in self._bgs]
        for st in self._states:
            st["state"]["key"][:] = key

    def trial(self, index: int) -> tuple[int, tuple[RandomSource, ...]]:
        """Reset all roles onto trial ``index`` and return (trial_seed, generators).

        ``trial_seed`` is the 64-bit label derived from (master_seed,
        trial index) that is recorded with the trial; replaying a trial
        means rebuilding streams from those two numbers.
        """
        if index < 0:
            raise ValueError("trial index must be non-negative")
        for role, (bg, st) in enumerate(zip(self._bgs, self._states)):
            counter = st["state"]["counter"]
            counter[0] = 0
            counter[1] = role
            counter[2] = index
            st["buffer_pos"] = 4  # mark the output buffer exhausted
            st["has_uint32"] = 0
            st["uinteger"] = 0
            bg.state = st
        return (self._key0 ^ ((index * _GOLDEN_GAMMA) & 0xFFFFFFFFFFFFFFFF)), self._gens


_ROLE_REFEREE, _ROLE_SETUP, _ROLE_A, _ROLE_B, _ROLE_C = range(5)


@dataclass(frozen=True)
class TrialRecord:
    pattern: QuestionPattern
    answers: tuple[int, int, int]
    detections: tuple[bool, bool, bool]
    win: bool
    trial_index: int
    seed: int

    def to_json_dict(self) -> dict:
        return {
            "trial_index": self.trial_index,
            "seed": self.seed,
            "pattern": self.pattern.value,
            "answers": list(self.answers),
            "detections": list(self.detections),
            "win": self.win,
        }


@dataclass(frozen=True)
class ExperimentReport:
    strategy: str
    trials: int
    wins: int
    win_rate: float
    per_pattern_trials: dict[str, int]
    per_pattern_win_rates: dict[str, float | None]
    triple_detection_rate: float
    master_seed: int

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
        }


def run_experiment(
    strategy: Strategy,
    trials: int,
    master_seed: int,
    record_sink: Callable[[TrialRecord], None] | None = None,
) -> ExperimentReport:
    """Play ``trials`` seeded rounds and aggregate the outcomes.

    Undetected players are scored with a fair random sign drawn from their
    own stream, and the failure is recorded in ``TrialRecord.detections``.
    Identical inputs produce an identical report.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    streams = TrialStreams(master_seed, 5)
    win_count = 0
    triple_detections = 0
    pattern_trials = {p: 0 for p in PATTERNS}
    pattern_wins = {p: 0 for p in PATTERNS}
    for i in range(trials):
        trial_seed, gens = streams.trial(i)
        players = strategy.setup(gens[_ROLE_SETUP])
        pattern = draw_pattern(gens[_ROLE_REFEREE])
        axes = pattern.axes
        answers = []
        detections = []
        for j, player in enumerate(players):
            prnd = gens[_ROLE_A + j]
            reply = player(axes[j], prnd)
            if reply is NO_DETECTION:
                detections.append(False)
                answers.append(1 if prnd.random() < 0.5 else -1)
            else:
                detections.append(True)
                answers.append(reply)
        won = wins(pattern, answers)
        win_count += won
        triple_detections += all(detections)
        pattern_trials[pattern] += 1
        pattern_wins[pattern] += won
        if record_sink is not None:
            record_sink(
                TrialRecord(
                    pattern=pattern,
                    answers=tuple(answers),  # type: ignore[arg-type]
                    detections=tuple(detections),  # type: ignore[arg-type]
                    win=won,
                    trial_index=i,
                    seed=trial_seed,
                )
            )
    return ExperimentReport(
        strategy=strategy.name,
        trials=trials,
        wins=win_count,
        win_rate=win_count / trials,
        per_pattern_trials={p.value: pattern_trials[p] for p in PATTERNS},
        per_pattern_win_rates={
            p.value: (pattern_wins[p] / pattern_trials[p] if pattern_trials[p] else None)
            for p in PATTERNS
        },
        triple_detection_rate=triple_detections / trials,
        master_seed=master_seed,
    )
