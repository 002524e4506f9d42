"""Playing the parity game on particles that never shared an origin.

Layout of the nine sites:

    0, 1, 2   GHZ triple held at stations A, B, C
    3, 4, 5   local halves of three singlet pairs, also at A, B, C
    6, 7, 8   remote halves of those pairs, at stations A', B', C'

Each station Bell-measures its GHZ particle against its local singlet
half, while the remote stations measure the x or y spin component their
question demands.  No outcome is transmitted and no conditioning rotation
is ever applied to the remote particles; instead, each Bell outcome tells
us in post-processing whether the remote record must be sign-flipped to
agree with a direct measurement on the original GHZ particle.  After the
flips the remote outcomes reproduce the GHZ parity targets exactly, even
though the remote particles were never in one place together.

The flip table is derived numerically from the single-particle identity
rather than written down, so it stays correct under this package's sign
conventions by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Mapping

import numpy as np

from .game import PATTERNS, QuestionPattern, TrialStreams, draw_pattern, wins
from .qsim import (
    Axis,
    BellIndex,
    ProductObservable,
    RandomSource,
    StateVector,
    bell_measure,
    bell_project,
    expectation_product,
    make_ghz,
    make_singlet,
    measure_pauli,
    pauli_eigenstate,
    tensor_product,
)

GHZ_SITES = (0, 1, 2)
LOCAL_EPR_SITES = (3, 4, 5)
REMOTE_SITES = (6, 7, 8)
BELL_PAIRS = ((0, 3), (1, 4), (2, 5))
EPR_LINKS = ((3, 6), (4, 7), (5, 8))


@lru_cache(maxsize=1)
def build_setup() -> StateVector:
    """Nine-site state: GHZ(0,1,2) times singlets on (3,6), (4,7), (5,8).

    States are immutable, so the instance is cached and shared.
    """
    ghz = make_ghz().amps
    singlet = make_singlet().amps
    idx = np.arange(1 << 9)

    def link_amp(local: int, remote: int) -> np.ndarray:
        return singlet[((idx >> local) & 1) + 2 * ((idx >> remote) & 1)]

    amps = ghz[idx & 7].copy()
    for local, remote in EPR_LINKS:
        amps *= link_amp(local, remote)
    return StateVector(9, amps, copy=False)


@dataclass(frozen=True)
class CorrectionRule:
    """Whether each (Bell outcome, axis) pair flips the remote record."""

    flips: Mapping[tuple[BellIndex, Axis], bool]

    def flip(self, bell: BellIndex, axis: Axis) -> bool:
        return self.flips[(bell, axis)]

    def sign(self, bell: BellIndex, axis: Axis) -> int:
        return -1 if self.flips[(bell, axis)] else 1

    def describe(self) -> str:
        lines = []
        for axis in (Axis.X, Axis.Y):
            flipped = [b.label for b in BellIndex if self.flip(b, axis)]
            lines.append(f"axis {axis.value}: flip on {', '.join(flipped)}")
        return "\n".join(lines)


@lru_cache(maxsize=1)
def derive_correction_rule() -> CorrectionRule:
    """Compute the flip table from the single-particle identity.

    A +1 eigenstate of the axis is teleported through one singlet; for
    each Bell outcome the remote particle must then measure +1 (no flip)
    or -1 (flip), deterministically.  Anything else means the package's
    sign conventions are inconsistent, which raises.
    """
    flips: dict[tuple[BellIndex, Axis], bool] = {}
    for axis in (Axis.X, Axis.Y):
        # site 0: source, sites 1, 2: singlet with 2 remote
        state = tensor_product(pauli_eigenstate(axis, 1), make_singlet())
        remote_obs = ProductObservable.of((2, axis))
        n_flip = 0
        for bell in BellIndex:
            prob, collapsed = bell_project(state, 0, 1, bell)
            if collapsed is None or abs(prob - 0.25) > 1e-9:
                raise RuntimeError(
                    f"Bell outcome {bell.label} has probability {prob}, expected 1/4"
                )
            value = expectation_product(collapsed, remote_obs)
            if abs(value - 1.0) < 1e-9:
                flips[(bell, axis)] = False
            elif abs(value + 1.0) < 1e-9:
                flips[(bell, axis)] = True
                n_flip += 1
            else:
                raise RuntimeError(
                    f"remote outcome not deterministic for {bell.label}/{axis.value}: "
                    f"expectation {value}"
                )
        if n_flip != 2:
            raise RuntimeError(f"axis {axis.value} flips {n_flip} Bell outcomes, expected 2")
    return CorrectionRule(flips)


@dataclass(frozen=True)
class TeleportTrialRecord:
    pattern: QuestionPattern
    bell_outcomes: tuple[BellIndex, BellIndex, BellIndex]
    raw_outcomes: tuple[int, int, int]
    corrected_outcomes: tuple[int, int, int]
    win: bool

    def to_json_dict(self) -> dict:
        return {
            "pattern": self.pattern.value,
            "bell_outcomes": [b.value for b in self.bell_outcomes],
            "raw_outcomes": list(self.raw_outcomes),
            "corrected_outcomes": list(self.corrected_outcomes),
            "win": self.win,
        }


def run_trial(
    pattern: QuestionPattern,
    rnd: RandomSource,
    rule: CorrectionRule | None = None,
) -> TeleportTrialRecord:
    """One full run: three Bell measurements, three remote spin measurements.

    The Bell and remote measurements act on disjoint sites, so the order
    used here is statistically irrelevant.  Corrections touch only the
    recorded numbers, never the state.
    """
    if rule is None:
        rule = derive_correction_rule()
    state = build_setup()
    bells = []
    for s1, s2 in BELL_PAIRS:
        outcome, state = bell_measure(state, s1, s2, rnd)
        bells.append(outcome)
    axes = pattern.axes
    raws = []
    for j, site in enumerate(REMOTE_SITES):
        outcome, state = measure_pauli(state, site, axes[j], rnd)
        raws.append(outcome)
    corrected = tuple(raws[j] * rule.sign(bells[j], axes[j]) for j in range(3))
    return TeleportTrialRecord(
        pattern=pattern,
        bell_outcomes=tuple(bells),  # type: ignore[arg-type]
        raw_outcomes=tuple(raws),  # type: ignore[arg-type]
        corrected_outcomes=corrected,  # type: ignore[arg-type]
        win=wins(pattern, corrected),
    )


@dataclass(frozen=True)
class PatternRates:
    trials: int
    corrected_success_rate: float
    raw_success_rate: float


@dataclass(frozen=True)
class TeleportSummary:
    trials: int
    per_pattern: dict[str, PatternRates]
    corrected_success_rate: float
    raw_success_rate: float
    bell_histogram: dict[tuple[BellIndex, BellIndex, BellIndex], int]

    def to_json_dict(self) -> dict:
        return {
            "trials": self.trials,
            "per_pattern": {
                name: {
                    "trials": r.trials,
                    "corrected_success_rate": r.corrected_success_rate,
                    "raw_success_rate": r.raw_success_rate,
                }
                for name, r in self.per_pattern.items()
            },
            "corrected_success_rate": self.corrected_success_rate,
            "raw_success_rate": self.raw_success_rate,
            "bell_histogram": {
                ",".join(b.value for b in key): count
                for key, count in sorted(
                    self.bell_histogram.items(), key=lambda kv: [b.value for b in kv[0]]
                )
            },
        }


def summarize(records: list[TeleportTrialRecord]) -> TeleportSummary:
    """Aggregate per-pattern success rates and the Bell-outcome histogram."""
    if not records:
        raise ValueError("cannot summarize zero records")
    pattern_counts = {p: 0 for p in PATTERNS}
    corrected_hits = {p: 0 for p in PATTERNS}
    raw_hits = {p: 0 for p in PATTERNS}
    histogram: dict[tuple[BellIndex, BellIndex, BellIndex], int] = {}
    for rec in records:
        p = rec.pattern
        pattern_counts[p] += 1
        a, b, c = rec.corrected_outcomes
        corrected_hits[p] += a * b * c == p.target
        a, b, c = rec.raw_outcomes
        raw_hits[p] += a * b * c == p.target
        histogram[rec.bell_outcomes] = histogram.get(rec.bell_outcomes, 0) + 1
    per_pattern = {
        p.value: PatternRates(
            trials=pattern_counts[p],
            corrected_success_rate=(
                corrected_hits[p] / pattern_counts[p] if pattern_counts[p] else float("nan")
            ),
            raw_success_rate=(
                raw_hits[p] / pattern_counts[p] if pattern_counts[p] else float("nan")
            ),
        )
        for p in PATTERNS
        if pattern_counts[p]
    }
    total = len(records)
    return TeleportSummary(
        trials=total,
        per_pattern=per_pattern,
        corrected_success_rate=sum(corrected_hits.values()) / total,
        raw_success_rate=sum(raw_hits.values()) / total,
        bell_histogram=histogram,
    )


def run_trials(
    trials: int,
    master_seed: int,
    record_sink: Callable[[TeleportTrialRecord], None] | None = None,
) -> TeleportSummary:
    """Run seeded trials with uniformly drawn patterns and summarize them."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rule = derive_correction_rule()
    streams = TrialStreams(master_seed, 2)
    records = []
    for i in range(trials):
        _, (referee, lab) = streams.trial(i)
        record = run_trial(draw_pattern(referee), lab, rule)
        records.append(record)
        if record_sink is not None:
            record_sink(record)
    return summarize(records)


def all_detected_probability(eta: float, particles: int = 9) -> float:
    """Chance that every detector fires in a run needing that many detections."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    return eta**particles
