import numpy as np
import pytest

from ghzlab.game import (
    PATTERNS,
    DeterministicTable,
    EfficiencyModel,
    NO_DETECTION,
    QuestionPattern,
    RandomStrategy,
    TableStrategy,
    TrialStreams,
    apply_detection,
    draw_pattern,
    play_deterministic,
    quantum_strategy,
    run_experiment,
    scan_deterministic,
    theoretical_win_rate,
    wins,
)
from ghzlab.qsim import Axis

import oracle

ALL_PLUS = DeterministicTable(1, 1, 1, 1, 1, 1)


# ---------------------------------------------------------------------------
# referee


def test_wins_examples():
    assert wins(QuestionPattern.XXX, (1, 1, -1))
    assert wins(QuestionPattern.XYY, (1, 1, 1))
    assert not wins(QuestionPattern.XXX, (1, 1, 1))


def test_pattern_axes():
    assert QuestionPattern.XYY.axes == (Axis.X, Axis.Y, Axis.Y)
    assert QuestionPattern.YYX.target == 1
    assert QuestionPattern.XXX.target == -1


def test_draw_pattern_support_and_determinism():
    rnd = np.random.default_rng(0)
    seen = {draw_pattern(rnd) for _ in range(1000)}
    assert seen == set(PATTERNS)
    a = [draw_pattern(np.random.default_rng(5)) for _ in range(50)]
    b = [draw_pattern(np.random.default_rng(5)) for _ in range(50)]
    assert a == b


def test_draw_pattern_uniform():
    rnd = np.random.default_rng(1)
    n = 100_000
    counts = {p: 0 for p in PATTERNS}
    for _ in range(n):
        counts[draw_pattern(rnd)] += 1
    for p in PATTERNS:
        assert abs(counts[p] / n - 0.25) < oracle.binomial_4sigma(0.25, n)


def test_draw_pattern_weights():
    rnd = np.random.default_rng(2)
    only_xyy = [draw_pattern(rnd, weights=[0, 1, 0, 0]) for _ in range(100)]
    assert set(only_xyy) == {QuestionPattern.XYY}
    with pytest.raises(ValueError):
        draw_pattern(rnd, weights=[1, 1, 1])


# ---------------------------------------------------------------------------
# deterministic tables


def test_play_deterministic_examples():
    assert play_deterministic(ALL_PLUS, QuestionPattern.XXX) == (1, 1, 1)
    assert not wins(QuestionPattern.XXX, (1, 1, 1))
    assert play_deterministic(ALL_PLUS, QuestionPattern.XYY) == (1, 1, 1)
    assert wins(QuestionPattern.XYY, (1, 1, 1))
    flipped_c = DeterministicTable(1, 1, 1, 1, -1, 1)
    assert play_deterministic(flipped_c, QuestionPattern.XXX) == (1, 1, -1)
    assert wins(QuestionPattern.XXX, (1, 1, -1))


def test_table_validation():
    with pytest.raises(ValueError):
        DeterministicTable(1, 1, 0, 1, 1, 1)


def test_scan_deterministic_ceiling():
    scan = scan_deterministic()
    assert scan.best_rate == 0.75
    assert len(scan.best_tables) == 32
    assert scan.histogram == {0.75: 32, 0.25: 32}


def test_scan_matches_independent_brute_force():
    # reimplement the evaluation directly from the rules
    import itertools

    best = 0.0
    losers_of_everything = 0
    for entries in itertools.product((-1, 1), repeat=6):
        x_a, y_a, x_b, y_b, x_c, y_c = entries
        outcomes = {
            QuestionPattern.XXX: x_a * x_b * x_c == -1,
            QuestionPattern.XYY: x_a * y_b * y_c == 1,
            QuestionPattern.YXY: y_a * x_b * y_c == 1,
            QuestionPattern.YYX: y_a * y_b * x_c == 1,
        }
        rate = sum(outcomes.values()) / 4
        best = max(best, rate)
        losers_of_everything += sum(outcomes.values()) == 4
    assert best == scan_deterministic().best_rate == 0.75
    assert losers_of_everything == 0  # no table wins all four patterns


def test_mixtures_of_tables_stay_below_ceiling():
    # shared randomness mixes deterministic tables; its expected rate is a
    # convex combination, so it can never exceed the deterministic best
    from ghzlab.game import all_tables

    rng = np.random.default_rng(123)
    rates = np.array([t.expected_win_rate() for t in all_tables()])
    for _ in range(1000):
        weights = rng.dirichlet(np.full(64, 0.3))
        assert float(weights @ rates) <= 0.75 + 1e-12


# ---------------------------------------------------------------------------
# quantum strategy


def test_quantum_strategy_always_wins_each_pattern():
    strategy = quantum_strategy()
    streams = TrialStreams(99, 4)
    for pattern in PATTERNS:
        for i in range(2000):
            _, gens = streams.trial(i)
            players = strategy.setup(gens[0])
            answers = [players[j](pattern.axes[j], gens[1 + j]) for j in range(3)]
            assert wins(pattern, answers)


def test_quantum_xxx_product_is_minus_one():
    strategy = quantum_strategy()
    streams = TrialStreams(7, 4)
    for i in range(500):
        _, gens = streams.trial(i)
        players = strategy.setup(gens[0])
        answers = [players[j](Axis.X, gens[1 + j]) for j in range(3)]
        assert answers[0] * answers[1] * answers[2] == -1


def test_quantum_marginal_is_fair_and_pattern_independent():
    strategy = quantum_strategy()
    streams = TrialStreams(13, 4)
    n = 4000
    rates = {}
    for pattern in PATTERNS:
        plus = 0
        for i in range(n):
            _, gens = streams.trial(i)
            players = strategy.setup(gens[0])
            plus += players[0](pattern.axes[0], gens[1]) == 1
            players[1](pattern.axes[1], gens[2])
            players[2](pattern.axes[2], gens[3])
        rates[pattern] = plus / n
        assert abs(rates[pattern] - 0.5) < oracle.binomial_4sigma(0.5, n)
    # pattern choice elsewhere cannot move player A's marginal
    spread = max(rates.values()) - min(rates.values())
    assert spread < 2 * oracle.binomial_4sigma(0.5, n)


# ---------------------------------------------------------------------------
# detection efficiency


def test_theoretical_win_rate_values():
    assert theoretical_win_rate(1.0) == 1.0
    assert theoretical_win_rate(0.5 ** (1 / 3)) == pytest.approx(0.75, abs=1e-12)
    assert theoretical_win_rate(0.9) == pytest.approx(0.8645, abs=1e-12)
    assert theoretical_win_rate(0.0) == 0.5
    with pytest.raises(ValueError):
        theoretical_win_rate(1.5)
    with pytest.raises(ValueError):
        theoretical_win_rate(-0.1)


def test_theoretical_win_rate_strictly_increasing():
    grid = np.linspace(0.0, 1.0, 101)
    values = [theoretical_win_rate(float(e)) for e in grid]
    assert all(b > a for a, b in zip(values, values[1:]))


def test_eta_one_wrapper_is_identity():
    base_records = []
    wrapped_records = []
    run_experiment(quantum_strategy(), 300, 17, record_sink=base_records.append)
    wrapped = apply_detection(quantum_strategy(), EfficiencyModel(1.0))
    run_experiment(wrapped, 300, 17, record_sink=wrapped_records.append)
    assert base_records == wrapped_records


def test_eta_zero_gives_coin_flip_rate():
    strategy = apply_detection(quantum_strategy(), EfficiencyModel(0.0))
    n = 20_000
    report = run_experiment(strategy, n, 3)
    assert report.triple_detection_rate == 0.0
    assert abs(report.win_rate - 0.5) < oracle.binomial_4sigma(0.5, n)


def test_eta_09_matches_formula():
    strategy = apply_detection(quantum_strategy(), EfficiencyModel(0.9))
    n = 30_000
    report = run_experiment(strategy, n, 4)
    assert abs(report.win_rate - 0.8645) < oracle.binomial_4sigma(0.8645, n)
    assert abs(report.triple_detection_rate - 0.9**3) < oracle.binomial_4sigma(0.9**3, n)


def test_detection_failures_recorded():
    strategy = apply_detection(quantum_strategy(), EfficiencyModel(0.5))
    records = []
    run_experiment(strategy, 500, 5, record_sink=records.append)
    flags = [d for rec in records for d in rec.detections]
    assert any(flags) and not all(flags)
    assert all(a in (1, -1) for rec in records for a in rec.answers)


def test_deterministic_strategies_ignore_detection_model():
    table = TableStrategy(ALL_PLUS)
    assert apply_detection(table, EfficiencyModel(0.2)) is table
    coin = RandomStrategy()
    assert apply_detection(coin, EfficiencyModel(0.2)) is coin


def test_efficiency_model_validation():
    with pytest.raises(ValueError):
        EfficiencyModel(1.2)


# ---------------------------------------------------------------------------
# harness


def test_run_experiment_reproducible():
    records_a, records_b = [], []
    r1 = run_experiment(quantum_strategy(), 400, 11, record_sink=records_a.append)
    r2 = run_experiment(quantum_strategy(), 400, 11, record_sink=records_b.append)
    assert r1 == r2
    assert records_a == records_b
    r3 = run_experiment(quantum_strategy(), 400, 12)
    assert r3 != r1


def test_report_bookkeeping():
    report = run_experiment(TableStrategy(ALL_PLUS), 1000, 0)
    assert sum(report.per_pattern_trials.values()) == report.trials == 1000
    assert report.win_rate == report.wins / report.trials
    # all-plus wins exactly the three non-XXX patterns
    assert report.per_pattern_win_rates["XXX"] == 0.0
    for name in ("XYY", "YXY", "YYX"):
        assert report.per_pattern_win_rates[name] == 1.0
    assert report.triple_detection_rate == 1.0
    assert report.master_seed == 0


def test_best_table_hits_three_quarters():
    best = scan_deterministic().best_tables[0]
    n = 40_000
    report = run_experiment(TableStrategy(best), n, 21)
    assert abs(report.win_rate - 0.75) < oracle.binomial_4sigma(0.75, n)


def test_random_strategy_rate():
    n = 20_000
    report = run_experiment(RandomStrategy(), n, 8)
    assert abs(report.win_rate - 0.5) < oracle.binomial_4sigma(0.5, n)


def test_run_experiment_rejects_bad_trials():
    with pytest.raises(ValueError):
        run_experiment(quantum_strategy(), 0, 0)


def test_no_detection_sentinel_repr():
    assert repr(NO_DETECTION) == "NO_DETECTION"


# ---------------------------------------------------------------------------
# stream derivation


def test_trial_streams_deterministic_and_order_free():
    ts1 = TrialStreams(42, 3)
    ts2 = TrialStreams(42, 3)
    seed_a, gens = ts1.trial(7)
    draws_a = [g.random() for g in gens]
    # visit another trial first on the second instance
    _, gens2 = ts2.trial(100)
    [g.random() for g in gens2]
    seed_b, gens2 = ts2.trial(7)
    draws_b = [g.random() for g in gens2]
    assert seed_a == seed_b
    assert draws_a == draws_b


def test_trial_streams_roles_and_trials_differ():
    ts = TrialStreams(0, 4)
    _, gens = ts.trial(0)
    first = [g.random() for g in gens]
    assert len(set(first)) == 4
    _, gens = ts.trial(1)
    second = [g.random() for g in gens]
    assert set(first).isdisjoint(second)


def test_trial_streams_master_seed_matters():
    a = TrialStreams(1, 1)
    b = TrialStreams(2, 1)
    assert a.trial(0)[1][0].random() != b.trial(0)[1][0].random()


def test_trial_streams_validation():
    with pytest.raises(ValueError):
        TrialStreams(-1, 2)
    with pytest.raises(ValueError):
        TrialStreams(0, 2).trial(-1)
