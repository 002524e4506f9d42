import json

import pytest

from ghzlab.cli import PlayStats, main, play_session

import oracle


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# game


def test_game_quantum_json(capsys):
    code, out, _ = run_cli(
        capsys, "game", "--strategy", "quantum", "--trials", "2000", "--format", "json"
    )
    assert code == 0
    report = json.loads(out)
    assert report["win_rate"] == 1.0
    assert all(v == 1.0 for v in report["per_pattern_win_rates"].values())
    assert report["triple_detection_rate"] == 1.0


def test_game_classical_best(capsys):
    n = 20_000
    code, out, _ = run_cli(
        capsys, "game", "--strategy", "classical-best", "--trials", str(n), "--format", "json"
    )
    assert code == 0
    report = json.loads(out)
    assert abs(report["win_rate"] - 0.75) < oracle.binomial_4sigma(0.75, n)


def test_game_near_threshold_efficiency(capsys):
    n = 20_000
    code, out, _ = run_cli(
        capsys,
        "game", "--strategy", "quantum", "--eta", "0.7937", "--trials", str(n),
        "--format", "json",
    )
    assert code == 0
    report = json.loads(out)
    assert abs(report["win_rate"] - 0.75) < oracle.binomial_4sigma(0.75, n)


def test_game_classical_table(capsys):
    code, out, _ = run_cli(
        capsys,
        "game", "--strategy", "classical-table",
        "--table", "1", "1", "1", "1", "-1", "1",
        "--trials", "500", "--format", "json",
    )
    assert code == 0
    assert json.loads(out)["strategy"].startswith("table")


def test_game_bad_table_sign(capsys):
    code, _, err = run_cli(
        capsys,
        "game", "--strategy", "classical-table",
        "--table", "1", "1", "1", "1", "2", "1",
    )
    assert code == 1
    assert "expected +1 or -1" in err


def test_game_lhv(capsys):
    code, out, _ = run_cli(
        capsys, "game", "--strategy", "lhv", "--trials", "5000", "--format", "json"
    )
    assert code == 0
    report = json.loads(out)
    assert report["conditional_win_rate"] == 1.0
    assert report["single_detections"] == 0


def test_game_lhv_rejects_eta(capsys):
    code, _, err = run_cli(capsys, "game", "--strategy", "lhv", "--eta", "0.9")
    assert code == 1
    assert "lhv" in err


def test_game_jsonl_streams_records(capsys):
    code, out, _ = run_cli(
        capsys, "game", "--trials", "50", "--format", "jsonl"
    )
    assert code == 0
    lines = [json.loads(line) for line in out.strip().splitlines()]
    assert len(lines) == 50
    assert lines[0]["trial_index"] == 0
    assert set(lines[0]) == {"trial_index", "seed", "pattern", "answers", "detections", "win"}


def test_game_text_mentions_bound(capsys):
    code, out, _ = run_cli(capsys, "game", "--trials", "300")
    assert code == 0
    assert "4-sigma bound" in out and "n=300" in out


# ---------------------------------------------------------------------------
# sweep


def test_sweep_csv_matches_formula(capsys):
    code, out, _ = run_cli(
        capsys,
        "sweep", "--grid", "0", "0.5", "0.7937", "0.9", "1.0",
        "--trials", "4000", "--format", "csv",
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "eta,empirical,theoretical"
    theoretical = [float(line.split(",")[2]) for line in lines[1:]]
    assert theoretical == pytest.approx([0.5, 0.5625, 0.75, 0.8645, 1.0], abs=5e-7)
    for line in lines[1:]:
        eta, emp, theo = (float(x) for x in line.split(","))
        assert abs(emp - theo) < max(oracle.binomial_4sigma(theo, 4000), 1e-9)


def test_sweep_rejects_bad_grid(capsys):
    code, _, err = run_cli(capsys, "sweep", "--grid", "1.5")
    assert code == 1
    assert "[0, 1]" in err


# ---------------------------------------------------------------------------
# prove


def test_prove_classical(capsys):
    code, out, _ = run_cli(capsys, "prove", "classical")
    assert code == 0
    assert "UNSAT" in out
    assert "[0, 1, 2, 3]" in out
    assert out.count("SAT") >= 4  # drop-one lines


def test_prove_stapp(capsys):
    code, out, _ = run_cli(capsys, "prove", "stapp", "1", "1", "-1")
    assert code == 0
    assert "UNSAT" in out
    assert "without [5]: SAT" in out


def test_prove_stapp_json(capsys):
    code, out, _ = run_cli(capsys, "prove", "stapp", "1", "1", "-1", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["result"]["status"] == "unsat"
    assert data["result"]["certificate"] == [0, 1, 2, 3, 4, 5]
    assert all(v["status"] == "sat" for v in data["drop_one"].values())


def test_prove_stapp_rejects_bad_product(capsys):
    code, _, err = run_cli(capsys, "prove", "stapp", "1", "1", "1")
    assert code == 1
    assert "multiply to -1" in err


# ---------------------------------------------------------------------------
# teleport


def test_teleport_summary_json(capsys):
    code, out, _ = run_cli(capsys, "teleport", "--trials", "400", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["corrected_success_rate"] == 1.0
    assert 0.3 < data["raw_success_rate"] < 0.7


def test_teleport_csv(capsys):
    code, out, _ = run_cli(capsys, "teleport", "--trials", "400", "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "pattern,trials,corrected_success_rate,raw_success_rate"
    assert all(line.split(",")[2] == "1.000000" for line in lines[1:])


def test_teleport_jsonl(capsys):
    code, out, _ = run_cli(capsys, "teleport", "--trials", "20", "--format", "jsonl")
    assert code == 0
    records = [json.loads(line) for line in out.strip().splitlines()]
    assert len(records) == 20
    assert all(rec["win"] for rec in records)


# ---------------------------------------------------------------------------
# elements


def test_elements_text(capsys):
    code, out, _ = run_cli(capsys, "elements", "1", "1", "-1")
    assert code == 0
    assert "product rule violated: yes" in out


def test_elements_json_all_triples(capsys):
    for triple in (("1", "1", "-1"), ("-1", "1", "1"), ("-1", "-1", "-1")):
        code, out, _ = run_cli(capsys, "elements", *triple, "--format", "json")
        assert code == 0
        data = json.loads(out)
        assert data["product_rule"]["violated"] is True
        assert data["product_rule"]["six_factor_value"] == 1


def test_elements_rejects_even_product(capsys):
    code, _, err = run_cli(capsys, "elements", "1", "1", "1")
    assert code == 1
    assert "multiply to -1" in err


# ---------------------------------------------------------------------------
# shared behavior


def test_byte_identical_reruns(capsys):
    args = ("game", "--trials", "400", "--eta", "0.8", "--seed", "3", "--format", "json")
    _, first, _ = run_cli(capsys, *args)
    _, second, _ = run_cli(capsys, *args)
    assert first == second
    args = ("sweep", "--grid", "0.5", "0.9", "--trials", "300", "--format", "csv")
    _, first, _ = run_cli(capsys, *args)
    _, second, _ = run_cli(capsys, *args)
    assert first == second


def test_out_flag_writes_file(tmp_path, capsys):
    target = tmp_path / "report.json"
    code, out, _ = run_cli(
        capsys, "game", "--trials", "100", "--format", "json", "--out", str(target)
    )
    assert code == 0
    assert out == ""
    assert json.loads(target.read_text())["trials"] == 100


def test_invalid_inputs_exit_one(capsys):
    assert run_cli(capsys, "game", "--trials", "0")[0] == 1
    assert run_cli(capsys, "game", "--eta", "2")[0] == 1
    assert run_cli(capsys, "game", "--seed", "-1")[0] == 1
    assert run_cli(capsys, "game", "--strategy", "nope")[0] == 1
    assert run_cli(capsys, "nonsense")[0] == 1


def test_help_exits_zero(capsys):
    assert run_cli(capsys, "--help")[0] == 0
    assert run_cli(capsys, "game", "--help")[0] == 0


def test_internal_errors_exit_two(capsys, monkeypatch):
    import ghzlab.cli as cli_module

    def boom(*args, **kwargs):
        raise RuntimeError("synthetic failure")

    monkeypatch.setattr(cli_module.game, "run_experiment", boom)
    code, _, err = run_cli(capsys, "game", "--trials", "10")
    assert code == 2
    assert "internal error" in err


# ---------------------------------------------------------------------------
# play mode


def test_play_requires_tty(capsys, monkeypatch):
    import sys

    monkeypatch.setattr(sys.stdin, "isatty", lambda: False)
    code, _, err = run_cli(capsys, "play")
    assert code == 1
    assert "interactive" in err


def scripted_session(inputs, master_seed=0, max_rounds=None):
    lines = []
    feed = iter(inputs)

    def input_fn(prompt):
        try:
            return next(feed)
        except StopIteration:
            raise EOFError

    stats = play_session(master_seed, input_fn, lines.append, max_rounds=max_rounds)
    return stats, "\n".join(lines)


def test_play_measuring_always_wins():
    stats, transcript = scripted_session(["m"] * 60)
    measured = stats.data["measured"]
    assert measured["rounds"] == 60
    assert measured["wins"] == 60
    assert measured["best_streak"] == 60
    assert "LOSS" not in transcript


def test_play_fixed_answers_stay_under_ceiling():
    n = 400
    stats, _ = scripted_session(["+1"] * n)
    chosen = stats.data["chosen"]
    assert chosen["rounds"] == n
    rate = chosen["wins"] / n
    assert rate <= 0.75 + oracle.binomial_4sigma(0.75, n)


def test_play_quit_emits_partial_report():
    stats, transcript = scripted_session(["m", "m", "q"])
    assert stats.rounds == 2
    assert "session over after 2 round(s)." in transcript


def test_play_eof_quits_cleanly():
    stats, transcript = scripted_session(["m"])
    assert stats.rounds == 1
    assert "session over" in transcript


def test_play_rejects_garbage_then_continues():
    stats, transcript = scripted_session(["banana", "m", "q"])
    assert stats.rounds == 1
    assert "please type m, +1, -1, or q" in transcript


def test_play_stats_streaks():
    stats = PlayStats()
    for won in (True, True, False, True):
        stats.record("chosen", won)
    d = stats.data["chosen"]
    assert d["wins"] == 3 and d["best_streak"] == 2 and d["streak"] == 1
