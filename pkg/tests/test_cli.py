import json

import pytest

from su11 import CoefficientSequence, ExponentPair, hy_ratio
from su11.cli import ExperimentConfig, build_parser, emit_report, load_config, main
from su11.errors import ConfigError
from su11.inequality_harness import CSV_HEADER
from su11.nft_core import sequence_from_text, sequence_to_text


@pytest.fixture
def spike_file(tmp_path):
    path = tmp_path / "spike.txt"
    path.write_text(sequence_to_text(CoefficientSequence(0, (0.4,))))
    return path


@pytest.fixture
def fast_args(tmp_path):
    out = tmp_path / "reports"
    return ["--output", str(out), "--rel-tol", "1e-8"], out


# ---------------------------------------------------------------------------
# config handling


def test_config_file_with_overrides(tmp_path):
    cfg_file = tmp_path / "exp.cfg"
    cfg_file.write_text("# comment\np = 1.3\nseed = 5\nl1_cap = 0.4\n")
    ns = build_parser().parse_args(
        ["ratio", "--config", str(cfg_file), "--p", "1.7"]
    )
    cfg = load_config("ratio", ns)
    assert cfg.p == 1.7  # command line wins
    assert cfg.seed == 5
    assert cfg.l1_cap == 0.4


def test_config_rejects_unknown_keys(tmp_path):
    cfg_file = tmp_path / "exp.cfg"
    cfg_file.write_text("nonsense = 1\n")
    ns = build_parser().parse_args(
        ["ratio", "--config", str(cfg_file)]
    )
    with pytest.raises(ConfigError, match="unknown key"):
        load_config("ratio", ns)


def test_config_digest_stable():
    a = ExperimentConfig(mode="ratio", seed=1)
    b = ExperimentConfig(mode="ratio", seed=1)
    assert a.digest() == b.digest()
    c = ExperimentConfig(mode="ratio", seed=2)
    assert a.digest() != c.digest()


# ---------------------------------------------------------------------------
# emit_report


def test_emit_csv_single_report(tmp_path, quad):
    rep = hy_ratio(CoefficientSequence(0, (0.4,)), ExponentPair(1.5), quad)
    path = tmp_path / "r.csv"
    emit_report([rep], "csv", path)
    lines = path.read_text().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 2


def test_emit_empty_records_refused(tmp_path):
    path = tmp_path / "r.csv"
    with pytest.raises(ValueError):
        emit_report([], "csv", path)
    assert not path.exists()


def test_emit_deterministic_bytes(tmp_path, quad):
    rep = hy_ratio(CoefficientSequence(0, (0.4,)), ExponentPair(1.5), quad)
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    emit_report([rep, rep], "csv", p1)
    emit_report([rep, rep], "csv", p2)
    assert p1.read_bytes() == p2.read_bytes()
    j1, j2 = tmp_path / "a.json", tmp_path / "b.json"
    emit_report([rep], "json", j1)
    emit_report([rep], "json", j2)
    assert j1.read_bytes() == j2.read_bytes()


def test_emit_plot_table(tmp_path):
    path = tmp_path / "t.dat"
    emit_report([(1.0, 2.0), (1.5, 2.5)], "plot", path)
    lines = path.read_text().splitlines()
    assert lines[0] == "# x y"
    assert lines[1] == "1.0 2.0"


def test_emit_unknown_format(tmp_path):
    with pytest.raises(ValueError, match="unknown format"):
        emit_report([(1, 2)], "xml", tmp_path / "x")


# ---------------------------------------------------------------------------
# subcommands end to end


def test_ratio_mode_spike(capsys, spike_file, fast_args):
    extra, out = fast_args
    code = main(["ratio", "--input", str(spike_file), "--p", "1.5", *extra])
    assert code == 0
    captured = capsys.readouterr().out
    assert captured.startswith("seed ")
    assert (out / "ratio.csv").exists()
    payload = json.loads((out / "ratio.json").read_text())
    assert payload[0]["ratio"] == pytest.approx(1.0, abs=1e-12)


def test_ratio_mode_generator(capsys, fast_args):
    extra, out = fast_args
    code = main(["ratio", "--generator", "equal:10,0.001", "--p", "1.5", *extra])
    assert code == 0
    payload = json.loads((out / "ratio.json").read_text())
    assert payload[0]["ratio"] < 1.0


def test_ledger_mode_spike_marks_preconditions(capsys, spike_file, fast_args):
    extra, out = fast_args
    code = main(["ledger", "--input", str(spike_file), "--p", "1.5", *extra])
    assert code == 0
    rows = (out / "ledger.csv").read_text().splitlines()
    assert rows[0] == CSV_HEADER
    l8 = next(r for r in rows if r.startswith("L8"))
    assert "precondition-failed" in l8
    payload = json.loads((out / "ledger.json").read_text())
    by_id = {e["check_id"]: e for e in payload}
    assert by_id["L8"]["precondition_failed"]
    assert by_id["L9"]["precondition_failed"]
    assert all(by_id[f"L{i}"]["holds"] for i in range(1, 8))


def test_probe_mode_fixture(capsys, tmp_path, fast_args):
    extra, out = fast_args
    seq_path = tmp_path / "two.txt"
    seq_path.write_text(sequence_to_text(CoefficientSequence(0, (0.5, 0.5))))
    code = main(["probe", "--input", str(seq_path), *extra])
    assert code == 0
    captured = capsys.readouterr().out
    assert "slope" in captured
    data = (out / "probe.dat").read_text().splitlines()
    assert data[0] == "# x y"
    assert len(data) == 5


def test_search_mode_round_trips_best_f(capsys, fast_args):
    extra, out = fast_args
    code = main(
        ["search", "--p", "1.5", "--seed", "3", "--starts", "1",
         "--max-iters", "4", "--window", "0..2", *extra]
    )
    assert code == 0
    best = sequence_from_text((out / "best_F.txt").read_text())
    payload = json.loads((out / "search.json").read_text())
    again = CoefficientSequence.from_json_dict(payload[0]["best_F"])
    assert best == again  # exact decimal round-trip through both formats


def test_sweep_mode_emits_plot_table(capsys, fast_args):
    extra, out = fast_args
    code = main(
        ["sweep", "--seed", "3", "--starts", "1", "--max-iters", "2",
         "--window", "0..2", "--p-values", "1.5", *extra]
    )
    assert code == 0
    table = (out / "sweep.dat").read_text().splitlines()
    assert table[0] == "# x y"
    assert len(table) == 2


def test_usage_error_exit_code(capsys, tmp_path):
    code = main(["ratio", "--input", str(tmp_path / "missing.txt")])
    assert code == 1
    assert "error" in capsys.readouterr().err


def test_domain_error_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("offset 0\n0.999999999999999 0.0\n")
    code = main(["ratio", "--input", str(bad), "--p", "1.5"])
    assert code == 1


def test_ratio_requires_input(capsys):
    code = main(["ratio", "--p", "1.5"])
    assert code == 1
    assert "input" in capsys.readouterr().err


def test_cli_output_byte_deterministic(tmp_path, spike_file):
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        code = main(["ratio", "--input", str(spike_file), "--p", "1.5",
                     "--seed", "9", "--output", str(out)])
        assert code == 0
        outs.append((out / "ratio.csv").read_bytes())
    assert outs[0] == outs[1]
