import csv
import json

import pytest

from adaptive_relay.channel import ErasurePair, write_pair_file
from adaptive_relay.cli import main


def _json(capsys):
    return json.loads(capsys.readouterr().out)


def test_params(capsys):
    assert main(["params", "--n1", "2", "--n2", "3", "--t", "6"]) == 0
    d = _json(capsys)
    assert (d["k"], d["n1"], d["n2"]) == (24, 48, 50)
    assert d["achievable_rate_no_header"] == "12/25"
    assert d["nonadaptive_rate"] == "2/5"


def test_params_invalid_exit_code(capsys):
    assert main(["params", "--n1", "4", "--n2", "3", "--t", "6"]) == 2
    assert "ZeroCapacityError" in capsys.readouterr().err


def test_simulate_pattern_file(tmp_path, capsys):
    path = tmp_path / "pair.txt"
    write_pair_file(path, ErasurePair([0, 0, 0, 0, 1, 1, 0, 0, 0], [0, 0, 0, 0, 0, 0, 1, 1, 1]))
    assert main(["simulate", "--n1", "2", "--n2", "3", "--t", "6", "--pattern-file", str(path)]) == 0
    d = _json(capsys)
    assert d["success"] and d["max_fill"] <= 50 and "fills" not in d


def test_simulate_adversary_and_messages(tmp_path, capsys):
    msgs = tmp_path / "m.txt"
    msgs.write_text("\n".join(" ".join(str(7 * t + j) for j in range(6)) for t in range(10)))
    rc = main(["simulate", "--n1", "1", "--n2", "2", "--t", "4", "--adversary", "heuristic",
               "--horizon", "10", "--messages-file", str(msgs), "--fills"])
    assert rc == 0
    d = _json(capsys)
    assert d["mode"] == "lemma2" and len(d["fills"]) == 14


def test_simulate_rejects_inadmissible_pattern(tmp_path, capsys):
    path = tmp_path / "bad.txt"
    path.write_text("1100\n0000\n")
    assert main(["simulate", "--n1", "1", "--n2", "2", "--t", "4", "--pattern-file", str(path)]) == 2
    assert "ChannelContractViolation" in capsys.readouterr().err


def test_simulate_needs_horizon():
    with pytest.raises(SystemExit):
        main(["simulate", "--n1", "1", "--n2", "2", "--t", "4", "--adversary", "burst"])


def test_verify_exhaustive(capsys):
    assert main(["verify-exhaustive", "--n1", "1", "--n2", "1", "--t", "2", "--horizon", "5"]) == 0
    out = capsys.readouterr()
    assert json.loads(out.out)["sessions"] == 81
    assert "PASS" in out.err


def test_bounds(capsys):
    assert main(["bounds", "--n1", "1", "--n2", "2", "--t", "4", "--tau", "2000", "--period-cap", "7"]) == 0
    d = _json(capsys)
    assert d["trivial"]["exact"] == "3/5"
    assert d["heuristic"]["asymptotic"]["exact"] == "4/7"
    assert d["bruteforce"]["ratio"]["exact"] == "4/7"


def test_sweep_csv_is_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["sweep", "--samples", "12", "--seed", "2", "--tau", "300", "--out", str(a)]) == 0
    assert main(["sweep", "--samples", "12", "--seed", "2", "--tau", "300", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    rows = list(csv.DictReader(a.open()))
    assert len(rows) == 12
    assert rows[0]["N1"] and "ratio_decimal" in rows[0] and "our_upper" in rows[0]


def test_sweep_json(tmp_path):
    out = tmp_path / "s.json"
    assert main(["sweep", "--samples", "5", "--seed", "1", "--tau", "300", "--out", str(out), "--json"]) == 0
    rows = json.loads(out.read_text())
    assert len(rows) == 5 and "trivial_bound_decimal" in rows[0]


def test_log_env(monkeypatch, tmp_path, capsys):
    monkeypatch.setenv("ADAPTIVE_RELAY_LOG", "info")
    assert main(["sweep", "--samples", "2", "--tau", "300", "--out", str(tmp_path / "x.csv")]) == 0
