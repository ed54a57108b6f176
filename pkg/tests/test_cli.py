import json
import math

import pytest

from fractrace.cli import KEYS, UsageError, dumps, parse_config, run


def _run(args, tmp_path, capsys):
    out = tmp_path / "r.json"
    code = run(list(args) + ["--out", str(out)])
    cap = capsys.readouterr()
    doc = json.loads(out.read_text()) if out.exists() else None
    return code, cap, doc


def test_ml_eval_prints_value(tmp_path, capsys):
    code, cap, doc = _run(["ml", "eval", "--beta", "1", "--c", "1", "--v", "1"], tmp_path, capsys)
    assert code == 0
    assert cap.out.strip() == "0.3678794412"
    assert doc["schema"] == "fractrace-report/1"
    assert doc["command"] == "ml eval"
    assert doc["result"]["value"] == pytest.approx(math.exp(-1), rel=1e-14)
    assert doc["passed"] is True
    assert list(doc["config"]) == sorted(doc["config"])


def test_stdout_report(capsys):
    assert run(["ml", "eval", "--v", "0", "--out", "-"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["result"]["value"] == 1.0


def test_unknown_key_is_usage_error(tmp_path, capsys):
    code, cap, _ = _run(["ml", "eval", "--colour", "red"], tmp_path, capsys)
    assert code == 1 and "unknown key" in cap.err


def test_unknown_command_is_usage_error(capsys):
    assert run(["ml", "differentiate"]) == 1
    capsys.readouterr()


def test_bad_weight_is_parameter_error(tmp_path, capsys):
    code, cap, _ = _run(["frac", "hardy", "--mu", "1"], tmp_path, capsys)
    assert code == 2
    assert "mu=1.0 violates mu in (-1, q-1) with q=2.0" in cap.err


def test_trace_below_threshold_is_parameter_error(tmp_path, capsys):
    code, cap, _ = _run(["verify", "trace", "--alpha", "0.25", "--count", "2", "--n", "32", "--M", "32"],
                        tmp_path, capsys)
    assert code == 2


def test_failed_tolerance_exits_4(tmp_path, capsys):
    code, cap, doc = _run(["frac", "ialpha", "--M", "16", "--tol", "1e-300"], tmp_path, capsys)
    assert code == 4 and doc["passed"] is False
    assert "assertion failed" in cap.err


def test_config_file_then_flags(tmp_path):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text("# ml settings\nbeta = 0.5\nv = 2.0\n")
    cfg = parse_config(str(cfg_file), ["--v", "3"])
    assert cfg.beta == 0.5 and cfg.v == 3.0
    assert cfg.n == KEYS["n"][1]


def test_duplicate_key_warns(tmp_path):
    cfg_file = tmp_path / "dup.cfg"
    cfg_file.write_text("v = 1\nv = 2\n")
    with pytest.warns(UserWarning, match="last value wins"):
        cfg = parse_config(str(cfg_file))
    assert cfg.v == 2.0


def test_malformed_config_line(tmp_path):
    cfg_file = tmp_path / "bad.cfg"
    cfg_file.write_text("beta 0.5\n")
    with pytest.raises(UsageError):
        parse_config(str(cfg_file))
    with pytest.raises(UsageError):
        parse_config(str(tmp_path / "missing.cfg"))


def test_csv_written_only_on_request(tmp_path, capsys):
    csv_path = tmp_path / "k.csv"
    code, _, _ = _run(["kernel", "moments", "--n", "128", "--L", "16", "--csv", str(csv_path)],
                      tmp_path, capsys)
    assert code == 0
    lines = csv_path.read_text().splitlines()
    assert len(lines) >= 2 and "," in lines[0]


def test_dumps_is_canonical():
    text = dumps({"b": 0.1, "a": [1, 2.5e-300, None, True], "c": {"z": "x", "y": float("nan")}})
    assert text.index('"a"') < text.index('"b"') < text.index('"c"')
    assert "0.10000000000000001" in text
    assert "2.5000000000000001e-300" in text or "2.5e-300" in text
