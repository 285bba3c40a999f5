import json
import os
from pathlib import Path

import pytest

from fedconn.scenario import Scenario, ScenarioError
from fedconn.cli import main

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_parse_minimal():
    sc = Scenario.parse("dimension = 2\nomega = [[0, -1], [1, 0]]\n")
    assert sc.dimension == 2
    assert sc.truncation == 8  # 2*order + 2 by default


def test_parse_errors_carry_line_numbers():
    with pytest.raises(ScenarioError) as exc:
        Scenario.parse("dimension = 2\nomega = [[0, -1], [1, 0]]\nGamma[1][1] = x1\n")
    assert "line 3" in str(exc.value)
    with pytest.raises(ScenarioError) as exc:
        Scenario.parse("dimension = two\n")
    assert "line 1" in str(exc.value)
    # expression errors surface when the value is built, with its line attached
    sc = Scenario.parse("dimension = 2\nomega = [[0, -1], [1, 0]]\nalpha[1][1][2] = x9\n")
    with pytest.raises(ScenarioError) as exc:
        sc.build_alpha(sc.build_symplectic())
    assert "line 3" in str(exc.value)


def test_missing_fields():
    with pytest.raises(ScenarioError):
        Scenario.parse("omega = [[0,-1],[1,0]]\n")
    with pytest.raises(ScenarioError):
        Scenario.parse("dimension = 3\nomega = [[0,-1],[1,0]]\n")


def test_quantize_flat(capsys):
    code, out, err = run_cli(capsys, "quantize", "--scenario", str(SCENARIOS / "flat_r2.scn"))
    assert code == 0
    assert "summary:" in out
    assert "FAIL" not in out


def test_family_command(capsys):
    code, out, _ = run_cli(capsys, "family", "--scenario", str(SCENARIOS / "family_r2.scn"))
    assert code == 0
    assert "compatibility" in out
    assert "i_V s for t1" in out


def test_kahler_command(capsys):
    code, out, _ = run_cli(capsys, "kahler", "--scenario", str(SCENARIOS / "kahler_r2.scn"))
    assert code == 0
    assert "order-1" in out


def test_bad_scenario_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.scn"
    bad.write_text("dimension = 2\n")
    code, out, err = run_cli(capsys, "quantize", "--scenario", str(bad))
    assert code == 2
    assert "omega" in err
    code, _, err = run_cli(capsys, "quantize", "--scenario", str(tmp_path / "missing.scn"))
    assert code == 2


def test_usage_error(capsys):
    code, _, err = run_cli(capsys, "quantize")
    assert code == 2


def test_list_checks(capsys):
    code, out, _ = run_cli(capsys, "--list-checks")
    assert code == 0
    for cmd in ("quantize", "family", "gauge", "kahler", "verify-all"):
        assert cmd in out


def test_determinism_and_json_parity(tmp_path, capsys):
    args = ("quantize", "--scenario", str(SCENARIOS / "curved_r2.scn"))
    code1, out1, _ = run_cli(capsys, *args)
    code2, out2, _ = run_cli(capsys, *args)
    assert code1 == code2 == 0
    assert out1 == out2
    code3, out3, _ = run_cli(capsys, *args, "--report", "json")
    payload = json.loads(out3)
    assert payload["summary"]["fail"] == 0
    text_checks = [line for line in out1.splitlines() if line.startswith("[")]
    assert len(payload["checks"]) == len(text_checks)
    for check, line in zip(payload["checks"], text_checks):
        assert check["name"] in line
        assert check["description"] in line


def test_seed_does_not_change_constructed_objects(capsys):
    args = ("family", "--scenario", str(SCENARIOS / "family_r2.scn"))
    _, out1, _ = run_cli(capsys, *args, "--seed", "1")
    _, out2, _ = run_cli(capsys, *args, "--seed", "2")

    def table(out):
        lines = out.splitlines()
        start = next(i for i, l in enumerate(lines) if l.startswith("i_V beta"))
        return lines[start:]

    assert table(out1) == table(out2)


def test_report_directory(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("FEDCONN_REPORT_DIR", str(tmp_path))
    code, out, _ = run_cli(capsys, "quantize", "--scenario", str(SCENARIOS / "flat_r2.scn"))
    assert code == 0
    text = (tmp_path / "flat_r2.quantize.txt").read_text()
    assert text == out
    payload = json.loads((tmp_path / "flat_r2.quantize.json").read_text())
    assert payload["command"] == "quantize"


def test_verify_all(capsys):
    code, out, _ = run_cli(capsys, "verify-all", "--scenario", str(SCENARIOS / "flat_r2.scn"))
    assert code == 0
    assert "weyl battery" in out
    assert "cochain battery" in out
