"""End-to-end command line behaviour, including exit codes."""

import json
import math
import subprocess
import sys

import pytest

from qbattery.cli import main

MINIMAL = """\
[model]
scheme = single_qubit
n_qubits = 1
omega0 = 1.0
Omega0 = 1.0

[grid]
t_final = 1.5707963267948966
steps = 20

[output]
directory = {out}
dataset = qtest
"""


def _parsed_stdout(capsys):
    out = capsys.readouterr().out
    values = {}
    for line in out.splitlines():
        if " = " in line:
            key, _, val = line.partition(" = ")
            values[key.strip()] = val.strip()
    return values


def test_no_subcommand_is_usage_error(capsys):
    assert main([]) == 1
    assert "error:" in capsys.readouterr().err


def test_unknown_figure_tag(capsys):
    assert main(["figure", "fig9", "--out", "x"]) == 1


def test_analytic_single(capsys):
    assert main(["analytic", "single", "--t", str(math.pi / 4)]) == 0
    values = _parsed_stdout(capsys)
    assert float(values["nsr_work"]) == pytest.approx(1.0, abs=1e-12)
    assert float(values["mean_work"]) == pytest.approx(0.5, abs=1e-12)
    assert float(values["nsr_product"]) == pytest.approx(1.0, abs=1e-12)


def test_analytic_kbody_with_approx(capsys):
    code = main(
        ["analytic", "kbody", "--n-qubits", "100", "--k", "1", "--t", "0.5", "--approx"]
    )
    assert code == 0
    values = _parsed_stdout(capsys)
    assert float(values["period"]) == pytest.approx(50 * math.pi)
    assert float(values["nsr_work_approx"]) == pytest.approx(400.0)
    assert float(values["nsr_power_approx"]) == pytest.approx(2.5e-7)


def test_analytic_kbody_out_of_regime(capsys):
    code = main(["analytic", "kbody", "--n-qubits", "10", "--k", "5", "--t", "1.0", "--approx"])
    assert code == 1
    assert "out of regime" in capsys.readouterr().err


def test_analytic_kbody_bad_divisibility(capsys):
    assert main(["analytic", "kbody", "--n-qubits", "12", "--k", "5", "--t", "0.1"]) == 1


def test_simulate_end_to_end(tmp_path, capsys):
    config = tmp_path / "scenario.ini"
    config.write_text(MINIMAL.format(out=tmp_path / "out"))
    assert main(["simulate", str(config)]) == 0
    csv_path = tmp_path / "out" / "qtest.csv"
    manifest_path = tmp_path / "out" / "qtest_manifest.txt"
    printed = capsys.readouterr().out.splitlines()
    assert printed == [str(csv_path), str(manifest_path)]
    lines = csv_path.read_text().splitlines()
    assert lines[0].startswith("t,mean_work,var_work,nsr_work,")
    assert len(lines) == 22  # header + 21 grid points
    assert "scheme = SingleQubit" in manifest_path.read_text()


def test_simulate_override(tmp_path, capsys):
    config = tmp_path / "scenario.ini"
    config.write_text(MINIMAL.format(out=tmp_path / "out"))
    assert main(["simulate", str(config), "--set", "grid.steps=10"]) == 0
    csv_path = tmp_path / "out" / "qtest.csv"
    assert len(csv_path.read_text().splitlines()) == 12


def test_simulate_missing_config(capsys):
    assert main(["simulate", "/nonexistent.ini"]) == 1


def test_simulate_dimension_cap(tmp_path, capsys):
    config = tmp_path / "scenario.ini"
    config.write_text(
        MINIMAL.format(out=tmp_path / "out")
        .replace("scheme = single_qubit", "scheme = kbody\nk = 1")
        .replace("n_qubits = 1", "n_qubits = 15")
    )
    assert main(["simulate", str(config)]) == 3


def test_figure_fig2(tmp_path, capsys):
    assert main(["figure", "fig2", "--out", str(tmp_path)]) == 0
    for s in (2, 3, 4):
        csv_path = tmp_path / f"fig2_s{s}.csv"
        assert csv_path.is_file()
        header = csv_path.read_text().splitlines()[0]
        assert header.startswith("t,mean_work")
    assert (tmp_path / "fig2.png").stat().st_size > 0
    manifest = (tmp_path / "fig2_manifest.txt").read_text()
    assert "scheme = IsingS" in manifest
    printed = capsys.readouterr().out.splitlines()
    assert str(tmp_path / "fig2_s2.csv") in printed


def test_verify_fast(tmp_path, capsys):
    report_path = tmp_path / "report.json"
    code = main(["verify", "--level", "fast", "--report", str(report_path)])
    out = capsys.readouterr().out
    assert code == 0
    assert "[PASS]" in out
    report = json.loads(report_path.read_text())
    assert report["level"] == "fast"
    assert report["all_passed"] is True
    assert len(report["results"]) == 11


def test_version_console_script():
    proc = subprocess.run(
        [sys.executable, "-m", "qbattery.cli", "--version"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.strip().startswith("qbattery ")
