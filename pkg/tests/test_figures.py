"""Figure dataset emission: CSV columns, analytic side-by-side, artifacts."""

import csv
import math

import numpy as np
import pytest

from qbattery.figures import FIG1_HEADER, FIG3_HEADER, emit_figure_dataset


def _read_rows(path):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        return reader.fieldnames, list(reader)


@pytest.fixture(scope="module")
def fig1_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("fig1")
    emit_figure_dataset("fig1", out)
    return out


def test_fig1_numeric_matches_analytic_columns(fig1_dir):
    # deviations are judged against each column's own scale: the closed
    # forms cross exact zeros at the grid endpoints, where a pointwise
    # relative error is meaningless
    for k in (2, 3, 4):
        fields, rows = _read_rows(fig1_dir / f"fig1_k{k}.csv")
        assert ",".join(fields) == FIG1_HEADER
        assert len(rows) == 601
        for name in ("mean_work", "var_work", "mean_power", "var_power"):
            numeric = np.array([float(row[name]) for row in rows])
            closed = np.array([float(row[f"analytic_{name}"]) for row in rows])
            worst = np.max(np.abs(numeric - closed)) / np.max(np.abs(closed))
            assert worst < 1e-8, f"k={k} {name}: scaled deviation {worst:.3e}"


def test_fig1_grid_covers_one_period(fig1_dir):
    _, rows = _read_rows(fig1_dir / "fig1_k2.csv")
    assert float(rows[0]["t"]) == 0.0
    # period for k=2, N=12, Omega0=1
    assert float(rows[-1]["t"]) == pytest.approx(3 * math.pi, rel=1e-12)


def test_fig1_artifacts(fig1_dir):
    assert (fig1_dir / "fig1.png").stat().st_size > 0
    manifest = (fig1_dir / "fig1_manifest.txt").read_text()
    assert manifest.count("scheme = KBody") == 3
    assert "fig1_k3.csv" in manifest
    assert "fig1.png" in manifest


def test_fig3_columns(tmp_path):
    emit_figure_dataset("fig3", tmp_path)
    fields, rows = _read_rows(tmp_path / "fig3_s2.csv")
    assert ",".join(fields) == FIG3_HEADER
    assert len(rows) == 601
    assert float(rows[0]["fidelity"]) == pytest.approx(1.0, abs=1e-12)
    assert rows[0]["nsr_product"] == "undef"
    assert rows[0]["nsr_product_flag"] == "1"
    defined = [row for row in rows if row["nsr_product_flag"] == "0"]
    assert defined
    float(defined[0]["nsr_product"])
    assert (tmp_path / "fig3.png").stat().st_size > 0


def test_unknown_tag_rejected(tmp_path):
    with pytest.raises(ValueError):
        emit_figure_dataset("fig9", tmp_path)
