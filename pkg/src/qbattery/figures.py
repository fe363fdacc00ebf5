"""Figure dataset emission.

Each figure tag produces one CSV per curve family (per k or per s), a
manifest listing every parameter set, and a rendered PNG next to the data.
The CSVs are the artifact of record; the PNG is a convenience rendering of
the same columns.

fig1: disjoint k-body blocks, N = 12, Omega0 = omega0 = 1, k in {2, 3, 4},
      one full charging period per k, with the closed-form columns printed
      side by side with the numeric ones.
fig2: Ising-type s-spin strings, N = 10, Omega_s = 1, omega0 = 2,
      s in {2, 3, 4}, normalized total Hamiltonian, t in [0, 20]:
      means, noise-to-signal ratios and their product.
fig3: same runs as fig2 plus the variances and the fidelity column.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from . import __version__
from .analytic import kbody_closed_form, kbody_period
from .dynamics import TimeGrid
from .operators import BatteryModel, IsingS, KBody
from .pipeline import (
    ScenarioConfig,
    ScenarioSeries,
    _flag,
    _format_cell,
    evaluate_scenario,
    manifest_lines,
)

FIGURE_TAGS = ("fig1", "fig2", "fig3")

_FIG1_KS = (2, 3, 4)
_FIG1_N = 12
_FIG2_SS = (2, 3, 4)
_FIG2_N = 10
_FIG2_OMEGA0 = 2.0
_FIG2_T_FINAL = 20.0
_GRID_STEPS = 600

FIG1_HEADER = (
    "t,mean_work,var_work,nsr_work,nsr_work_flag,"
    "mean_power,var_power,nsr_power,nsr_power_flag,"
    "analytic_mean_work,analytic_var_work,analytic_nsr_work,"
    "analytic_mean_power,analytic_var_power,analytic_nsr_power"
)

FIG2_HEADER = (
    "t,mean_work,nsr_work,nsr_work_flag,"
    "mean_power,nsr_power,nsr_power_flag,"
    "nsr_product,nsr_product_flag"
)

FIG3_HEADER = (
    "t,mean_work,var_work,nsr_work,nsr_work_flag,"
    "mean_power,var_power,nsr_power,nsr_power_flag,"
    "nsr_product,nsr_product_flag,fidelity"
)


def _write_lines(path, lines):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines))
        fh.write("\n")


def _product_columns(series: ScenarioSeries):
    both = series.nsr_work_defined & series.nsr_power_defined
    product = np.where(both, series.nsr_work * series.nsr_power, np.nan)
    return product, both


def _fig1_series(out_dir) -> list[tuple[int, ScenarioSeries, str]]:
    emitted = []
    for k in _FIG1_KS:
        period = kbody_period(_FIG1_N, k, 1.0)
        config = ScenarioConfig(
            model=BatteryModel(
                n_qubits=_FIG1_N, omega0=1.0, scheme=KBody(k=k, Omega0=1.0)
            ),
            grid=TimeGrid(t_final=period, steps=_GRID_STEPS),
            out_dir=os.fspath(out_dir),
            dataset=f"fig1_k{k}",
            emit_bounds=False,
            emit_tradeoff=False,
        )
        series = evaluate_scenario(config)
        lines = [FIG1_HEADER]
        for i, t in enumerate(series.ts):
            closed = kbody_closed_form(_FIG1_N, k, 1.0, 1.0, float(t))
            cells = [
                _format_cell(float(t)),
                _format_cell(float(series.mean_work[i])),
                _format_cell(float(series.var_work[i])),
                _format_cell(float(series.nsr_work[i]), bool(series.nsr_work_defined[i])),
                _flag(bool(series.nsr_work_defined[i])),
                _format_cell(float(series.mean_power[i])),
                _format_cell(float(series.var_power[i])),
                _format_cell(float(series.nsr_power[i]), bool(series.nsr_power_defined[i])),
                _flag(bool(series.nsr_power_defined[i])),
                _format_cell(closed.mean_work),
                _format_cell(closed.var_work),
                _format_cell(closed.nsr_work),
                _format_cell(closed.mean_power),
                _format_cell(closed.var_power),
                _format_cell(closed.nsr_power),
            ]
            lines.append(",".join(cells))
        path = os.path.join(out_dir, f"fig1_k{k}.csv")
        _write_lines(path, lines)
        emitted.append((k, series, path))
    return emitted


def _fig2_series(out_dir) -> list[tuple[int, ScenarioSeries]]:
    runs = []
    for s in _FIG2_SS:
        config = ScenarioConfig(
            model=BatteryModel(
                n_qubits=_FIG2_N,
                omega0=_FIG2_OMEGA0,
                scheme=IsingS(s=s, Omega_s=1.0),
                normalize_total=True,
            ),
            grid=TimeGrid(t_final=_FIG2_T_FINAL, steps=_GRID_STEPS),
            out_dir=os.fspath(out_dir),
            dataset=f"fig_s{s}",
            emit_bounds=False,
            emit_tradeoff=False,
        )
        runs.append((s, evaluate_scenario(config)))
    return runs


def _write_fig2_csv(out_dir, s, series: ScenarioSeries) -> str:
    product, pdef = _product_columns(series)
    lines = [FIG2_HEADER]
    for i, t in enumerate(series.ts):
        cells = [
            _format_cell(float(t)),
            _format_cell(float(series.mean_work[i])),
            _format_cell(float(series.nsr_work[i]), bool(series.nsr_work_defined[i])),
            _flag(bool(series.nsr_work_defined[i])),
            _format_cell(float(series.mean_power[i])),
            _format_cell(float(series.nsr_power[i]), bool(series.nsr_power_defined[i])),
            _flag(bool(series.nsr_power_defined[i])),
            _format_cell(float(product[i]), bool(pdef[i])),
            _flag(bool(pdef[i])),
        ]
        lines.append(",".join(cells))
    path = os.path.join(out_dir, f"fig2_s{s}.csv")
    _write_lines(path, lines)
    return path


def _write_fig3_csv(out_dir, s, series: ScenarioSeries) -> str:
    product, pdef = _product_columns(series)
    lines = [FIG3_HEADER]
    for i, t in enumerate(series.ts):
        cells = [
            _format_cell(float(t)),
            _format_cell(float(series.mean_work[i])),
            _format_cell(float(series.var_work[i])),
            _format_cell(float(series.nsr_work[i]), bool(series.nsr_work_defined[i])),
            _flag(bool(series.nsr_work_defined[i])),
            _format_cell(float(series.mean_power[i])),
            _format_cell(float(series.var_power[i])),
            _format_cell(float(series.nsr_power[i]), bool(series.nsr_power_defined[i])),
            _flag(bool(series.nsr_power_defined[i])),
            _format_cell(float(product[i]), bool(pdef[i])),
            _flag(bool(pdef[i])),
            _format_cell(float(series.fidelity[i])),
        ]
        lines.append(",".join(cells))
    path = os.path.join(out_dir, f"fig3_s{s}.csv")
    _write_lines(path, lines)
    return path


def _masked(values, mask):
    out = np.array(values, dtype=float)
    out[~np.asarray(mask, dtype=bool)] = np.nan
    return out


def _render_fig1(out_dir, runs) -> str:
    fig, axes = plt.subplots(1, 2, figsize=(9.0, 3.6))
    for k, series, _path in runs:
        period = kbody_period(_FIG1_N, k, 1.0)
        x = series.ts / period
        axes[0].plot(x, _masked(series.nsr_work, series.nsr_work_defined), label=f"k={k}")
        axes[1].plot(x, _masked(series.nsr_power, series.nsr_power_defined), label=f"k={k}")
    for ax, title in zip(axes, ("work", "power")):
        ax.set_yscale("log")
        ax.set_xlabel("t / period")
        ax.set_ylabel(f"noise-to-signal, {title}")
        ax.legend()
    fig.tight_layout()
    path = os.path.join(out_dir, "fig1.png")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def _render_fig2(out_dir, runs) -> str:
    fig, axes = plt.subplots(2, 2, figsize=(9.0, 6.4))
    for s, series in runs:
        product, pdef = _product_columns(series)
        axes[0, 0].plot(series.ts, series.mean_work, label=f"s={s}")
        axes[0, 1].plot(series.ts, series.mean_power, label=f"s={s}")
        axes[1, 0].plot(series.ts, _masked(series.nsr_work, series.nsr_work_defined), label=f"s={s}")
        axes[1, 0].plot(series.ts, _masked(series.nsr_power, series.nsr_power_defined), ls="--")
        axes[1, 1].plot(series.ts, _masked(product, pdef), label=f"s={s}")
    axes[0, 0].set_ylabel("mean work")
    axes[0, 1].set_ylabel("mean power")
    axes[1, 0].set_ylabel("noise-to-signal (solid work, dashed power)")
    axes[1, 0].set_yscale("log")
    axes[1, 1].set_ylabel("NSR product")
    axes[1, 1].set_yscale("log")
    for ax in axes.flat:
        ax.set_xlabel("t")
        ax.legend()
    fig.tight_layout()
    path = os.path.join(out_dir, "fig2.png")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def _render_fig3(out_dir, runs) -> str:
    fig, axes = plt.subplots(1, 3, figsize=(12.0, 3.6))
    for s, series in runs:
        axes[0].plot(series.ts, series.var_work, label=f"s={s}")
        axes[1].plot(series.ts, series.var_power, label=f"s={s}")
        axes[2].plot(series.ts, series.fidelity, label=f"s={s}")
    axes[0].set_ylabel("var work")
    axes[1].set_ylabel("var power")
    axes[2].set_ylabel("fidelity")
    for ax in axes:
        ax.set_xlabel("t")
        ax.legend()
    fig.tight_layout()
    path = os.path.join(out_dir, "fig3.png")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def _figure_manifest(out_dir, tag, configs, artifact_paths) -> str:
    lines = [f"figure = {tag}", f"version = {__version__}"]
    for config in configs:
        lines.append("")
        lines.extend(manifest_lines(config, __version__))
    lines.append("")
    for p in artifact_paths:
        lines.append(f"artifact = {os.path.basename(p)}")
    path = os.path.join(out_dir, f"{tag}_manifest.txt")
    _write_lines(path, lines)
    return path


def emit_figure_dataset(figure: str, out_dir) -> list[str]:
    """Write the CSVs, manifest and PNG for one figure tag; returns paths."""

    if figure not in FIGURE_TAGS:
        raise ValueError(f"unknown figure tag {figure!r} (expected one of {FIGURE_TAGS})")
    os.makedirs(out_dir, exist_ok=True)
    written = []
    if figure == "fig1":
        runs = _fig1_series(out_dir)
        written.extend(path for _k, _s, path in runs)
        written.append(_render_fig1(out_dir, runs))
        configs = [series.config for _k, series, _p in runs]
        written.append(_figure_manifest(out_dir, "fig1", configs, written))
        return written
    runs = _fig2_series(out_dir)
    if figure == "fig2":
        for s, series in runs:
            written.append(_write_fig2_csv(out_dir, s, series))
        written.append(_render_fig2(out_dir, runs))
    else:
        for s, series in runs:
            written.append(_write_fig3_csv(out_dir, s, series))
        written.append(_render_fig3(out_dir, runs))
    configs = [series.config for _s, series in runs]
    written.append(_figure_manifest(out_dir, figure, configs, written))
    return written
