"""Scenario configuration files.

Flat INI-style text, one ``key = value`` per line grouped into sections:

    [model]
    scheme = kbody          ; single_qubit | kbody | ising
    n_qubits = 12
    omega0 = 1.0
    k = 2                   ; kbody only
    Omega0 = 1.0            ; single_qubit and kbody
    s = 2                   ; ising only
    Omega_s = 1.0           ; ising only
    normalize_total = false

    [grid]
    t_final = 9.42477796076938
    steps = 600

    [output]
    directory = .
    dataset = scenario

    [options]
    emit_bounds = true
    emit_tradeoff = true
    emit_fidelity = true
    max_qubits = 14

Command-line overrides use dotted paths (``model.n_qubits=8``) and are
applied before validation.  Custom term lists are an API-only feature; the
file format covers the built-in schemes.
"""

from __future__ import annotations

import configparser
import os

from .dynamics import TimeGrid
from .operators import (
    MAX_QUBITS_DEFAULT,
    BatteryModel,
    IsingS,
    KBody,
    SingleQubit,
)
from .pipeline import ScenarioConfig


class ConfigError(ValueError):
    """A configuration file or override that cannot be turned into a run."""


_BOOL_TRUE = {"1", "true", "yes", "on"}
_BOOL_FALSE = {"0", "false", "no", "off"}


def _parse_bool(raw: str, where: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in _BOOL_TRUE:
        return True
    if lowered in _BOOL_FALSE:
        return False
    raise ConfigError(f"{where}: expected a boolean, got {raw!r}")


def _get(parser, section: str, key: str, default: str | None = None) -> str:
    if parser.has_option(section, key):
        return parser.get(section, key)
    if default is None:
        raise ConfigError(f"missing required key {section}.{key}")
    return default


def _get_float(parser, section, key, default=None) -> float:
    raw = _get(parser, section, key, default)
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"{section}.{key}: expected a number, got {raw!r}") from exc


def _get_int(parser, section, key, default=None) -> int:
    raw = _get(parser, section, key, default)
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"{section}.{key}: expected an integer, got {raw!r}") from exc


def _build_scheme(parser):
    tag = _get(parser, "model", "scheme").strip().lower()
    if tag == "single_qubit":
        return SingleQubit(Omega0=_get_float(parser, "model", "Omega0"))
    if tag == "kbody":
        return KBody(
            k=_get_int(parser, "model", "k"),
            Omega0=_get_float(parser, "model", "Omega0"),
        )
    if tag == "ising":
        return IsingS(
            s=_get_int(parser, "model", "s"),
            Omega_s=_get_float(parser, "model", "Omega_s"),
        )
    raise ConfigError(
        f"model.scheme: unknown scheme {tag!r} (expected single_qubit, kbody or ising)"
    )


def apply_overrides(parser, overrides: list[str]) -> None:
    """Apply ``section.key=value`` strings on top of the parsed file."""

    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form section.key=value")
        path, value = item.split("=", 1)
        if "." not in path:
            raise ConfigError(f"override {item!r} is missing the section prefix")
        section, key = path.split(".", 1)
        section = section.strip()
        key = key.strip()
        if not parser.has_section(section):
            parser.add_section(section)
        parser.set(section, key, value.strip())


def load_scenario(path, overrides: list[str] | None = None) -> ScenarioConfig:
    """Parse a scenario file (plus optional overrides) into a ScenarioConfig."""

    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    # omega0 (battery splitting) and Omega0 (drive amplitude) are distinct
    # keys, so option names must stay case-sensitive
    parser.optionxform = str
    try:
        with open(path, "r", encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config file {path}: {exc}") from exc
    if overrides:
        apply_overrides(parser, overrides)
    for section in ("model", "grid"):
        if not parser.has_section(section):
            raise ConfigError(f"missing required section [{section}]")

    scheme = _build_scheme(parser)
    try:
        model = BatteryModel(
            n_qubits=_get_int(parser, "model", "n_qubits"),
            omega0=_get_float(parser, "model", "omega0"),
            scheme=scheme,
            normalize_total=_parse_bool(
                _get(parser, "model", "normalize_total", "false"),
                "model.normalize_total",
            ),
        )
        grid = TimeGrid(
            t_final=_get_float(parser, "grid", "t_final"),
            steps=_get_int(parser, "grid", "steps"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    out_dir = _get(parser, "output", "directory", ".") if parser.has_section("output") else "."
    dataset = _get(parser, "output", "dataset", "scenario") if parser.has_section("output") else "scenario"
    if parser.has_section("options"):
        emit_bounds = _parse_bool(_get(parser, "options", "emit_bounds", "true"), "options.emit_bounds")
        emit_tradeoff = _parse_bool(_get(parser, "options", "emit_tradeoff", "true"), "options.emit_tradeoff")
        emit_fidelity = _parse_bool(_get(parser, "options", "emit_fidelity", "true"), "options.emit_fidelity")
        max_qubits = _get_int(parser, "options", "max_qubits", str(MAX_QUBITS_DEFAULT))
    else:
        emit_bounds = emit_tradeoff = emit_fidelity = True
        max_qubits = MAX_QUBITS_DEFAULT

    return ScenarioConfig(
        model=model,
        grid=grid,
        out_dir=os.fspath(out_dir),
        dataset=dataset,
        emit_bounds=emit_bounds,
        emit_tradeoff=emit_tradeoff,
        emit_fidelity=emit_fidelity,
        max_qubits=max_qubits,
    )
