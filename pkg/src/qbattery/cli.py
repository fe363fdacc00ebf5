"""Command-line interface.

Subcommands:

    simulate <config> [--set section.key=value ...]
    figure <fig1|fig2|fig3> --out <dir>
    verify [--level fast|full] [--report path]
    analytic <single|kbody> [params]

Exit codes: 0 success, 1 configuration error (including bad arguments and
I/O problems), 2 verification failure, 3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import __version__
from .analytic import (
    RegimeError,
    kbody_closed_form,
    kbody_period,
    kbody_scaling,
    single_qubit_closed_form,
)
from .config import ConfigError, load_scenario
from .operators import DimensionCapError
from .pipeline import evaluate_scenario, write_csv, write_manifest

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_VERIFY = 2
EXIT_RESOURCE = 3


class _ArgumentError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems as configuration errors."""

    def error(self, message):
        raise _ArgumentError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="qbattery", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qbattery {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run one scenario from a config file")
    p_sim.add_argument("config", help="path to the scenario config file")
    p_sim.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="SECTION.KEY=VALUE",
        help="override a config value (repeatable)",
    )

    p_fig = sub.add_parser("figure", help="emit a figure dataset, manifest and rendering")
    p_fig.add_argument("tag", choices=("fig1", "fig2", "fig3"))
    p_fig.add_argument("--out", required=True, help="output directory")

    p_ver = sub.add_parser("verify", help="run the acceptance verification suite")
    p_ver.add_argument("--level", choices=("fast", "full"), default="fast")
    p_ver.add_argument(
        "--report",
        default="verify_report.json",
        help="path of the machine-readable report (default verify_report.json)",
    )

    p_ana = sub.add_parser("analytic", help="print closed-form statistics")
    ana_sub = p_ana.add_subparsers(dest="model", required=True)
    p_single = ana_sub.add_parser("single", help="one driven qubit")
    p_single.add_argument("--omega0", type=float, default=1.0)
    p_single.add_argument("--Omega0", type=float, default=1.0)
    p_single.add_argument("--t", type=float, required=True)
    p_kbody = ana_sub.add_parser("kbody", help="disjoint k-qubit blocks")
    p_kbody.add_argument("--n-qubits", type=int, required=True)
    p_kbody.add_argument("--k", type=int, required=True)
    p_kbody.add_argument("--omega0", type=float, default=1.0)
    p_kbody.add_argument("--Omega0", type=float, default=1.0)
    p_kbody.add_argument("--t", type=float, required=True)
    p_kbody.add_argument(
        "--approx",
        action="store_true",
        help="also print the large-N noise-to-signal approximations",
    )
    return parser


def _print_record(record) -> None:
    for name in record.__dataclass_fields__:
        print(f"{name} = %.17g" % getattr(record, name))


def _cmd_simulate(args) -> int:
    config = load_scenario(args.config, args.overrides)
    series = evaluate_scenario(config)
    os.makedirs(config.out_dir, exist_ok=True)
    csv_path = os.path.join(config.out_dir, f"{config.dataset}.csv")
    manifest_path = os.path.join(config.out_dir, f"{config.dataset}_manifest.txt")
    write_csv(series.to_records(), csv_path)
    write_manifest(config, manifest_path, __version__)
    print(csv_path)
    print(manifest_path)
    return EXIT_OK


def _cmd_figure(args) -> int:
    from .figures import emit_figure_dataset

    for path in emit_figure_dataset(args.tag, args.out):
        print(path)
    return EXIT_OK


def _cmd_verify(args) -> int:
    from .verify import format_report, run_suite, write_report

    report = run_suite(args.level)
    write_report(report, args.report)
    print(format_report(report))
    print(f"report written to {args.report}")
    return EXIT_OK if report["all_passed"] else EXIT_VERIFY


def _cmd_analytic(args) -> int:
    if args.model == "single":
        _print_record(single_qubit_closed_form(args.omega0, args.Omega0, args.t))
        return EXIT_OK
    record = kbody_closed_form(args.n_qubits, args.k, args.Omega0, args.omega0, args.t)
    approx = None
    if args.approx:
        # validate the regime before any output so a refused run prints
        # nothing but the error
        approx = kbody_scaling(args.n_qubits, args.k, args.Omega0, args.t)
    print("period = %.17g" % kbody_period(args.n_qubits, args.k, args.Omega0))
    _print_record(record)
    if approx is not None:
        print("nsr_work_approx = %.17g" % approx[0])
        print("nsr_power_approx = %.17g" % approx[1])
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _ArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "figure":
            return _cmd_figure(args)
        if args.command == "verify":
            return _cmd_verify(args)
        return _cmd_analytic(args)
    except DimensionCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ConfigError, RegimeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
