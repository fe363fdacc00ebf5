"""Verification runner.

One check per acceptance criterion, each returning a CheckResult with the
measured slack or error next to the tolerance it was held to.  The fast
level keeps the block-coupled matrix at N <= 8 and skips the ten-qubit
Ising scenarios; the full level runs everything.  Failures never raise:
they are report entries, and the caller turns them into the exit status.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__
from .analytic import kbody_closed_form, kbody_period, kbody_scaling, single_qubit_closed_form
from .dynamics import TimeGrid, heisenberg_observable
from .operators import BatteryModel, IsingS, KBody, SingleQubit, spectral_decompose
from .pipeline import ScenarioConfig, ScenarioSeries, evaluate_scenario
from .statistics import fcs_moments, finite_difference_moments

LEVELS = ("fast", "full")
FAST_KBODY_NS = (2, 4, 6, 8)
FULL_KBODY_NS = (2, 4, 6, 8, 12)
_KBODY_STEPS = 24
_ISING_SS = (2, 3, 4)


@dataclass
class CheckResult:
    criterion: int
    name: str
    passed: bool
    skipped: bool
    seconds: float
    details: str

    @property
    def status(self) -> str:
        if self.skipped:
            return "SKIP"
        return "PASS" if self.passed else "FAIL"


def _result(criterion, name, passed, t0, details) -> CheckResult:
    return CheckResult(criterion, name, bool(passed), False, time.perf_counter() - t0, details)


def _skipped(criterion, name, reason) -> CheckResult:
    return CheckResult(criterion, name, True, True, 0.0, reason)


def _rel_error(numeric: np.ndarray, closed: np.ndarray) -> float:
    denom = np.maximum(np.abs(closed), 1e-300)
    return float(np.max(np.abs(numeric - closed) / denom))


def _single_qubit_series(steps: int, emit_bounds: bool) -> ScenarioSeries:
    config = ScenarioConfig(
        model=BatteryModel(n_qubits=1, omega0=1.0, scheme=SingleQubit(Omega0=1.0)),
        grid=TimeGrid(t_final=math.pi / 2.0, steps=steps),
        emit_bounds=emit_bounds,
        emit_tradeoff=True,
    )
    return evaluate_scenario(config)


def check_single_qubit_closed_forms() -> CheckResult:
    """Criterion 1: four moment series match the closed forms to 1e-9."""

    t0 = time.perf_counter()
    series = _single_qubit_series(steps=501, emit_bounds=False)
    inner = slice(1, -1)  # 500 points strictly inside (0, pi/2)
    ts = series.ts[inner]
    closed = [single_qubit_closed_form(1.0, 1.0, float(t)) for t in ts]
    err = max(
        _rel_error(series.mean_work[inner], np.array([c.mean_work for c in closed])),
        _rel_error(series.var_work[inner], np.array([c.var_work for c in closed])),
        _rel_error(series.mean_power[inner], np.array([c.mean_power for c in closed])),
        _rel_error(series.var_power[inner], np.array([c.var_power for c in closed])),
    )
    elapsed = time.perf_counter() - t0
    passed = err <= 1e-9 and elapsed < 1.0
    return _result(
        1,
        "single-qubit closed forms",
        passed,
        t0,
        f"max relative moment error {err:.3e} (tol 1e-9), elapsed {elapsed:.2f}s (budget 1s)",
    )


def check_single_qubit_saturation(series: ScenarioSeries) -> CheckResult:
    """Criterion 2: |NSR - bound| <= 1e-6 pointwise, Fisher = 4 Omega0^2."""

    t0 = time.perf_counter()
    mask_w = series.bound_work_defined
    mask_p = series.bound_power_defined
    dev_w = float(np.max(np.abs(series.nsr_work[mask_w] - series.bound_work[mask_w])))
    dev_p = float(np.max(np.abs(series.nsr_power[mask_p] - series.bound_power[mask_p])))
    fdev_w = float(np.max(np.abs(series.fisher_work - 4.0)))
    fdev_p = float(np.max(np.abs(series.fisher_power - 4.0)))
    passed = dev_w <= 1e-6 and dev_p <= 1e-6 and fdev_w <= 1e-8 and fdev_p <= 1e-8
    return _result(
        2,
        "single-qubit bound saturation",
        passed,
        t0,
        f"max |NSR-bound| work {dev_w:.3e}, power {dev_p:.3e} (tol 1e-6); "
        f"max |Fisher-4| work {fdev_w:.3e}, power {fdev_p:.3e} (tol 1e-8)",
    )


def check_single_qubit_tradeoff(series: ScenarioSeries) -> CheckResult:
    """Criterion 3: trade-off lhs = rhs = 1 within 1e-8 at defined points."""

    t0 = time.perf_counter()
    mask = series.tradeoff_defined
    dev_lhs = float(np.max(np.abs(series.tradeoff_lhs[mask] - 1.0)))
    dev_rhs = float(np.max(np.abs(series.tradeoff_rhs[mask] - 1.0)))
    passed = dev_lhs <= 1e-8 and dev_rhs <= 1e-8
    return _result(
        3,
        "single-qubit trade-off saturation",
        passed,
        t0,
        f"max |lhs-1| {dev_lhs:.3e}, max |rhs-1| {dev_rhs:.3e} (tol 1e-8)",
    )


def kbody_matrix(ns: tuple[int, ...]) -> dict[tuple[int, int], ScenarioSeries]:
    """One series per (N, k) with k | N, over one charging period each."""

    runs = {}
    for n in ns:
        for k in range(1, n + 1):
            if n % k != 0:
                continue
            config = ScenarioConfig(
                model=BatteryModel(n_qubits=n, omega0=1.0, scheme=KBody(k=k, Omega0=1.0)),
                grid=TimeGrid(t_final=kbody_period(n, k, 1.0), steps=_KBODY_STEPS),
                emit_bounds=False,
                emit_tradeoff=True,
            )
            runs[(n, k)] = evaluate_scenario(config)
    return runs


def check_kbody_moments(runs, build_seconds: float) -> CheckResult:
    """Criterion 4: brute-force moments match the closed forms to 1e-8."""

    t0 = time.perf_counter()
    worst = 0.0
    worst_case = ""
    for (n, k), series in runs.items():
        inner = slice(1, -1)
        ts = series.ts[inner]
        closed = [kbody_closed_form(n, k, 1.0, 1.0, float(t)) for t in ts]
        err = max(
            _rel_error(series.mean_work[inner], np.array([c.mean_work for c in closed])),
            _rel_error(series.var_work[inner], np.array([c.var_work for c in closed])),
            _rel_error(series.mean_power[inner], np.array([c.mean_power for c in closed])),
            _rel_error(series.var_power[inner], np.array([c.var_power for c in closed])),
        )
        if err > worst:
            worst, worst_case = err, f"N={n},k={k}"
    elapsed = build_seconds + (time.perf_counter() - t0)
    passed = worst <= 1e-8 and elapsed < 120.0
    ns = sorted({n for n, _k in runs})
    return _result(
        4,
        "block-coupled moment equivalence",
        passed,
        t0,
        f"N in {ns}, every k | N; max relative error {worst:.3e} at {worst_case} "
        f"(tol 1e-8); elapsed {elapsed:.1f}s (budget 120s)",
    )


def check_cluster_scaling(runs) -> CheckResult:
    """Criterion 5: NSR product k^2/N^2, t-independent, endpoints included."""

    t0 = time.perf_counter()
    worst_dev = 0.0
    worst_spread = 0.0
    endpoint_note = []
    for (n, k), series in runs.items():
        mask = series.nsr_work_defined & series.nsr_power_defined
        product = series.nsr_work[mask] * series.nsr_power[mask]
        target = (k / n) ** 2
        worst_dev = max(worst_dev, float(np.max(np.abs(product - target))))
        worst_spread = max(worst_spread, float(np.max(product) - np.min(product)))
        if k == 1 or k == n:
            endpoint_note.append(f"N={n},k={k}->{target:.6g}")
    passed = worst_dev <= 1e-8 and worst_spread <= 1e-8
    return _result(
        5,
        "universal cluster scaling",
        passed,
        t0,
        f"max |product - k^2/N^2| {worst_dev:.3e}, max grid spread {worst_spread:.3e} "
        f"(tol 1e-8); endpoints on matrix include {len(endpoint_note)} parallel/collective cases",
    )


def check_kbody_tradeoff(runs) -> CheckResult:
    """Criterion 6: lhs - rhs <= 1e-8 at every defined point of the matrix."""

    t0 = time.perf_counter()
    worst_gap = -math.inf
    worst_abs = 0.0
    for (_n, _k), series in runs.items():
        mask = series.tradeoff_defined
        gap = series.tradeoff_lhs[mask] - series.tradeoff_rhs[mask]
        worst_gap = max(worst_gap, float(np.max(gap)))
        worst_abs = max(worst_abs, float(np.max(np.abs(gap))))
    passed = worst_gap <= 1e-8
    return _result(
        6,
        "block-coupled trade-off saturation",
        passed,
        t0,
        f"max (lhs - rhs) {worst_gap:.3e} (tol 1e-8); max |lhs - rhs| {worst_abs:.3e}",
    )


def ising_runs() -> list[tuple[int, ScenarioSeries]]:
    """The three s-string scenarios behind the Ising criteria (full bounds)."""

    runs = []
    for s in _ISING_SS:
        config = ScenarioConfig(
            model=BatteryModel(
                n_qubits=10,
                omega0=2.0,
                scheme=IsingS(s=s, Omega_s=1.0),
                normalize_total=True,
            ),
            grid=TimeGrid(t_final=20.0, steps=600),
            emit_bounds=True,
            emit_tradeoff=True,
        )
        runs.append((s, evaluate_scenario(config)))
    return runs


def check_ising_bounds(runs, build_seconds: float) -> CheckResult:
    """Criterion 7: bound slack, trade-off slack and angle-overlap inequality."""

    t0 = time.perf_counter()
    min_bound_slack = math.inf
    min_tradeoff_slack = math.inf
    min_angle_slack = math.inf
    for _s, series in runs:
        for nsr, bound, mask in (
            (series.nsr_work, series.bound_work, series.bound_work_defined),
            (series.nsr_power, series.bound_power, series.bound_power_defined),
        ):
            if np.any(mask):
                min_bound_slack = min(
                    min_bound_slack, float(np.min(nsr[mask] - bound[mask]))
                )
        tmask = series.tradeoff_defined
        if np.any(tmask):
            min_tradeoff_slack = min(
                min_tradeoff_slack,
                float(np.min(series.tradeoff_lhs[tmask] - series.tradeoff_rhs[tmask])),
            )
        for angle, ov in (
            (series.angle_work, series.overlap_angle_work),
            (series.angle_power, series.overlap_angle_power),
        ):
            min_angle_slack = min(min_angle_slack, float(np.min(angle - ov)))
    elapsed = build_seconds + (time.perf_counter() - t0)
    passed = (
        min_bound_slack >= -1e-6
        and min_tradeoff_slack >= -1e-8
        and min_angle_slack >= -1e-6
        and elapsed < 300.0
    )
    return _result(
        7,
        "Ising bound and trade-off validity",
        passed,
        t0,
        f"min bound slack {min_bound_slack:.3e} (tol -1e-6); min trade-off slack {min_tradeoff_slack:.3e} "
        f"(tol -1e-8); min angle-overlap slack {min_angle_slack:.3e} (tol -1e-6); "
        f"elapsed {elapsed:.1f}s (budget 300s)",
    )


def check_ising_orderings(runs) -> CheckResult:
    """Criterion 8: qualitative s-orderings over the early window t in (0, 1]."""

    t0 = time.perf_counter()
    by_s = dict(runs)
    ss = sorted(by_s)
    ts = by_s[ss[0]].ts
    window = (ts > 0.0) & (ts <= 1.0)

    peaks = [float(np.max(by_s[s].mean_power[window])) for s in ss]
    peaks_ok = all(a < b for a, b in zip(peaks, peaks[1:]))

    matched = window.copy()
    for s in ss:
        matched &= by_s[s].nsr_work_defined & by_s[s].nsr_power_defined
    nsr_p = np.stack([by_s[s].nsr_power[matched] for s in ss])
    nsr_w = np.stack([by_s[s].nsr_work[matched] for s in ss])
    product = nsr_p * nsr_w
    power_ok = bool(np.all(nsr_p[:-1] < nsr_p[1:]))
    work_ok = bool(np.all(nsr_w[:-1] > nsr_w[1:]))
    product_ok = bool(np.all(product[:-1] < product[1:]))
    passed = peaks_ok and power_ok and work_ok and product_ok
    return _result(
        8,
        "Ising qualitative orderings",
        passed,
        t0,
        f"window (0, 1], {int(np.sum(matched))} matched points; peak power "
        + "/".join(f"{p:.3f}" for p in peaks)
        + f"; orderings peak={peaks_ok} powerNSR={power_ok} workNSR={work_ok} product={product_ok}",
    )


def check_generating_function() -> CheckResult:
    """Criterion 9: chi-stencil derivatives match the trace formulas."""

    t0 = time.perf_counter()
    rng = np.random.default_rng(20260814)
    worst_mean = 0.0
    worst_var = 0.0
    for _ in range(50):
        n = int(rng.integers(2, 4))
        dim = 2**n

        def _random_hermitian():
            a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
            h = (a + a.conj().T) / 2.0
            return h * (2.0 / max(float(np.linalg.norm(h, 2)), 1e-12))

        h = _random_hermitian()
        o0 = _random_hermitian()
        psi0 = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        psi0 /= np.linalg.norm(psi0)
        t = float(rng.uniform(0.1, 2.0))
        spec = spectral_decompose(h)
        o_t = heisenberg_observable(spec, o0, t)
        exact = fcs_moments(o0, o_t, psi0)
        fd_mean, fd_var = finite_difference_moments(o0, spec, psi0, t)
        worst_mean = max(worst_mean, abs(fd_mean - exact.mean))
        worst_var = max(worst_var, abs(fd_var - exact.variance))
    passed = worst_mean <= 1e-6 and worst_var <= 1e-5
    return _result(
        9,
        "generating-function oracle",
        passed,
        t0,
        f"50 random instances; max |mean dev| {worst_mean:.3e} (tol 1e-6), "
        f"max |var dev| {worst_var:.3e} (tol 1e-5)",
    )


def _hellinger_margins(p, q, x):
    """Vectorized lhs - rhs of the Hellinger chain for (n_pairs, dim) batches.

    Variances are computed in the shifted form sum p (x - mu)^2; the raw
    E[x^2] - mu^2 form cancels catastrophically for near-degenerate outcome
    values and turns exactly-saturated two-outcome cases into apparent
    violations (the chain is an identity for binary distributions on a
    shared support).
    """

    lhs = 1.0 - np.sqrt(p * q).sum(axis=1)
    mu_p = (p * x).sum(axis=1)
    mu_q = (q * x).sum(axis=1)
    var_p = (p * (x - mu_p[:, None]) ** 2).sum(axis=1)
    var_q = (q * (x - mu_q[:, None]) ** 2).sum(axis=1)
    ssum = np.sqrt(var_p) + np.sqrt(var_q)
    dmu = np.abs(mu_p - mu_q)
    ratio = np.zeros_like(dmu)
    np.divide(dmu, ssum, out=ratio, where=ssum > 0)
    ratio[(ssum == 0) & (dmu > 0)] = np.inf
    rhs = 1.0 - 1.0 / np.sqrt(ratio * ratio + 1.0)
    return lhs - rhs


def check_hellinger_chain(trajectories) -> CheckResult:
    """Criterion 10: the overlap/mean-variance inequality chain never breaks.

    10^5 random distribution pairs over random outcome values, plus every
    (p_t, p_0) pair of each simulated trajectory in both measurement bases.
    """

    t0 = time.perf_counter()
    rng = np.random.default_rng(20260815)
    violations = 0
    worst = math.inf
    total_pairs = 0
    for dim in (2, 4, 8, 16):
        n_pairs = 25000
        p = rng.random((n_pairs, dim))
        q = rng.random((n_pairs, dim))
        p /= p.sum(axis=1, keepdims=True)
        q /= q.sum(axis=1, keepdims=True)
        x = rng.standard_normal((n_pairs, dim)) * 3.0
        margins = _hellinger_margins(p, q, x)
        worst = min(worst, float(np.min(margins)))
        violations += int(np.sum(margins < -1e-9))
        total_pairs += n_pairs
    for series in trajectories:
        for probs, outcomes in (
            (series.probs_work, series.outcomes_work),
            (series.probs_power, series.outcomes_power),
        ):
            if probs is None:
                continue
            pt = probs.T
            p0 = np.broadcast_to(pt[0], pt.shape)
            x = np.broadcast_to(outcomes, pt.shape)
            margins = _hellinger_margins(pt, p0, x)
            worst = min(worst, float(np.min(margins)))
            violations += int(np.sum(margins < -1e-9))
            total_pairs += pt.shape[0]
    passed = violations == 0
    return _result(
        10,
        "Hellinger chain",
        passed,
        t0,
        f"{total_pairs} pairs, {violations} violations beyond 1e-9; min margin {worst:.3e}",
    )


def check_scaling_approximations() -> CheckResult:
    """Criterion 11: small-angle NSR approximations within 5% inside the guard."""

    t0 = time.perf_counter()
    pairs = [
        (40, 1),
        (40, 2),
        (60, 1),
        (60, 3),
        (80, 2),
        (80, 4),
        (100, 1),
        (100, 5),
        (120, 3),
        (200, 8),
    ]
    worst = 0.0
    count = 0
    for n, k in pairs:
        for t in (0.35, 0.85):
            exact = kbody_closed_form(n, k, 1.0, 1.0, t)
            approx_w, approx_p = kbody_scaling(n, k, 1.0, t)
            worst = max(
                worst,
                abs(approx_w / exact.nsr_work - 1.0),
                abs(approx_p / exact.nsr_power - 1.0),
            )
            count += 1
    passed = worst <= 0.05
    return _result(
        11,
        "large-N scaling approximations",
        passed,
        t0,
        f"{count} (N,k,t) samples inside the guard; max relative deviation {worst:.3e} (tol 0.05)",
    )


def run_suite(level: str = "full") -> dict:
    """Execute the criteria for one level and return the report dict."""

    if level not in LEVELS:
        raise ValueError(f"unknown level {level!r} (expected one of {LEVELS})")
    results: list[CheckResult] = []
    results.append(check_single_qubit_closed_forms())

    sq = _single_qubit_series(steps=2000, emit_bounds=True)
    results.append(check_single_qubit_saturation(sq))
    results.append(check_single_qubit_tradeoff(sq))

    ns = FULL_KBODY_NS if level == "full" else FAST_KBODY_NS
    t0 = time.perf_counter()
    runs = kbody_matrix(ns)
    build = time.perf_counter() - t0
    results.append(check_kbody_moments(runs, build))
    results.append(check_cluster_scaling(runs))
    results.append(check_kbody_tradeoff(runs))

    trajectories = [sq]
    if level == "full":
        t0 = time.perf_counter()
        ising = ising_runs()
        ibuild = time.perf_counter() - t0
        results.append(check_ising_bounds(ising, ibuild))
        results.append(check_ising_orderings(ising))
        trajectories.extend(series for _s, series in ising)
    else:
        reason = "fast level keeps the matrix at N <= 8; ten-qubit Ising runs excluded"
        results.append(_skipped(7, "Ising bound and trade-off validity", reason))
        results.append(_skipped(8, "Ising qualitative orderings", reason))

    results.append(check_generating_function())
    results.append(check_hellinger_chain(trajectories))
    results.append(check_scaling_approximations())

    results.sort(key=lambda r: r.criterion)
    executed = [r for r in results if not r.skipped]
    return {
        "version": __version__,
        "level": level,
        "all_passed": all(r.passed for r in executed),
        "results": [asdict(r) for r in results],
    }


def write_report(report: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")


def format_report(report: dict) -> str:
    lines = [f"verification level: {report['level']}"]
    for entry in report["results"]:
        status = "SKIP" if entry["skipped"] else ("PASS" if entry["passed"] else "FAIL")
        lines.append(f"[{status}] criterion {entry['criterion']}: {entry['name']} - {entry['details']}")
    lines.append("overall: " + ("PASS" if report["all_passed"] else "FAIL"))
    return "\n".join(lines)
