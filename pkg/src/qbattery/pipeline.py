"""End-to-end scenario evaluation.

Wires the operator builders, the spectral propagator and the statistics and
bound layers into a single batched pass over a time grid, and serializes the
result as a delimited table plus a run manifest.

The evaluator works in the eigenbasis of the total Hamiltonian.  With
``w = V^dag psi0`` and ``dc(t) = exp(-i lam t) - 1`` computed in its
cancellation-free form ``-2i sin(lam t / 2) exp(-i lam t / 2)``, the evolved
state splits as ``psi_t = psi0 + V (dc * w)``, so every first and second
moment of a counting observable reduces to dense matrix panels over the whole
grid at once.  That keeps the per-point work inside BLAS and avoids the
catastrophic cancellation of forming ``exp(-i lam t) - 1`` directly at small
``t``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import bhattacharyya_angle, fisher_from_amplitudes, overlap_angle
from .dynamics import DEGENERACY_TOL, TimeGrid, group_sorted_values
from .operators import (
    MAX_QUBITS_DEFAULT,
    BatteryModel,
    DimensionCapError,
    KBody,
    battery_diagonal,
    charging_drive,
    power_from_battery_diagonal,
    spectral_decompose,
)
from .statistics import EIGENSTATE_TOL, MEAN_ZERO_FACTOR

CSV_HEADER = (
    "t,mean_work,var_work,nsr_work,nsr_work_flag,"
    "mean_power,var_power,nsr_power,nsr_power_flag,"
    "fisher_work,angle_work,bound_work,"
    "fisher_power,angle_power,bound_power,"
    "tradeoff_lhs,tradeoff_rhs,tradeoff_flag,fidelity"
)

UNDEF_TOKEN = "undef"


@dataclass(frozen=True)
class ScenarioConfig:
    """Fully resolved description of one simulation run."""

    model: BatteryModel
    grid: TimeGrid
    out_dir: str = "."
    dataset: str = "scenario"
    emit_bounds: bool = True
    emit_tradeoff: bool = True
    emit_fidelity: bool = True
    max_qubits: int = MAX_QUBITS_DEFAULT


@dataclass
class StatisticsRecord:
    """One row of the output table.

    ``*_defined`` flags mark cells whose value is meaningful; undefined cells
    hold ``nan`` (or ``inf`` for a diverging bound) and are serialized as the
    literal ``undef`` token.
    """

    t: float
    mean_work: float
    var_work: float
    nsr_work: float
    nsr_work_defined: bool
    mean_power: float
    var_power: float
    nsr_power: float
    nsr_power_defined: bool
    fisher_work: float
    angle_work: float
    bound_work: float
    bound_work_defined: bool
    fisher_power: float
    angle_power: float
    bound_power: float
    bound_power_defined: bool
    tradeoff_lhs: float
    tradeoff_rhs: float
    tradeoff_defined: bool
    fidelity: float


@dataclass
class ScenarioSeries:
    """Array-of-columns view of a finished run.

    All arrays share the grid length.  Boolean arrays are validity masks, not
    error indicators: an undefined noise-to-signal ratio at a mean-work zero
    is expected behaviour, and downstream checks restrict themselves to the
    points where the masks hold.
    """

    config: ScenarioConfig
    ts: np.ndarray
    mean_work: np.ndarray
    var_work: np.ndarray
    nsr_work: np.ndarray
    nsr_work_defined: np.ndarray
    mean_power: np.ndarray
    var_power: np.ndarray
    nsr_power: np.ndarray
    nsr_power_defined: np.ndarray
    fidelity: np.ndarray
    scale: float
    e_min: float
    e_max: float
    f_work: np.ndarray
    f_power: np.ndarray
    fisher_work: np.ndarray | None = None
    angle_work: np.ndarray | None = None
    bound_work: np.ndarray | None = None
    bound_work_defined: np.ndarray | None = None
    fisher_work_singular: np.ndarray | None = None
    overlap_angle_work: np.ndarray | None = None
    probs_work: np.ndarray | None = None
    outcomes_work: np.ndarray | None = None
    fisher_power: np.ndarray | None = None
    angle_power: np.ndarray | None = None
    bound_power: np.ndarray | None = None
    bound_power_defined: np.ndarray | None = None
    fisher_power_singular: np.ndarray | None = None
    overlap_angle_power: np.ndarray | None = None
    probs_power: np.ndarray | None = None
    outcomes_power: np.ndarray | None = None
    tradeoff_lhs: np.ndarray | None = None
    tradeoff_rhs: np.ndarray | None = None
    tradeoff_comm: np.ndarray | None = None
    tradeoff_anti: np.ndarray | None = None
    tradeoff_defined: np.ndarray | None = None
    extras: dict = field(default_factory=dict)

    def to_records(self) -> list[StatisticsRecord]:
        nan = float("nan")
        T = self.ts.size
        records = []
        for i in range(T):
            has_bounds = self.fisher_work is not None
            has_tradeoff = self.tradeoff_lhs is not None
            has_fidelity = self.config.emit_fidelity
            records.append(
                StatisticsRecord(
                    t=float(self.ts[i]),
                    mean_work=float(self.mean_work[i]),
                    var_work=float(self.var_work[i]),
                    nsr_work=float(self.nsr_work[i]),
                    nsr_work_defined=bool(self.nsr_work_defined[i]),
                    mean_power=float(self.mean_power[i]),
                    var_power=float(self.var_power[i]),
                    nsr_power=float(self.nsr_power[i]),
                    nsr_power_defined=bool(self.nsr_power_defined[i]),
                    fisher_work=float(self.fisher_work[i]) if has_bounds else nan,
                    angle_work=float(self.angle_work[i]) if has_bounds else nan,
                    bound_work=float(self.bound_work[i]) if has_bounds else nan,
                    bound_work_defined=bool(self.bound_work_defined[i]) if has_bounds else False,
                    fisher_power=float(self.fisher_power[i]) if has_bounds else nan,
                    angle_power=float(self.angle_power[i]) if has_bounds else nan,
                    bound_power=float(self.bound_power[i]) if has_bounds else nan,
                    bound_power_defined=bool(self.bound_power_defined[i]) if has_bounds else False,
                    tradeoff_lhs=float(self.tradeoff_lhs[i]) if has_tradeoff else nan,
                    tradeoff_rhs=float(self.tradeoff_rhs[i]) if has_tradeoff else nan,
                    tradeoff_defined=bool(self.tradeoff_defined[i]) if has_tradeoff else False,
                    fidelity=float(self.fidelity[i]) if has_fidelity else nan,
                )
            )
        return records


def _moment_panels(o_phi0, od, d_panel, dc, phi, f0, g):
    """First and second moments of ``O_t - O_0`` over the whole grid.

    ``od = O @ D`` and ``d_panel = D`` are (dim, T) panels, ``f0 = V^dag O psi0``
    is a vector and ``g = V^dag od``; the eigenbasis coordinates of
    ``(O_t - O_0) psi0`` are ``y = conj(dc) * f0[:, None] + conj(phi) * g``.
    Returns (mean, var, y).
    """

    mean = np.einsum("it,it->t", d_panel.conj(), od).real
    mean = mean + 2.0 * (o_phi0.conj() @ d_panel).real
    y = dc.conj() * f0[:, None] + phi.conj() * g
    second = np.einsum("it,it->t", y.conj(), y).real
    var = second - mean * mean
    return mean, var, y


def _nsr_columns(mean, var):
    """Noise-to-signal ratio with its validity mask.

    The ratio is reported only where ``|mean| >= MEAN_ZERO_FACTOR *
    sqrt(var + 1)``; elsewhere the value column carries ``inf`` and the mask
    is ``False``.
    """

    defined = np.abs(mean) >= MEAN_ZERO_FACTOR * np.sqrt(var + 1.0)
    nsr = np.full(mean.shape, np.inf)
    np.divide(var, mean * mean, out=nsr, where=defined)
    return nsr, defined


def _correlation_columns(mean, defined, m0, var0, o_psi0, o_d, v, phi, f0):
    """Signed correlation term ``f(t) = 4 cov(O_t, O_0) / <O_t - O_0>^2``.

    A start state that is an eigenstate of the counting observable forces the
    covariance to zero identically, so the whole column short-circuits to
    zero rather than amplifying round-off through the squared mean.  Points
    with an undefined mean get ``nan``; the ``defined`` mask is the one the
    noise-to-signal ratio uses, since the denominators agree.
    """

    T = mean.size
    scale0 = max(1.0, float(np.linalg.norm(o_psi0) ** 2))
    if var0 <= EIGENSTATE_TOL * scale0:
        return np.zeros(T)
    # <psi0| O_t O_0 |psi0> = <O Psi_t | U_t O psi0>; the right factor is one
    # more panel in the eigenbasis, U_t O psi0 = V (phi * f0).
    right = v @ (phi * f0[:, None])
    o_psi_t = o_d + o_psi0[:, None]
    cross = np.einsum("it,it->t", o_psi_t.conj(), right).real
    m_t = mean + m0
    cov = cross - m_t * m0
    f = np.full(T, np.nan)
    np.divide(4.0 * cov, mean * mean, out=f, where=defined)
    return f


def _bound_columns(angle, f, nsr_defined, singular):
    """Lower bound ``cot^2(angle) - f`` and the mask where comparing it to the
    noise-to-signal ratio is meaningful."""

    T = angle.size
    bound = np.full(T, np.inf)
    sin_a = np.sin(angle)
    positive = (angle > 0.0) & (np.abs(sin_a) > 0.0)
    f_ok = np.isfinite(f)
    usable = positive & f_ok
    cot2 = np.zeros(T)
    np.divide(np.cos(angle), sin_a, out=cot2, where=usable)
    np.square(cot2, out=cot2)
    bound[usable] = cot2[usable] - f[usable]
    defined = usable & nsr_defined & ~singular & (angle <= math.pi / 2.0)
    return bound, defined


def _kbody_power_family(model: BatteryModel, scale: float):
    """Eigen-family of the power observable for the k-body scheme.

    The observable is a sum of commuting single-block terms, so its
    eigensystem is the k-qubit block eigensystem raised to a Kronecker power.
    This stays cheap for every block size the disjoint-block scheme allows
    without touching a full-dimension complex diagonalization.
    """

    scheme = model.scheme
    k = scheme.k
    blocks = model.n_qubits // k
    hb_block = battery_diagonal(k, model.omega0)
    omega_k = (k / model.n_qubits) * scheme.Omega0
    x_string = np.ones((1, 1))
    sigma_x = np.array([[0.0, 1.0], [1.0, 0.0]])
    for _ in range(k):
        x_string = np.kron(x_string, sigma_x)
    p_block = power_from_battery_diagonal(hb_block, omega_k * x_string, scale=scale)
    mu, ub = np.linalg.eigh(p_block)
    vals = mu.copy()
    basis = ub.astype(np.complex128)
    for _ in range(blocks - 1):
        vals = np.add.outer(vals, mu).ravel()
        basis = np.kron(basis, ub)
    order = np.argsort(vals, kind="stable")
    vals = vals[order]
    basis = np.ascontiguousarray(basis[:, order], dtype=np.complex128)
    slices = group_sorted_values(vals, DEGENERACY_TOL)
    return vals, basis, slices


def _collective_power_family(model: BatteryModel, scale: float):
    """Eigen-family of the power observable for the collective (k = N) scheme.

    A single all-site sigma_x string couples each basis state only to its
    bit complement, so the observable splits into 2x2 pair blocks
    [[0, c], [conj(c), 0]] with c = -i (b_i - b_~i) Omega0 / scale; the
    eigensystem is exact pair rotations, no dense diagonalization.
    """

    n = model.n_qubits
    dim = 2**n
    hb = battery_diagonal(n, model.omega0)
    omega = model.scheme.Omega0
    half = dim // 2
    i_lo = np.arange(half)
    i_hi = dim - 1 - i_lo
    c = (-1j / scale) * (hb[i_lo] - hb[i_hi]) * omega
    mag = np.abs(c)
    # unit phase of c; zero blocks keep the computational pair unrotated
    phase = np.where(mag > 0, c / np.where(mag > 0, mag, 1.0), 1.0)
    vals = np.concatenate([mag, -mag])
    basis = np.zeros((dim, dim), dtype=np.complex128)
    root = 1.0 / math.sqrt(2.0)
    cols_plus = np.arange(half)
    cols_minus = half + cols_plus
    basis[i_lo, cols_plus] = phase * root
    basis[i_hi, cols_plus] = root
    basis[i_lo, cols_minus] = -phase * root
    basis[i_hi, cols_minus] = root
    zero = mag == 0.0
    if np.any(zero):
        basis[i_lo[zero], cols_plus[zero]] = 1.0
        basis[i_hi[zero], cols_plus[zero]] = 0.0
        basis[i_lo[zero], cols_minus[zero]] = 0.0
        basis[i_hi[zero], cols_minus[zero]] = 1.0
    order = np.argsort(vals, kind="stable")
    vals = vals[order]
    basis = np.ascontiguousarray(basis[:, order])
    slices = group_sorted_values(vals, DEGENERACY_TOL)
    return vals, basis, slices


def _power_family(model: BatteryModel, p0: np.ndarray, scale: float):
    """Sorted eigenvalues, eigenbasis and degeneracy slices of the power
    observable, using the block structure of the k-body scheme when present."""

    if isinstance(model.scheme, KBody):
        if model.scheme.k == model.n_qubits:
            return _collective_power_family(model, scale)
        return _kbody_power_family(model, scale)
    vals, vecs = np.linalg.eigh(p0)
    vecs = np.ascontiguousarray(vecs, dtype=np.complex128)
    slices = group_sorted_values(vals, DEGENERACY_TOL)
    return vals, vecs, slices


def _fisher_block(slices, amps, hamps, ts):
    """Fisher information, Bhattacharyya angle, singular mask, probability
    panel and statistical distance to the start for one measurement family."""

    values, singular, probs = fisher_from_amplitudes(slices, amps, hamps)
    angle = bhattacharyya_angle(values, ts)
    ov = overlap_angle(probs, probs[:, :1])
    return values, angle, singular, probs, ov


def evaluate_scenario(config: ScenarioConfig) -> ScenarioSeries:
    """Run one scenario and return every column the output table needs.

    The start state is the battery ground state ``|0...0>``.  Work is counted
    against the bare battery Hamiltonian; power against the commutator
    observable, divided by the spectral width of the total Hamiltonian when
    the model is normalized.
    """

    model = config.model
    n = model.n_qubits
    if n > config.max_qubits:
        raise DimensionCapError(
            f"scenario needs {n} qubits, above the configured cap of {config.max_qubits}"
        )
    dim = 2**n
    ts = config.grid.points
    T = ts.size

    hb = battery_diagonal(n, model.omega0)
    # charging_drive returns H_C + H_B, which is exactly the quench
    # Hamiltonian H_T = H_B + H_C.
    drive = charging_drive(model, config.max_qubits)
    decomp = spectral_decompose(drive)
    lam_raw = decomp.eigenvalues
    e_min = float(lam_raw[0])
    e_max = float(lam_raw[-1])
    if model.normalize_total:
        scale = e_max - e_min
        lam = (lam_raw - e_min) / scale
    else:
        scale = 1.0
        lam = lam_raw
    v = decomp.eigenvectors

    p0 = power_from_battery_diagonal(hb, drive, scale=scale)

    psi0 = np.zeros(dim, dtype=np.complex128)
    psi0[0] = 1.0
    w = v.conj().T @ psi0

    half = 0.5 * np.outer(lam, ts)
    dc = -2.0j * np.sin(half) * np.exp(-1.0j * half)
    phi = dc + 1.0
    del half
    d_panel = v @ (dc * w[:, None])
    psi_panel = d_panel.copy()
    psi_panel[0, :] += 1.0

    # Work moments: the counting observable is diagonal, so O @ D is an
    # elementwise scaling.
    o_phi0_w = hb * psi0
    od_w = hb[:, None] * d_panel
    f0_w = v.conj().T @ o_phi0_w
    g_w = v.conj().T @ od_w
    mean_w, var_w, y_w = _moment_panels(o_phi0_w, od_w, d_panel, dc, phi, f0_w, g_w)

    o_phi0_p = p0 @ psi0
    od_p = p0 @ d_panel
    f0_p = v.conj().T @ o_phi0_p
    g_p = v.conj().T @ od_p
    mean_p, var_p, y_p = _moment_panels(o_phi0_p, od_p, d_panel, dc, phi, f0_p, g_p)

    nsr_w, def_w = _nsr_columns(mean_w, var_w)
    nsr_p, def_p = _nsr_columns(mean_p, var_p)

    weights = (w.conj() * w).real
    fid = np.abs(weights @ phi) ** 2

    m0_w = float((psi0.conj() @ o_phi0_w).real)
    var0_w = float(np.linalg.norm(o_phi0_w) ** 2 - m0_w**2)
    m0_p = float((psi0.conj() @ o_phi0_p).real)
    var0_p = float(np.linalg.norm(o_phi0_p) ** 2 - m0_p**2)
    f_w = _correlation_columns(mean_w, def_w, m0_w, var0_w, o_phi0_w, od_w, v, phi, f0_w)
    f_p = _correlation_columns(mean_p, def_p, m0_p, var0_p, o_phi0_p, od_p, v, phi, f0_p)

    series = ScenarioSeries(
        config=config,
        ts=ts,
        mean_work=mean_w,
        var_work=var_w,
        nsr_work=nsr_w,
        nsr_work_defined=def_w,
        mean_power=mean_p,
        var_power=var_p,
        nsr_power=nsr_p,
        nsr_power_defined=def_p,
        fidelity=fid,
        scale=scale,
        e_min=e_min,
        e_max=e_max,
        f_work=f_w,
        f_power=f_p,
    )

    if config.emit_tradeoff:
        cross = np.einsum("it,it->t", y_p.conj(), y_w)
        mw_mp = mean_p * mean_w
        both = def_w & def_p
        comm = np.zeros(T)
        anti = np.zeros(T)
        np.divide(2.0 * cross.imag, mw_mp, out=comm, where=both)
        ratio = np.zeros(T)
        np.divide(2.0 * cross.real, mw_mp, out=ratio, where=both)
        comm = np.where(both, comm**2, np.nan)
        anti = np.where(both, (ratio - 2.0) ** 2, np.nan)
        rhs = (comm + anti) / 4.0
        lhs = np.full(T, np.nan)
        np.multiply(nsr_w, nsr_p, out=lhs, where=both)
        series.tradeoff_lhs = lhs
        series.tradeoff_rhs = rhs
        series.tradeoff_comm = comm
        series.tradeoff_anti = anti
        series.tradeoff_defined = both

    if config.emit_bounds:
        h_psi = v @ (lam[:, None] * (phi * w[:, None]))
        # Work family: the observable is diagonal in the computational basis,
        # so the amplitude panel is a row permutation of the state panel.
        order_w = np.argsort(hb, kind="stable")
        hb_sorted = hb[order_w]
        slices_w = group_sorted_values(hb_sorted, DEGENERACY_TOL)
        amps_w = psi_panel[order_w, :]
        hamps_w = h_psi[order_w, :]
        fi_w, angle_w, sing_w, probs_w, ov_w = _fisher_block(slices_w, amps_w, hamps_w, ts)
        bound_w, bdef_w = _bound_columns(angle_w, f_w, def_w, sing_w)
        series.fisher_work = fi_w
        series.angle_work = angle_w
        series.bound_work = bound_w
        series.bound_work_defined = bdef_w
        series.fisher_work_singular = sing_w
        series.overlap_angle_work = ov_w
        series.probs_work = probs_w
        series.outcomes_work = np.array([hb_sorted[a] for a, _b in slices_w])

        vals_p, basis_p, slices_p = _power_family(model, p0, scale)
        amps_p = basis_p.conj().T @ psi_panel
        hamps_p = basis_p.conj().T @ h_psi
        fi_p, angle_p, sing_p, probs_p, ov_p = _fisher_block(slices_p, amps_p, hamps_p, ts)
        bound_p, bdef_p = _bound_columns(angle_p, f_p, def_p, sing_p)
        series.fisher_power = fi_p
        series.angle_power = angle_p
        series.bound_power = bound_p
        series.bound_power_defined = bdef_p
        series.fisher_power_singular = sing_p
        series.overlap_angle_power = ov_p
        series.probs_power = probs_p
        series.outcomes_power = np.array([vals_p[a] for a, _b in slices_p])

    return series


def run_scenario(config: ScenarioConfig) -> list[StatisticsRecord]:
    """Evaluate a scenario and return its rows."""

    return evaluate_scenario(config).to_records()


def _format_cell(value: float, defined: bool = True) -> str:
    if not defined or value != value:  # nan means no meaningful value
        return UNDEF_TOKEN
    if value == math.inf:
        return UNDEF_TOKEN
    if value == -math.inf:
        return UNDEF_TOKEN
    return "%.17g" % value


def _flag(defined: bool) -> str:
    return "0" if defined else "1"


def record_row(rec: StatisticsRecord) -> str:
    """Serialize one record using the fixed column order of ``CSV_HEADER``."""

    cells = [
        _format_cell(rec.t),
        _format_cell(rec.mean_work),
        _format_cell(rec.var_work),
        _format_cell(rec.nsr_work, rec.nsr_work_defined),
        _flag(rec.nsr_work_defined),
        _format_cell(rec.mean_power),
        _format_cell(rec.var_power),
        _format_cell(rec.nsr_power, rec.nsr_power_defined),
        _flag(rec.nsr_power_defined),
        _format_cell(rec.fisher_work),
        _format_cell(rec.angle_work),
        _format_cell(rec.bound_work, rec.bound_work_defined),
        _format_cell(rec.fisher_power),
        _format_cell(rec.angle_power),
        _format_cell(rec.bound_power, rec.bound_power_defined),
        _format_cell(rec.tradeoff_lhs, rec.tradeoff_defined),
        _format_cell(rec.tradeoff_rhs, rec.tradeoff_defined),
        _flag(rec.tradeoff_defined),
        _format_cell(rec.fidelity),
    ]
    return ",".join(cells)


def write_csv(records: list[StatisticsRecord], path) -> None:
    """Write the table with a fixed header and deterministic formatting."""

    lines = [CSV_HEADER]
    lines.extend(record_row(rec) for rec in records)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines))
        fh.write("\n")


def manifest_lines(config: ScenarioConfig, version: str) -> list[str]:
    """Key = value dump of the resolved configuration."""

    model = config.model
    scheme = model.scheme
    lines = [
        f"version = {version}",
        f"dataset = {config.dataset}",
        f"n_qubits = {model.n_qubits}",
        "omega0 = %.17g" % model.omega0,
        f"scheme = {type(scheme).__name__}",
    ]
    for name in getattr(scheme, "__dataclass_fields__", {}):
        value = getattr(scheme, name)
        if isinstance(value, float):
            lines.append(f"{name} = %.17g" % value)
        elif isinstance(value, (int, str)):
            lines.append(f"{name} = {value}")
        else:
            lines.append(f"{name} = {value!r}")
    lines.extend(
        [
            f"normalize_total = {str(model.normalize_total).lower()}",
            "t_final = %.17g" % config.grid.t_final,
            f"steps = {config.grid.steps}",
            f"emit_bounds = {str(config.emit_bounds).lower()}",
            f"emit_tradeoff = {str(config.emit_tradeoff).lower()}",
            f"emit_fidelity = {str(config.emit_fidelity).lower()}",
            f"max_qubits = {config.max_qubits}",
        ]
    )
    return lines


def write_manifest(config: ScenarioConfig, path, version: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(manifest_lines(config, version)))
        fh.write("\n")
