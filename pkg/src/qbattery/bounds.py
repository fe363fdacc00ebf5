"""Fisher information, Bhattacharyya angle, and reliability lower bounds.

The chain implemented here: the classical Fisher information of the
measurement distribution in a counting observable's eigenbasis,

    I_t = sum_i (dp_i/dt)^2 / p_i      (distinct-outcome projectors Pi_i),

its cumulative Bhattacharyya angle  integral_0^t sqrt(I/4) dt',  and the
noise-to-signal lower bound  NSR >= cot^2(angle) - f  with the two-time
correlation term f from the statistics module.  The angle also dominates
the arccos of the overlap sum_i sqrt(p_i(t) p_i(0)), which is checked
pointwise, and the underlying Hellinger-distance inequality is exposed
for randomized verification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .dynamics import ProjectorFamily, TimeGrid
from .operators import SpectralDecomposition

#: Probabilities below this are treated as vanishing outcomes.
PROB_FLOOR = 1e-12

#: A vanishing outcome whose probability derivative still exceeds this is
#: genuinely singular (p shrinking slower than quadratically) and the
#: grid point gets flagged instead of silently contributing.
DERIV_FLOOR = 1e-9


@dataclass(frozen=True)
class FisherPoint:
    value: float
    singular: bool


@dataclass(frozen=True)
class FisherSeries:
    grid: TimeGrid
    values: np.ndarray
    cumulative_angle: np.ndarray
    singular: np.ndarray


@dataclass(frozen=True)
class BoundSeries:
    """Noise-to-signal ratio against its lower bound on a shared grid.

    ``bound`` is the literal cot^2(angle) - f at every point, including
    past the quarter-turn of the cumulative angle where the derivation
    behind the inequality no longer applies; validity checks restrict to
    angle <= pi/2 while the reported values stay untouched.
    """

    grid: TimeGrid
    nsr: np.ndarray
    bound: np.ndarray
    slack: np.ndarray
    nsr_defined: np.ndarray
    bound_defined: np.ndarray


def fisher_from_amplitudes(
    slices: tuple[tuple[int, int], ...],
    amps: np.ndarray,
    hamps: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Fisher information from eigenbasis amplitude panels.

    ``amps`` and ``hamps`` are (dim, n_times) amplitudes of psi_t and of
    H psi_t in the observable's eigenbasis.  Probabilities and their exact
    time derivatives per distinct outcome are

        p_i = sum |a|^2,    dp_i/dt = 2 sum Im(conj(a) * b),

    no finite differences anywhere (the division by p_i would amplify
    derivative noise).  Vanishing outcomes contribute the continuous
    extension 4 * ||Pi_i H psi_t||^2, which is the exact limit of
    (dp_i/dt)^2 / p_i at a double zero of p_i (there p'' = 2||Pi H psi||^2);
    dropping those terms instead would put removable discontinuities into
    the series, e.g. at t = 0 where the start state is an exact eigenstate.

    Returns (values, singular, probabilities); the probability panel has one
    row per distinct outcome and one column per time point.
    """
    if amps.ndim == 1:
        amps = amps[:, None]
        hamps = hamps[:, None]
    weights = np.abs(amps) ** 2
    cross = 2.0 * (np.conj(amps) * hamps).imag
    hweights = np.abs(hamps) ** 2
    p = np.stack([weights[a:b].sum(axis=0) for a, b in slices])
    dp = np.stack([cross[a:b].sum(axis=0) for a, b in slices])
    hw = np.stack([hweights[a:b].sum(axis=0) for a, b in slices])
    tiny = p < PROB_FLOOR
    small_dp = np.abs(dp) < DERIV_FLOOR
    safe_p = np.where(tiny, 1.0, p)
    contrib = np.where(tiny, np.where(small_dp, 4.0 * hw, 0.0), dp * dp / safe_p)
    values = contrib.sum(axis=0)
    singular = (tiny & ~small_dp).any(axis=0)
    return values, singular, p


def fisher_information(
    family: ProjectorFamily,
    spec_total: SpectralDecomposition,
    psi_t: np.ndarray,
    h_total: np.ndarray | None = None,
) -> FisherPoint:
    """Fisher information of the eigenbasis distribution at one state.

    The evolution generator enters through ``spec_total``; ``h_total`` is
    accepted for interface symmetry but the spectral form is what's used.
    """
    if psi_t.shape[0] != spec_total.dim:
        raise ValueError("state dimension does not match the decomposition")
    v = spec_total.eigenvectors
    hpsi = v @ (spec_total.eigenvalues * (v.conj().T @ psi_t))
    amps = family.basis.conj().T @ psi_t
    hamps = family.basis.conj().T @ hpsi
    values, singular, _ = fisher_from_amplitudes(family.slices, amps, hamps)
    return FisherPoint(float(values[0]), bool(singular[0]))


def bhattacharyya_angle(values: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Cumulative trapezoidal integral of sqrt(I/4) along the grid."""
    integrand = np.sqrt(np.maximum(values, 0.0) / 4.0)
    return cumulative_trapezoid(integrand, points, initial=0.0)


def fisher_series(
    family: ProjectorFamily,
    spec_total: SpectralDecomposition,
    psi0: np.ndarray,
    grid: TimeGrid,
) -> FisherSeries:
    """Fisher information and cumulative angle over a whole time grid."""
    ts = grid.points
    v = spec_total.eigenvectors
    w = v.conj().T @ psi0
    phases = np.exp(-1j * np.outer(spec_total.eigenvalues, ts))
    states = v @ (phases * w[:, None])
    hstates = v @ (spec_total.eigenvalues[:, None] * (phases * w[:, None]))
    amps = family.basis.conj().T @ states
    hamps = family.basis.conj().T @ hstates
    values, singular, _ = fisher_from_amplitudes(family.slices, amps, hamps)
    angle = bhattacharyya_angle(values, ts)
    return FisherSeries(grid, values, angle, singular)


def nsr_lower_bound(angle: float, f: float) -> float:
    """Right-hand side cot^2(angle) - f of the reliability bound.

    angle = 0 means no information has accumulated and the bound is a
    flagged infinity (consistent with the undefined NSR at t = 0).
    Negative values (large f) are reported as-is: a vacuous bound is
    information, clipping would hide it.
    """
    if math.isnan(f):
        return math.nan
    if angle <= 0.0:
        return math.inf
    s = math.sin(angle)
    if s == 0.0:
        return math.inf
    c = math.cos(angle)
    return (c / s) ** 2 - f


def overlap_angle(p_t: np.ndarray, p_0: np.ndarray):
    """arccos of the Bhattacharyya overlap between outcome distributions.

    Accepts either two single distributions or an (n_outcomes, n_times)
    panel against a broadcastable reference column.
    """
    if p_t.ndim == 2:
        overlap = np.sqrt(p_t * p_0).sum(axis=0)
        return np.arccos(np.clip(overlap, -1.0, 1.0))
    overlap = float(np.sqrt(p_t * p_0).sum())
    return math.acos(min(1.0, max(-1.0, overlap)))


def hellinger_check(
    p: np.ndarray,
    q: np.ndarray,
    mu_p: float,
    mu_q: float,
    sigma_p: float,
    sigma_q: float,
) -> tuple[float, float, bool]:
    """Squared Hellinger distance against its mean-separation lower bound.

    lhs = 1 - sum_i sqrt(p_i q_i)
    rhs = 1 - [((mu_p - mu_q)/(sigma_p + sigma_q))^2 + 1]^(-1/2)
    holds = lhs >= rhs - 1e-9
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError("distributions have different sizes")
    for name, dist in (("p", p), ("q", q)):
        if dist.min() < -1e-12 or abs(dist.sum() - 1.0) > 1e-9:
            raise ValueError(f"{name} is not a probability vector")
    if not sigma_p + sigma_q > 0:
        raise ValueError("sigma_p + sigma_q must be positive")
    lhs = 1.0 - float(np.sqrt(np.maximum(p, 0.0) * np.maximum(q, 0.0)).sum())
    ratio = (mu_p - mu_q) / (sigma_p + sigma_q)
    rhs = 1.0 - 1.0 / math.sqrt(ratio * ratio + 1.0)
    return lhs, rhs, lhs >= rhs - 1e-9
