"""Counting-statistics moments of work and power over a quench.

The counted quantity between time 0 and t is the two-point difference
O_t - O_0 in the Heisenberg picture.  On a pure initial state the first
two moments are quadratic forms,

    mean = <psi0| (O_t - O_0) |psi0>
    var  = || (O_t - O_0) psi0 ||^2 - mean^2,

and the second form is exactly the expression used here: computing the
variance as a norm of the difference operator applied to the state keeps
it nonnegative by construction instead of subtracting two large traces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .operators import SpectralDecomposition

#: Variances within this much below zero are eigensolver round-off and
#: get clamped; anything more negative signals a real bug.
VARIANCE_CLAMP = 1e-9

#: |mean| below MEAN_ZERO_FACTOR * sqrt(variance + 1) counts as zero and
#: makes the noise-to-signal ratio undefined (flagged, never a crash).
MEAN_ZERO_FACTOR = 1e-12

#: Relative variance below which the initial state counts as an
#: eigenstate of the observable, forcing the correlation term to zero.
EIGENSTATE_TOL = 1e-12


class StatisticsError(RuntimeError):
    pass


@dataclass(frozen=True)
class MomentPair:
    mean: float
    variance: float


def _clamped_variance(raw: float) -> float:
    if raw < -VARIANCE_CLAMP:
        raise StatisticsError(f"variance {raw:.3e} below the round-off clamp")
    return max(raw, 0.0)


def _real_expectation(value: complex, what: str) -> float:
    if abs(value.imag) > 1e-10:
        raise StatisticsError(
            f"{what} has imaginary residue {value.imag:.3e}; upstream operator not Hermitian"
        )
    return float(value.real)


def fcs_mean(o0: np.ndarray, o_t: np.ndarray, psi0: np.ndarray) -> float:
    """First counting moment <psi0|(O_t - O_0)|psi0>."""
    val = np.vdot(psi0, (o_t - o0) @ psi0)
    return _real_expectation(val, "mean")


def fcs_variance(o0: np.ndarray, o_t: np.ndarray, psi0: np.ndarray) -> float:
    """Second centered counting moment, clamped against round-off."""
    return fcs_moments(o0, o_t, psi0).variance


def fcs_moments(o0: np.ndarray, o_t: np.ndarray, psi0: np.ndarray) -> MomentPair:
    y = (o_t - o0) @ psi0
    mean = _real_expectation(np.vdot(psi0, y), "mean")
    second = float(np.vdot(y, y).real)
    return MomentPair(mean, _clamped_variance(second - mean * mean))


def nsr_defined(moments: MomentPair) -> bool:
    return abs(moments.mean) >= MEAN_ZERO_FACTOR * math.sqrt(moments.variance + 1.0)


def nsr(moments: MomentPair) -> float:
    """Noise-to-signal ratio variance/mean^2; math.inf flags a zero mean.

    The infinities are genuine: the underlying cot/tan expressions diverge
    at the start and at the charging turning points, and keeping them as
    flagged values keeps whole series plottable.
    """
    if not nsr_defined(moments):
        return math.inf
    return moments.variance / (moments.mean * moments.mean)


def correlation_f(o0: np.ndarray, o_t: np.ndarray, psi0: np.ndarray) -> float:
    """Two-time correlation term entering the reliability lower bound.

    f = 2 * (cov + pair) / <O_t - O_0>^2 with cov = Re<O_t O_0> - <O_t><O_0>.
    The pair term carries the sign of the covariance (so f = 4 cov / mean^2):
    replacing it by the product of standard deviations clips the numerator
    to zero as soon as the covariance turns negative (for a single spin the
    two agree up to the quarter period and then Cauchy-Schwarz becomes an
    equality), which would break the exact saturation of the bound over the
    second half of the charging window.  When the initial state is an
    eigenstate of either endpoint observable the term vanishes identically,
    and that case is short-circuited: the covariance is then pure round-off
    but gets divided by mean^2, which is tiny near t = 0.

    Returns math.nan when the counting mean is zero (flagged undefined).
    """
    phi0 = o0 @ psi0
    phit = o_t @ psi0
    m0 = _real_expectation(np.vdot(psi0, phi0), "<O_0>")
    mt = _real_expectation(np.vdot(psi0, phit), "<O_t>")
    var0 = float(np.vdot(phi0, phi0).real) - m0 * m0
    vart = float(np.vdot(phit, phit).real) - mt * mt
    mean = mt - m0
    if abs(mean) < MEAN_ZERO_FACTOR * math.sqrt(max(var0 + vart, 0.0) + 1.0):
        return math.nan
    scale0 = max(1.0, float(np.vdot(phi0, phi0).real))
    scalet = max(1.0, float(np.vdot(phit, phit).real))
    if var0 <= EIGENSTATE_TOL * scale0 or vart <= EIGENSTATE_TOL * scalet:
        return 0.0
    cov = float(np.vdot(phit, phi0).real) - mt * m0
    return 4.0 * cov / (mean * mean)


@dataclass(frozen=True)
class TradeoffTerms:
    """Both sides of the work-power trade-off at one time point.

    lhs is the product of the two noise-to-signal ratios; rhs collects the
    commutator and anticommutator expectations of the mean-normalized
    counting operators.  ``defined`` is False at points where either mean
    vanishes (start of charging and turning points).
    """

    commutator_term: float
    anticommutator_term: float
    rhs: float
    lhs: float
    defined: bool = True


TRADEOFF_UNDEFINED = TradeoffTerms(math.nan, math.nan, math.nan, math.nan, defined=False)


def tradeoff_terms(
    p_heis: np.ndarray,
    w_heis: np.ndarray,
    p0: np.ndarray,
    w0: np.ndarray,
    psi0: np.ndarray,
) -> TradeoffTerms:
    yp = (p_heis - p0) @ psi0
    yw = (w_heis - w0) @ psi0
    mp = _real_expectation(np.vdot(psi0, yp), "power mean")
    mw = _real_expectation(np.vdot(psi0, yw), "work mean")
    varp = _clamped_variance(float(np.vdot(yp, yp).real) - mp * mp)
    varw = _clamped_variance(float(np.vdot(yw, yw).real) - mw * mw)
    if not (nsr_defined(MomentPair(mp, varp)) and nsr_defined(MomentPair(mw, varw))):
        return TRADEOFF_UNDEFINED
    cross = np.vdot(yp, yw)  # <psi0| P_diff W_diff |psi0>
    denom = mp * mw
    comm = abs(2.0 * cross.imag / denom) ** 2
    anti = abs(2.0 * cross.real / denom - 2.0) ** 2
    lhs = (varp / mp ** 2) * (varw / mw ** 2)
    return TradeoffTerms(comm, anti, (comm + anti) / 4.0, lhs)


def generating_function(
    o0: np.ndarray,
    spec: SpectralDecomposition,
    psi0: np.ndarray,
    chi: float,
    t: float,
) -> complex:
    """ln of the symmetrized counting trace

        Z(chi, t) = ln <psi0| e^{-i chi O_0 / 2} e^{i chi O_t} e^{-i chi O_0 / 2} |psi0>.

    Serves as the independent oracle for the moment formulas: at chi = 0
    the first derivative is i*mean and the second is -variance.  Note that
    both half-factors multiply from the same side as written; neither is
    the adjoint of the other.
    """
    lo, vo = np.linalg.eigh(o0)
    phases_t = np.exp(-1j * spec.eigenvalues * t)

    def apply_half(vec):
        return vo @ (np.exp(-0.5j * chi * lo) * (vo.conj().T @ vec))

    def apply_full(vec):
        return vo @ (np.exp(1j * chi * lo) * (vo.conj().T @ vec))

    def apply_u(vec, phases):
        return spec.eigenvectors @ (phases * (spec.eigenvectors.conj().T @ vec))

    a = apply_half(psi0)
    b = apply_u(a, phases_t)
    c = apply_full(b)
    d = apply_u(c, phases_t.conj())
    e = apply_half(d)
    val = np.vdot(psi0, e)
    if abs(val) < 1e-300:
        raise StatisticsError("generating-function trace vanished; chi too large")
    return complex(np.log(val))


def finite_difference_moments(
    o0: np.ndarray,
    spec: SpectralDecomposition,
    psi0: np.ndarray,
    t: float,
    step: float | None = None,
) -> tuple[float, float]:
    """Mean and variance from 4th-order chi-stencils on the generating function.

    With the step scaled to the observable's size, truncation sits near
    1e-9 and round-off near 1e-11, both far inside the 1e-6 / 1e-5
    tolerances this oracle is held to.
    """
    if step is None:
        norm = float(np.abs(np.linalg.eigvalsh(o0)).max())
        step = 3e-3 / max(1.0, norm)
    z = {
        k: generating_function(o0, spec, psi0, k * step, t)
        for k in (-2, -1, 1, 2)
    }
    d1 = (-z[2] + 8 * z[1] - 8 * z[-1] + z[-2]) / (12 * step)
    # 5-point second derivative; the -30*Z(0) center term is identically 0.
    d2 = (-z[2] + 16 * z[1] + 16 * z[-1] - z[-2]) / (12 * step * step)
    mean_fd = float(d1.imag)
    var_fd = float(-d2.real)
    return mean_fd, var_fd
