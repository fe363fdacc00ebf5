"""Exact unitary evolution, eigenbasis measurement statistics, fidelity.

Everything runs off one shared spectral decomposition of the (static)
total Hamiltonian: the models are quenches, so a single diagonalization
amortizes over every grid point.  No Trotterization anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import SpectralDecomposition

#: Relative tolerance (w.r.t. the spectral range) below which two
#: eigenvalues are treated as the same measurement outcome.  The battery
#: Hamiltonian is massively degenerate, and Fisher information is defined
#: over distinct-outcome projectors, so grouping is load-bearing.
DEGENERACY_TOL = 1e-9


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid with ``steps`` intervals, t_0 = 0 ... t_steps = t_final.

    ``steps`` counts intervals, so the grid has steps + 1 points and divides
    t_final exactly: a 500-step grid to pi/2 puts a sample right on pi/4.
    """

    t_final: float
    steps: int

    def __post_init__(self):
        if not self.t_final > 0:
            raise ValueError("t_final must be positive")
        if self.steps < 2:
            raise ValueError("steps must be >= 2")

    @property
    def points(self) -> np.ndarray:
        return np.linspace(0.0, self.t_final, self.steps + 1)

    @property
    def dt(self) -> float:
        return self.t_final / self.steps


def evolve_state(spec: SpectralDecomposition, psi0: np.ndarray, t: float) -> np.ndarray:
    """psi_t = V exp(-i Lambda t) V^dag psi0."""
    if psi0.shape[0] != spec.dim:
        raise ValueError("state dimension does not match the decomposition")
    if t < 0:
        raise ValueError("t must be nonnegative")
    w = spec.eigenvectors.conj().T @ psi0
    psi_t = spec.eigenvectors @ (np.exp(-1j * spec.eigenvalues * t) * w)
    norm = np.linalg.norm(psi_t)
    if abs(norm - 1.0) > 1e-10:
        raise RuntimeError(f"evolution lost normalization (norm {norm:.12f})")
    return psi_t


def heisenberg_observable(spec: SpectralDecomposition, o0: np.ndarray, t: float) -> np.ndarray:
    """O_t = U_t^dag O_0 U_t with U_t = exp(-i H t)."""
    if o0.shape[0] != spec.dim:
        raise ValueError("operator dimension does not match the decomposition")
    v = spec.eigenvectors
    phases = np.exp(-1j * spec.eigenvalues * t)
    u = v @ (phases[:, None] * v.conj().T)
    return u.conj().T @ o0 @ u


@dataclass(frozen=True)
class ProjectorFamily:
    """Distinct-eigenvalue projectors of a Hermitian observable.

    Stored as the eigenbasis plus index ranges instead of dense
    projectors: one projector per distinct value of a 12-qubit battery
    Hamiltonian would otherwise cost 13 x 4096^2 complex entries.
    ``projectors()`` materializes the dense matrices on demand.
    """

    distinct_values: np.ndarray
    basis: np.ndarray
    slices: tuple[tuple[int, int], ...]

    @property
    def n_outcomes(self) -> int:
        return len(self.slices)

    def projectors(self) -> list[np.ndarray]:
        out = []
        for start, stop in self.slices:
            block = self.basis[:, start:stop]
            out.append(block @ block.conj().T)
        return out


def eigenbasis_projectors(
    observable: np.ndarray, grouping_tol: float = DEGENERACY_TOL
) -> ProjectorFamily:
    """Group the observable's eigenvalues into distinct measurement outcomes."""
    vals, vecs = np.linalg.eigh(observable)
    return family_from_eigensystem(vals, vecs, grouping_tol=grouping_tol)


def group_sorted_values(
    vals: np.ndarray, grouping_tol: float = DEGENERACY_TOL
) -> tuple[tuple[int, int], ...]:
    """Index ranges of near-equal runs in an ascending value vector."""
    spread = float(vals[-1] - vals[0])
    gap = grouping_tol * (spread if spread > 0 else 1.0)
    slices = []
    start = 0
    for i in range(1, len(vals) + 1):
        if i == len(vals) or vals[i] - vals[i - 1] > gap:
            slices.append((start, i))
            start = i
    return tuple(slices)


def family_from_eigensystem(
    vals: np.ndarray, vecs: np.ndarray, grouping_tol: float = DEGENERACY_TOL
) -> ProjectorFamily:
    """Build a ProjectorFamily from an already-sorted eigensystem."""
    slices = group_sorted_values(vals, grouping_tol)
    distinct = np.array([vals[a:b].mean() for a, b in slices])
    return ProjectorFamily(distinct, np.ascontiguousarray(vecs, dtype=complex), slices)


def projective_probabilities(family: ProjectorFamily, psi: np.ndarray) -> np.ndarray:
    """p_i = <psi| Pi_i |psi> for each distinct outcome."""
    if psi.shape[0] != family.basis.shape[0]:
        raise ValueError("state dimension does not match the projector family")
    amps = family.basis.conj().T @ psi
    weights = np.abs(amps) ** 2
    return np.array([weights[a:b].sum() for a, b in family.slices])


def probabilities_panel(family: ProjectorFamily, states: np.ndarray) -> np.ndarray:
    """Column-wise projective_probabilities for a (dim, n_times) panel of states."""
    amps = family.basis.conj().T @ states
    weights = np.abs(amps) ** 2
    return np.stack([weights[a:b].sum(axis=0) for a, b in family.slices])


def fidelity(psi0: np.ndarray, psi_t: np.ndarray) -> float:
    """Squared overlap |<psi0|psi_t>|^2 between two normalized states."""
    if psi0.shape != psi_t.shape:
        raise ValueError("state dimensions differ")
    return float(np.abs(np.vdot(psi0, psi_t)) ** 2)
