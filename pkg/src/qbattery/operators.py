"""Dense Hermitian operators for spin-1/2 battery models.

Conventions used throughout the package:

* site 0 is the leftmost tensor factor, ``sigma_z |0> = +|0>``,
* the battery Hamiltonian is ``H_B = -(omega0/2) * sum_j sigma_z^(j)``,
  so the fully discharged state ``|0...0>`` is its ground state with
  energy ``-N*omega0/2``,
* charging Hamiltonians contain a transverse (sigma_x) drive minus the
  battery term, so the total Hamiltonian during the quench reduces to
  the drive alone,
* hbar = 1.

Everything is built as a dense matrix; the models of interest stay at or
below N = 14 qubits (16384 x 16384), which dense linear algebra handles
comfortably on one workstation core.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)

_AXIS_MATRICES = {"X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}

#: Default cap on the number of qubits (dense 2^N matrices beyond this
#: are not worth building on a desk machine).
MAX_QUBITS_DEFAULT = 14

HERMITICITY_TOL = 1e-10


class DimensionCapError(RuntimeError):
    """Requested Hilbert-space dimension exceeds the configured cap."""


class ConstructionError(ValueError):
    """An operator came out structurally wrong (e.g. non-Hermitian)."""


def require_hermitian(h: np.ndarray, tol: float = HERMITICITY_TOL, what: str = "operator") -> None:
    """Raise ConstructionError unless ``h`` equals its conjugate transpose.

    The comparison uses the max-entry norm with an absolute tolerance;
    all Hamiltonians here have O(1) entries so no scaling is needed.
    """
    dev = np.abs(h - h.conj().T).max()
    if dev > tol:
        raise ConstructionError(f"{what} is not Hermitian (max deviation {dev:.3e})")


def _check_dim_cap(n_qubits: int, max_qubits: int) -> None:
    if n_qubits > max_qubits:
        raise DimensionCapError(
            f"N={n_qubits} qubits exceeds the configured cap of {max_qubits} "
            f"(dense dimension 2^{n_qubits})"
        )


# ---------------------------------------------------------------------------
# Pauli strings
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PauliTerm:
    """A scalar multiple of a product of single-site Pauli operators.

    ``factors`` maps distinct sites to axes; identity on all other sites.
    """

    coefficient: float
    factors: tuple[tuple[int, str], ...]

    def __post_init__(self):
        if not np.isfinite(self.coefficient):
            raise ConstructionError("PauliTerm coefficient must be finite")
        sites = [site for site, _ in self.factors]
        if len(sites) != len(set(sites)):
            raise ConstructionError("PauliTerm factors must act on distinct sites")
        for site, axis in self.factors:
            if site < 0:
                raise ConstructionError(f"negative site index {site}")
            if axis not in _AXIS_MATRICES:
                raise ConstructionError(f"unknown Pauli axis {axis!r}")

    def matrix(self, n_qubits: int) -> np.ndarray:
        for site, _ in self.factors:
            if site >= n_qubits:
                raise ConstructionError(
                    f"site {site} out of range for {n_qubits} qubits"
                )
        return self.coefficient * pauli_string(
            n_qubits, {site: axis for site, axis in self.factors}
        )


def pauli_string(n_qubits: int, axes: dict[int, str]) -> np.ndarray:
    """Tensor product with the given Pauli on selected sites, identity elsewhere."""
    out = np.array([[1.0 + 0.0j]])
    for site in range(n_qubits):
        axis = axes.get(site)
        if axis is None:
            factor = IDENTITY_2
        elif axis in _AXIS_MATRICES:
            factor = _AXIS_MATRICES[axis]
        else:
            raise ConstructionError(f"unknown Pauli axis {axis!r} at site {site}")
        out = np.kron(out, factor)
    return out


# ---------------------------------------------------------------------------
# Model description
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SingleQubit:
    """One spin driven by a transverse field of amplitude Omega0."""

    Omega0: float


@dataclass(frozen=True)
class KBody:
    """N/k disjoint blocks of k sites, each driven by a k-fold sigma_x product.

    The block coupling is Omega_k = (k/N) * Omega0, which pins the spectral
    norm of the total (drive-only) Hamiltonian to Omega0 for every k.
    """

    k: int
    Omega0: float


@dataclass(frozen=True)
class IsingS:
    """Transverse-field chain with s-site sigma_x interaction strings.

    Open chain: N - s + 1 strings of s consecutive sites each, all with
    coupling -Omega_s.
    """

    s: int
    Omega_s: float


@dataclass(frozen=True)
class Custom:
    """Charging Hamiltonian given explicitly as a sum of Pauli terms."""

    terms: tuple[PauliTerm, ...]


Scheme = Union[SingleQubit, KBody, IsingS, Custom]


@dataclass(frozen=True)
class BatteryModel:
    """Full scenario description: size, splitting, charging scheme, normalization."""

    n_qubits: int
    omega0: float
    scheme: Scheme
    normalize_total: bool = False

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be >= 1")
        if not self.omega0 > 0:
            raise ValueError("omega0 must be positive")
        s = self.scheme
        if isinstance(s, SingleQubit):
            if self.n_qubits != 1:
                raise ValueError("SingleQubit scheme requires n_qubits = 1")
        elif isinstance(s, KBody):
            if not (1 <= s.k <= self.n_qubits):
                raise ValueError("KBody requires 1 <= k <= N")
            if self.n_qubits % s.k != 0:
                raise ValueError(f"KBody requires k | N, got N={self.n_qubits}, k={s.k}")
        elif isinstance(s, IsingS):
            if not (2 <= s.s <= self.n_qubits):
                raise ValueError("IsingS requires 2 <= s <= N")
        elif isinstance(s, Custom):
            if not s.terms:
                raise ValueError("Custom scheme needs at least one term")
        else:
            raise ValueError(f"unknown scheme {s!r}")


# ---------------------------------------------------------------------------
# Hamiltonians
# ---------------------------------------------------------------------------

def battery_diagonal(n_qubits: int, omega0: float) -> np.ndarray:
    """Diagonal of H_B = -(omega0/2) sum_j sigma_z^(j), as a real vector."""
    z = np.array([1.0, -1.0])
    diag = np.zeros(2 ** n_qubits)
    for j in range(n_qubits):
        left = np.ones(2 ** j)
        right = np.ones(2 ** (n_qubits - 1 - j))
        diag += np.kron(np.kron(left, z), right)
    return -(omega0 / 2.0) * diag


def build_battery_hamiltonian(
    n_qubits: int, omega0: float, max_qubits: int = MAX_QUBITS_DEFAULT
) -> np.ndarray:
    """Dense battery Hamiltonian (diagonal in the computational basis)."""
    if n_qubits < 1:
        raise ValueError("n_qubits must be >= 1")
    if not omega0 > 0:
        raise ValueError("omega0 must be positive")
    _check_dim_cap(n_qubits, max_qubits)
    return np.diag(battery_diagonal(n_qubits, omega0)).astype(complex)


def kbody_block_strings(model: BatteryModel) -> list[np.ndarray]:
    """The commuting per-block sigma_x products X_j of the k-body drive."""
    if not isinstance(model.scheme, KBody):
        raise ValueError("block strings are defined for KBody schemes only")
    n, k = model.n_qubits, model.scheme.k
    return [
        pauli_string(n, {site: "X" for site in range(j * k, (j + 1) * k)})
        for j in range(n // k)
    ]


def charging_drive(model: BatteryModel, max_qubits: int = MAX_QUBITS_DEFAULT) -> np.ndarray:
    """The drive part of the charging Hamiltonian, i.e. H_C + H_B.

    For every built-in scheme this is the pure sigma_x interaction term;
    it is also the total Hamiltonian during the quench, since the schemes
    subtract the battery term from the charging Hamiltonian.  Returned as
    a real float64 matrix for the built-in schemes (their drives have no
    imaginary entries), complex for Custom terms containing sigma_y.
    """
    n = model.n_qubits
    _check_dim_cap(n, max_qubits)
    s = model.scheme
    if isinstance(s, SingleQubit):
        return s.Omega0 * PAULI_X.real.copy()
    if isinstance(s, KBody):
        coupling = (s.k / n) * s.Omega0
        drive = np.zeros((2 ** n, 2 ** n))
        for j in range(n // s.k):
            sites = range(j * s.k, (j + 1) * s.k)
            drive += pauli_string(n, {site: "X" for site in sites}).real
        return coupling * drive
    if isinstance(s, IsingS):
        drive = np.zeros((2 ** n, 2 ** n))
        for i in range(n - s.s + 1):
            sites = range(i, i + s.s)
            drive += pauli_string(n, {site: "X" for site in sites}).real
        return -s.Omega_s * drive
    if isinstance(s, Custom):
        total = np.zeros((2 ** n, 2 ** n), dtype=complex)
        for term in s.terms:
            total += term.matrix(n)
        # Custom terms *are* H_C; report the drive as H_C + H_B.
        total += np.diag(battery_diagonal(n, model.omega0)).astype(complex)
        return total
    raise ValueError(f"unknown scheme {s!r}")


def build_charging_hamiltonian(
    model: BatteryModel, max_qubits: int = MAX_QUBITS_DEFAULT
) -> np.ndarray:
    """Dense charging Hamiltonian H_C for the given model.

    Built-in schemes return (drive - H_B); Custom schemes return the
    explicit term sum unchanged.
    """
    n = model.n_qubits
    _check_dim_cap(n, max_qubits)
    if isinstance(model.scheme, Custom):
        total = np.zeros((2 ** n, 2 ** n), dtype=complex)
        for term in model.scheme.terms:
            total += term.matrix(n)
        require_hermitian(total, what="Custom charging Hamiltonian")
        return total
    hc = charging_drive(model, max_qubits=max_qubits).astype(complex)
    hb = battery_diagonal(n, model.omega0)
    hc[np.diag_indices_from(hc)] -= hb
    return hc


@dataclass(frozen=True)
class NormalizedTotal:
    """Total Hamiltonian together with its spectral extremes.

    ``scale`` is 1 for raw models and e_max - e_min for normalized ones;
    the power counting observable divides by the same scale so that the
    mean power stays the time derivative of the mean work under the
    (possibly normalized) evolution.
    """

    h_norm: np.ndarray
    e_min: float
    e_max: float
    scale: float


@dataclass(frozen=True)
class SpectralDecomposition:
    """Ascending eigenvalues and orthonormal eigenvectors of a Hermitian matrix."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]


def spectral_decompose(h: np.ndarray) -> SpectralDecomposition:
    """Eigendecomposition with a fast path for real symmetric input.

    Drives of the built-in schemes are real symmetric; running LAPACK's
    real solver there is several times faster than the complex one.
    Eigenvectors are returned as complex128 regardless, because every
    consumer immediately multiplies them into complex phase panels and
    numpy's matmul on real/complex mixtures falls off the BLAS path.
    """
    h = np.asarray(h)
    try:
        if np.iscomplexobj(h):
            if np.abs(h.imag).max() == 0.0:
                vals, vecs = np.linalg.eigh(h.real)
            else:
                vals, vecs = np.linalg.eigh(h)
        else:
            vals, vecs = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        fingerprint = f"dim={h.shape[0]}, max|h|={np.abs(h).max():.6e}"
        raise RuntimeError(f"eigensolver failed to converge ({fingerprint})") from exc
    return SpectralDecomposition(vals, np.ascontiguousarray(vecs, dtype=complex))


def total_hamiltonian(
    model: BatteryModel, max_qubits: int = MAX_QUBITS_DEFAULT
) -> NormalizedTotal:
    """H_T = H_B + H_C, optionally shifted and scaled to unit spectral range."""
    total, _ = total_with_spectrum(model, max_qubits=max_qubits)
    return total


def total_with_spectrum(
    model: BatteryModel, max_qubits: int = MAX_QUBITS_DEFAULT
) -> tuple[NormalizedTotal, SpectralDecomposition]:
    """Like total_hamiltonian, but also returns the matching eigendecomposition.

    One LAPACK call serves both the normalization constants and the
    propagator, which matters at N = 12 where a 4096-dimensional eigh
    costs ~10 s.
    """
    n = model.n_qubits
    _check_dim_cap(n, max_qubits)
    if isinstance(model.scheme, Custom):
        h_total = build_charging_hamiltonian(model, max_qubits=max_qubits)
        h_total[np.diag_indices_from(h_total)] += battery_diagonal(n, model.omega0)
    else:
        # The built-in schemes define H_C = drive - H_B, so the battery
        # term cancels exactly and H_T is the bare drive.
        h_total = charging_drive(model, max_qubits=max_qubits)
    spec = spectral_decompose(h_total)
    e_min = float(spec.eigenvalues[0])
    e_max = float(spec.eigenvalues[-1])
    if not model.normalize_total:
        total = NormalizedTotal(np.asarray(h_total, dtype=complex), e_min, e_max, 1.0)
        return total, spec
    scale = e_max - e_min
    if scale < 1e-12:
        raise ConstructionError(
            f"cannot normalize: spectral range {scale:.3e} is degenerate"
        )
    h_norm = (np.asarray(h_total, dtype=complex) - e_min * np.eye(2 ** n)) / scale
    spec_norm = SpectralDecomposition((spec.eigenvalues - e_min) / scale, spec.eigenvectors)
    return NormalizedTotal(h_norm, e_min, e_max, scale), spec_norm


def power_counting_observable(
    h_battery: np.ndarray, h_charge: np.ndarray, scale: float = 1.0
) -> np.ndarray:
    """Counting observable of power: P_0 = -i [H_B, H_C] / scale.

    ``scale`` is 1 for raw models and the spectral range e_max - e_min
    for normalized ones, matching the commutator generated by the
    normalized total Hamiltonian's charging part.
    """
    if h_battery.shape != h_charge.shape:
        raise ValueError("operand dimensions differ")
    if not scale > 0:
        raise ValueError("scale must be positive")
    comm = h_battery @ h_charge - h_charge @ h_battery
    p0 = (-1j / scale) * comm
    require_hermitian(p0, what="power counting observable")
    return p0


def power_from_battery_diagonal(
    hb_diag: np.ndarray, h_charge: np.ndarray, scale: float = 1.0
) -> np.ndarray:
    """Same commutator as power_counting_observable for diagonal H_B.

    [diag(b), M]_{ij} = (b_i - b_j) M_{ij}, so the commutator is an
    elementwise product instead of two dense matmuls.  The battery
    Hamiltonian is diagonal in every model here, and the diagonal part of
    h_charge drops out of the gap factor, so passing the bare drive gives
    the identical observable.
    """
    if not scale > 0:
        raise ValueError("scale must be positive")
    gaps = hb_diag[:, None] - hb_diag[None, :]
    return (-1j / scale) * (gaps * h_charge)
