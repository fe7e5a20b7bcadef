"""Dense states and operators on small qubit registers.

Basis convention: bit ``i`` of a computational-basis index is qubit ``i``,
with ``|0>`` <-> bit value 0. So index 0 is ``|0...0>`` and index
``2**N - 1`` is ``|1...1>``. Every operator used in this package is built on
top of that convention.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import SizeError, StateError, SymmetryError, UnsupportedGeneratorError

MAX_QUBITS = 12

TRACE_TOL = 1e-10
HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10
NORM_TOL = 1e-12

# eigvalsh on 4096x4096 is too slow to run on every construction
_PSD_CHECK_MAX_DIM = 1024


def check_nqubits(nqubits, max_qubits=MAX_QUBITS):
    if isinstance(nqubits, bool) or int(nqubits) != nqubits:
        raise SizeError(f"nqubits must be an integer, got {nqubits!r}")
    nqubits = int(nqubits)
    if not 1 <= nqubits <= max_qubits:
        raise SizeError(f"nqubits must lie in [1, {max_qubits}], got {nqubits}")
    return nqubits


def _nqubits_from_dim(dim):
    n = int(dim).bit_length() - 1
    if dim < 2 or 2**n != dim:
        raise StateError(f"dimension {dim} is not a power of two >= 2")
    return check_nqubits(n)


def hermiticity_error(matrix):
    """Largest |M_ij - conj(M_ji)| relative to max|M| (0 for the zero matrix)."""
    scale = np.max(np.abs(matrix)) if matrix.size else 0.0
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(matrix - matrix.conj().T)) / scale)


def is_hermitian(matrix, tol=HERMITIAN_TOL):
    return hermiticity_error(matrix) <= tol


def require_hermitian(matrix, tol=HERMITIAN_TOL, what="matrix"):
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise SymmetryError(f"{what} must be square, got shape {matrix.shape}")
    err = hermiticity_error(matrix)
    if err > tol:
        raise SymmetryError(f"{what} is not Hermitian (relative asymmetry {err:.3g})")
    return matrix


@dataclass(frozen=True)
class PureState:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.ndim != 1:
            raise StateError("amplitudes must be a vector")
        _nqubits_from_dim(amps.size)
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise StateError(f"state is not normalized (|psi|^2 = {norm2!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def nqubits(self):
        return self.amplitudes.size.bit_length() - 1

    @property
    def dim(self):
        return self.amplitudes.size

    def density_matrix(self):
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class DensityMatrix:
    """Unit-trace Hermitian positive-semidefinite matrix on ``nqubits`` qubits.

    Validation runs on construction. Positivity is checked with a full
    eigenvalue solve only up to dimension 1024.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise StateError(f"density matrix must be square, got shape {m.shape}")
        _nqubits_from_dim(m.shape[0])
        tr = np.trace(m)
        if abs(tr - 1.0) > TRACE_TOL:
            raise StateError(f"trace {tr!r} differs from 1")
        if hermiticity_error(m) > HERMITIAN_TOL:
            raise StateError("density matrix is not Hermitian")
        if m.shape[0] <= _PSD_CHECK_MAX_DIM:
            lo = float(np.linalg.eigvalsh(m)[0])
            if lo < -PSD_TOL:
                raise StateError(f"density matrix has negative eigenvalue {lo:.3g}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def nqubits(self):
        return self.dim.bit_length() - 1

    def trace(self):
        return complex(np.trace(self.matrix))

    def element(self, row, col):
        return complex(self.matrix[row, col])


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigen-decomposition of a Hermitian matrix, eigenvalues descending.

    Each eigenvalue is stored as ``shifts + residuals``: ``shifts`` is the
    mean diagonal of the exactly decoupled block the eigenvector lives in,
    ``residuals`` the eigenvalue of the shifted block. Differences between
    eigenvalues of one block are then formed without rounding at the scale of
    the shift (see :meth:`gaps`).
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    support_tol: float = 1e-10
    shifts: np.ndarray | None = None
    residuals: np.ndarray | None = None

    def __post_init__(self):
        if self.shifts is None:
            object.__setattr__(self, "shifts", np.zeros_like(self.eigenvalues))
            object.__setattr__(self, "residuals", np.array(self.eigenvalues, dtype=float))

    @property
    def support(self):
        """Boolean mask of eigenvalues counted in the support set."""
        return self.eigenvalues > self.support_tol

    @property
    def support_dim(self):
        return int(np.count_nonzero(self.support))

    def gaps(self):
        """Matrix of p_i - p_j."""
        return (self.shifts[:, None] - self.shifts[None, :]) + (
            self.residuals[:, None] - self.residuals[None, :]
        )

    def reconstruct(self):
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def ghz_state(nqubits):
    """(|0...0> + |1...1>)/sqrt(2)."""
    n = check_nqubits(nqubits)
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = amps[-1] = 1 / np.sqrt(2)
    return PureState(amps)


def product_plus_state(nqubits):
    n = check_nqubits(nqubits)
    return PureState(np.full(2**n, 2.0 ** (-n / 2), dtype=complex))


def popcounts(nqubits):
    """Hamming weight of every computational-basis index."""
    idx = np.arange(2**nqubits)
    counts = np.zeros(idx.size, dtype=np.int64)
    for q in range(nqubits):
        counts += (idx >> q) & 1
    return counts


def jz_eigenvalues(nqubits):
    """Diagonal of J_z = sum_i sigma_z^(i) / 2: (N - 2 popcount(b)) / 2."""
    n = check_nqubits(nqubits)
    return (n - 2 * popcounts(n)) / 2.0


def collective_jz(nqubits):
    return np.diag(jz_eigenvalues(nqubits)).astype(complex)


def sigma_z(qubit, nqubits):
    """Pauli Z acting on ``qubit`` of an ``nqubits`` register, dense."""
    n = check_nqubits(nqubits)
    if not 0 <= qubit < n:
        raise SizeError(f"qubit index {qubit} out of range for {n} qubits")
    bits = (np.arange(2**n) >> qubit) & 1
    return np.diag(1.0 - 2.0 * bits).astype(complex)


def as_density_matrix(state):
    if isinstance(state, DensityMatrix):
        return state
    if isinstance(state, PureState):
        return state.density_matrix()
    arr = np.asarray(state)
    if arr.ndim == 1:
        return PureState(arr).density_matrix()
    return DensityMatrix(arr)


def phase_gate(state, phase, generator):
    """Conjugate ``state`` by exp(-i * phase * generator).

    Only diagonal generators are supported, which covers J_z and any sum of
    single-qubit sigma_z terms.
    """
    rho = as_density_matrix(state)
    gen = np.asarray(generator, dtype=complex)
    if gen.shape != rho.matrix.shape:
        raise UnsupportedGeneratorError(
            f"generator shape {gen.shape} does not match state {rho.matrix.shape}"
        )
    diag = np.diag(gen)
    offdiag = gen - np.diag(diag)
    if np.any(offdiag != 0):
        raise UnsupportedGeneratorError("generator must be diagonal in the computational basis")
    if np.any(np.abs(diag.imag) > HERMITIAN_TOL * max(1.0, np.max(np.abs(diag)))):
        raise SymmetryError("generator has non-real diagonal entries")
    g = diag.real
    # phase differences keep the diagonal bit-exact
    factors = np.exp(-1j * phase * (g[:, None] - g[None, :]))
    return DensityMatrix(rho.matrix * factors)


def eigendecompose_hermitian(matrix, support_tol=1e-10):
    """Hermitian eigen-decomposition, block by block.

    The matrix is split into the connected components of its nonzero
    pattern; each block is shifted by its mean diagonal before ``eigh``.
    Both steps are exact in exact arithmetic. Together they keep nearly
    degenerate eigenpairs of structured states (e.g. a dephased GHZ state
    with tiny coherence) accurate to machine precision relative to their
    splitting, rather than relative to the norm of the matrix.
    """
    m = require_hermitian(matrix)
    m = 0.5 * (m + m.conj().T)
    dim = m.shape[0]
    ncomp, labels = connected_components(csr_matrix(m != 0), directed=False)
    vals = np.empty(dim)
    shifts = np.empty(dim)
    vecs = np.zeros((dim, dim), dtype=complex)
    col = 0
    for comp in range(ncomp):
        idx = np.flatnonzero(labels == comp)
        block = m[np.ix_(idx, idx)]
        mu = float(np.mean(block.diagonal().real))
        w, u = np.linalg.eigh(block - mu * np.eye(idx.size))
        sl = slice(col, col + idx.size)
        vals[sl] = w
        shifts[sl] = mu
        vecs[idx, sl] = u
        col += idx.size
    full = shifts + vals
    order = np.argsort(-full, kind="stable")
    return SpectralDecomposition(
        full[order], vecs[:, order], float(support_tol), shifts[order], vals[order]
    )
