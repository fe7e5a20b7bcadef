"""Quantum Fisher information by three independent routes.

* :func:`qfi_pure_generator` -- 4 Var(H) of the generator in a pure state.
* :func:`qfi_sld` -- builds the symmetric logarithmic derivative L from a
  central finite difference of rho and returns Tr(rho L^2).
* :func:`qfi_spectral` -- eigenvalue/eigenvector formula

      F = sum_i (d p_i)^2 / p_i + sum_i 4 p_i <d psi_i|d psi_i>
          - sum_ij 8 p_i p_j / (p_i + p_j) |<psi_i|d psi_j>|^2

  with the derivatives of p_i and |psi_i> taken by central differences.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DerivativeConsistencyError, StencilError
from .qstate import (
    DensityMatrix,
    PureState,
    as_density_matrix,
    eigendecompose_hermitian,
    require_hermitian,
)

DEFAULT_SUPPORT_TOL = 1e-10
DEFAULT_FD_SCALE = 1e-5
DRHO_TRACE_TOL = 1e-9

# support eigenvalues closer than this are treated as degenerate
_DEGENERACY_TOL = 1e-13
# minimum |<v(chi)|v(chi +- h)>| accepted as "same eigenvector"
_OVERLAP_MIN = 0.9


@dataclass(frozen=True)
class StateFamily:
    """One-parameter family chi -> rho(chi).

    ``fd_step=None`` selects 1e-5 * max(1, |chi|) at every evaluation point.
    """

    evaluator: Callable[[float], DensityMatrix]
    parameter_name: str = "chi"
    fd_step: float | None = None

    def __call__(self, chi):
        return as_density_matrix(self.evaluator(chi))

    def step(self, chi):
        if self.fd_step is not None:
            if not self.fd_step > 0:
                raise ValueError(f"fd_step must be positive, got {self.fd_step!r}")
            return float(self.fd_step)
        return DEFAULT_FD_SCALE * max(1.0, abs(chi))


@dataclass(frozen=True)
class QfiResult:
    value: float
    method: str
    support_dim: int
    diagnostics: dict = field(default_factory=dict)


def qfi_pure_generator(state, generator):
    """4 (<H^2> - <H>^2) for a pure ``state``."""
    psi = state.amplitudes if isinstance(state, PureState) else PureState(state).amplitudes
    h = require_hermitian(generator, what="generator")
    h_psi = h @ psi
    mean = np.vdot(psi, h_psi).real
    mean_sq = np.vdot(h_psi, h_psi).real
    return float(max(0.0, 4.0 * (mean_sq - mean**2)))


def sld_operator(rho, drho, support_tol=DEFAULT_SUPPORT_TOL):
    """Solve d rho = (rho L + L rho)/2 for L on the support of rho."""
    rho = as_density_matrix(rho)
    drho = np.asarray(drho, dtype=complex)
    tr = np.trace(drho)
    if abs(tr) > DRHO_TRACE_TOL:
        raise DerivativeConsistencyError(f"Tr(d rho) = {tr:.3g} should vanish")
    drho = 0.5 * (drho + drho.conj().T)
    dec = eigendecompose_hermitian(rho.matrix, support_tol)
    v = dec.eigenvectors
    p = dec.eigenvalues
    d_eig = v.conj().T @ drho @ v
    denom = p[:, None] + p[None, :]
    keep = denom > support_tol
    l_eig = np.zeros_like(d_eig)
    l_eig[keep] = 2.0 * d_eig[keep] / denom[keep]
    sld = v @ l_eig @ v.conj().T
    return 0.5 * (sld + sld.conj().T)


def _stencil(family, chi):
    h = family.step(chi)
    return h, family(chi - h), family(chi), family(chi + h)


def qfi_sld(family, chi, support_tol=DEFAULT_SUPPORT_TOL):
    h, minus, center, plus = _stencil(family, chi)
    drho = (plus.matrix - minus.matrix) / (2.0 * h)
    sld = sld_operator(center, drho, support_tol)
    value = np.trace(center.matrix @ sld @ sld).real
    dec = eigendecompose_hermitian(center.matrix, support_tol)
    discarded = float(np.sum(np.clip(dec.eigenvalues[~dec.support], 0.0, None)))
    return QfiResult(
        value=float(max(0.0, value)),
        method="sld",
        support_dim=dec.support_dim,
        diagnostics={
            "fd_step": h,
            "smallest_retained": float(dec.eigenvalues[dec.support][-1]) if dec.support_dim else 0.0,
            "discarded_weight": discarded,
        },
    )


def _align(vectors, ref_rows):
    """Rotate each column so its entry at ``ref_rows[j]`` is real positive."""
    pick = vectors[ref_rows, np.arange(vectors.shape[1])]
    mag = np.abs(pick)
    phase = np.where(mag > 0, pick.conj() / np.where(mag > 0, mag, 1.0), 1.0)
    return vectors * phase[None, :]


def qfi_spectral(family, chi, support_tol=DEFAULT_SUPPORT_TOL):
    """QFI from the eigen-decomposition of rho(chi) and its finite differences.

    Eigenvectors are gauge fixed before differencing: the row of each
    eigenvector's largest-magnitude entry is chosen at ``chi`` and that entry
    is made real positive at all three stencil points.

    The two eigenvector terms are summed in a regrouped form,

        sum_{i in S, k not in S} 4 p_i |<psi_k|d psi_i>|^2
        + sum_{i, j in S} 2 (p_i - p_j)^2 / (p_i + p_j) |<psi_i|d psi_j>|^2,

    which is algebraically identical (completeness plus antisymmetry of
    <psi_i|d psi_j>) but avoids cancelling two O(1) terms when the result
    is many orders of magnitude smaller.
    """
    h, minus, center, plus = _stencil(family, chi)
    dec0 = eigendecompose_hermitian(center.matrix, support_tol)
    decm = eigendecompose_hermitian(minus.matrix, support_tol)
    decp = eigendecompose_hermitian(plus.matrix, support_tol)

    support = dec0.support
    d = dec0.support_dim
    if decm.support_dim != d or decp.support_dim != d:
        raise StencilError("support dimension changes across the stencil; reduce fd_step")
    p0 = dec0.eigenvalues[:d]
    if d > 1 and np.min(np.diag(dec0.gaps(), 1)[: d - 1]) < _DEGENERACY_TOL:
        raise StencilError("degenerate eigenvalues in the support; use the SLD route")

    v0 = dec0.eigenvectors
    vs0 = v0[:, :d]
    ref_rows = np.argmax(np.abs(vs0), axis=0)
    vs0 = _align(vs0, ref_rows)
    vsm = _align(decm.eigenvectors[:, :d], ref_rows)
    vsp = _align(decp.eigenvectors[:, :d], ref_rows)
    for other in (vsm, vsp):
        overlap = np.abs(vs0.conj().T @ other)
        if np.any(np.argmax(overlap, axis=1) != np.arange(d)) or np.any(
            np.diag(overlap) < _OVERLAP_MIN
        ):
            raise StencilError("eigenvalue ordering changes within the stencil; reduce fd_step")

    dp = (
        (decp.shifts[:d] - decm.shifts[:d]) + (decp.residuals[:d] - decm.residuals[:d])
    ) / (2.0 * h)
    dpsi = (vsp - vsm) / (2.0 * h)

    classical = float(np.sum(dp**2 / p0))

    null_vecs = v0[:, ~support]
    null_amp = null_vecs.conj().T @ dpsi
    null_term = float(np.sum(4.0 * p0 * np.sum(np.abs(null_amp) ** 2, axis=0)))

    a = vs0.conj().T @ dpsi
    gaps = dec0.gaps()[:d, :d]
    pi, pj = p0[:, None], p0[None, :]
    coherent_term = float(np.sum(2.0 * gaps**2 / (pi + pj) * np.abs(a) ** 2))

    value = classical + null_term + coherent_term
    discarded = float(np.sum(np.clip(dec0.eigenvalues[~support], 0.0, None)))
    return QfiResult(
        value=max(0.0, value),
        method="spectral",
        support_dim=d,
        diagnostics={
            "fd_step": h,
            "smallest_retained": float(p0[-1]) if d else 0.0,
            "discarded_weight": discarded,
            "terms": (classical, null_term, coherent_term),
        },
    )


def qfi_spectral_naive(family, chi, support_tol=DEFAULT_SUPPORT_TOL):
    """Three-term sum evaluated literally, term by term.

    Kept for cross-checking the regrouped evaluation; loses relative
    precision once the QFI is far below the size of the individual terms.
    """
    h, minus, center, plus = _stencil(family, chi)
    dec0 = eigendecompose_hermitian(center.matrix, support_tol)
    decm = eigendecompose_hermitian(minus.matrix, support_tol)
    decp = eigendecompose_hermitian(plus.matrix, support_tol)
    d = dec0.support_dim
    p0 = dec0.eigenvalues[:d]
    ref_rows = np.argmax(np.abs(dec0.eigenvectors[:, :d]), axis=0)
    vs0 = _align(dec0.eigenvectors[:, :d], ref_rows)
    vsm = _align(decm.eigenvectors[:, :d], ref_rows)
    vsp = _align(decp.eigenvectors[:, :d], ref_rows)
    dp = (decp.eigenvalues[:d] - decm.eigenvalues[:d]) / (2.0 * h)
    dpsi = (vsp - vsm) / (2.0 * h)
    t1 = np.sum(dp**2 / p0)
    t2 = np.sum(4.0 * p0 * np.sum(np.abs(dpsi) ** 2, axis=0))
    pi, pj = p0[:, None], p0[None, :]
    t3 = np.sum(8.0 * pi * pj / (pi + pj) * np.abs(vs0.conj().T @ dpsi) ** 2)
    return float(t1 + t2 - t3)
