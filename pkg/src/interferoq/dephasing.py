"""Markovian dephasing of qubit registers.

Two noise models are supported:

* independent: d rho/dt = (gamma/2) sum_i (Z_i rho Z_i - rho)
* collective:  d rho/dt = Gamma (2 J_z rho J_z - J_z^2 rho - rho J_z^2)

Both generators are diagonal-conjugation type, so their exact solutions are
element-wise damping of rho in the computational basis. The RK4 integrator
in this module is kept as an independent oracle for those closed forms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SizeError
from .qstate import (
    DensityMatrix,
    as_density_matrix,
    check_nqubits,
    collective_jz,
    jz_eigenvalues,
    sigma_z,
)

INDEPENDENT = "independent"
COLLECTIVE = "collective"
MODES = (INDEPENDENT, COLLECTIVE)

RK4_MAX_QUBITS = 8


def _nonneg(name, value):
    value = float(value)
    if not value >= 0.0:  # also rejects NaN
        raise DomainError(f"{name} must be >= 0, got {value!r}")
    return value


@dataclass(frozen=True)
class DephasingParams:
    mode: str
    strength: float
    duration: float

    def __post_init__(self):
        if self.mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}, got {self.mode!r}")
        object.__setattr__(self, "strength", _nonneg("strength", self.strength))
        object.__setattr__(self, "duration", _nonneg("duration", self.duration))

    @property
    def exponent(self):
        """Dimensionless strength * duration."""
        return self.strength * self.duration


@dataclass(frozen=True)
class GhzReadoutState:
    """Dephased GHZ state restricted to span{|0...0>, |1...1>}.

    rho = 1/2 [ |0><0| + |1><1| + (c e^{i phase} |0><1| + h.c.) ]
    """

    nqubits: int
    phase: float
    coherence: float

    def __post_init__(self):
        check_nqubits(self.nqubits)
        c = float(self.coherence)
        if not 0.0 <= c <= 1.0:
            raise DomainError(f"coherence must lie in [0, 1], got {c!r}")

    def matrix_2x2(self):
        off = 0.5 * self.coherence * np.exp(1j * self.phase)
        return np.array([[0.5, off], [np.conj(off), 0.5]], dtype=complex)

    def density_matrix(self):
        dim = 2**self.nqubits
        m = np.zeros((dim, dim), dtype=complex)
        small = self.matrix_2x2()
        ends = [0, dim - 1]
        for a in range(2):
            for b in range(2):
                m[ends[a], ends[b]] = small[a, b]
        return DensityMatrix(m)


def single_qubit_error_prob(gamma, tau):
    """Phase-flip probability p = (1 - exp(-gamma tau)) / 2."""
    gamma = _nonneg("gamma", gamma)
    tau = _nonneg("tau", tau)
    return float(-0.5 * np.expm1(-gamma * tau))


def hamming_distances(nqubits):
    idx = np.arange(2**nqubits)
    x = idx[:, None] ^ idx[None, :]
    dist = np.zeros(x.shape, dtype=np.int64)
    for q in range(nqubits):
        dist += (x >> q) & 1
    return dist


def _independent_factors(nqubits, rate_time):
    return np.exp(-rate_time * hamming_distances(nqubits))


def _collective_factors(nqubits, rate_time):
    m = jz_eigenvalues(nqubits)
    gap = m[:, None] - m[None, :]
    return np.exp(-rate_time * gap**2)


def apply_independent_dephasing(state, gamma, tau):
    """rho_ab -> rho_ab * exp(-gamma tau * hamming(a, b)).

    Identical to the tensor product of single-qubit phase-flip channels with
    Kraus operators sqrt(1-p) I and sqrt(p) Z.
    """
    rho = as_density_matrix(state)
    rt = _nonneg("gamma", gamma) * _nonneg("tau", tau)
    return DensityMatrix(rho.matrix * _independent_factors(rho.nqubits, rt))


def apply_collective_dephasing(state, Gamma, tau):
    """rho_ab -> rho_ab * exp(-Gamma tau (m_a - m_b)^2), m the J_z eigenvalues."""
    rho = as_density_matrix(state)
    rt = _nonneg("Gamma", Gamma) * _nonneg("tau", tau)
    return DensityMatrix(rho.matrix * _collective_factors(rho.nqubits, rt))


def apply_dephasing(state, params):
    if params.mode == INDEPENDENT:
        return apply_independent_dephasing(state, params.strength, params.duration)
    return apply_collective_dephasing(state, params.strength, params.duration)


def kraus_operators(nqubits, gamma, tau):
    """All 2**N tensor-product Kraus operators of the independent channel."""
    n = check_nqubits(nqubits)
    p = single_qubit_error_prob(gamma, tau)
    zs = [sigma_z(q, n) for q in range(n)]
    ops = []
    for pattern in range(2**n):
        op = np.eye(2**n, dtype=complex)
        weight = 1.0
        for q in range(n):
            if (pattern >> q) & 1:
                op = op @ zs[q]
                weight *= p
            else:
                weight *= 1.0 - p
        ops.append(np.sqrt(weight) * op)
    return ops


def apply_kraus(state, operators):
    rho = as_density_matrix(state).matrix
    out = sum(k @ rho @ k.conj().T for k in operators)
    return DensityMatrix(out)


def _jump_operators(nqubits, params):
    if params.mode == INDEPENDENT:
        rate = params.strength / 2.0
        ops = [sigma_z(q, nqubits) for q in range(nqubits)]
    else:
        rate = 2.0 * params.strength
        ops = [collective_jz(nqubits)]
    return np.sqrt(rate) * np.array(ops)


def lindblad_rhs(rho, jumps):
    """sum_k L rho L^+ - {L^+ L, rho}/2 for a stack of jump operators."""
    ldag = np.conj(np.swapaxes(jumps, -1, -2))
    ldl = np.sum(ldag @ jumps, axis=0)
    return np.sum(jumps @ rho @ ldag, axis=0) - 0.5 * (ldl @ rho + rho @ ldl)


def integrate_master_equation(state, params, steps):
    """Fixed-step classical RK4 on the Lindblad generator selected by ``params``."""
    rho = as_density_matrix(state)
    if rho.nqubits > RK4_MAX_QUBITS:
        raise SizeError(f"integrator is limited to {RK4_MAX_QUBITS} qubits")
    if int(steps) != steps or steps < 1:
        raise DomainError(f"steps must be a positive integer, got {steps!r}")
    steps = int(steps)
    jumps = _jump_operators(rho.nqubits, params)
    h = params.duration / steps
    y = rho.matrix.copy()
    for _ in range(steps):
        k1 = lindblad_rhs(y, jumps)
        k2 = lindblad_rhs(y + 0.5 * h * k1, jumps)
        k3 = lindblad_rhs(y + 0.5 * h * k2, jumps)
        k4 = lindblad_rhs(y + h * k3, jumps)
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return DensityMatrix(0.5 * (y + y.conj().T))


def ghz_coherence_factor(nqubits, params):
    """exp(-N gamma tau) (independent) or exp(-N^2 Gamma tau) (collective)."""
    n = check_nqubits(nqubits)
    if params.mode == INDEPENDENT:
        return float(np.exp(-n * params.exponent))
    return float(np.exp(-(n**2) * params.exponent))


def ghz_readout(nqubits, phase, params):
    return GhzReadoutState(int(nqubits), float(phase), ghz_coherence_factor(nqubits, params))


def trace_distance(a, b):
    a = as_density_matrix(a).matrix
    b = as_density_matrix(b).matrix
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(a - b))))


__all__ = [
    "COLLECTIVE",
    "INDEPENDENT",
    "DephasingParams",
    "GhzReadoutState",
    "apply_collective_dephasing",
    "apply_dephasing",
    "apply_independent_dephasing",
    "apply_kraus",
    "ghz_coherence_factor",
    "ghz_readout",
    "hamming_distances",
    "integrate_master_equation",
    "kraus_operators",
    "lindblad_rhs",
    "single_qubit_error_prob",
    "trace_distance",
]
