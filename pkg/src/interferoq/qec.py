"""Logical GHZ probes built from phase-flip repetition codes.

Each logical qubit is an odd block of n physical qubits and fails only if a
majority of its qubits suffer a phase flip. With N physical qubits (N/n
logical ones) the Sagnac QFI becomes

    F_L = beta^2 N^2 tau^4 (1 - 2 p_L)^(2N/n).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np
from scipy.special import gammaln, logsumexp

from .dephasing import single_qubit_error_prob
from .errors import DomainError, InfiniteRateError

EXACT_SUM_MAX_BLOCK = 9


def _check_block(n):
    if isinstance(n, bool) or int(n) != n or n < 1 or n % 2 == 0:
        raise DomainError(f"block size must be an odd positive integer, got {n!r}")
    return int(n)


@dataclass(frozen=True)
class QecCode:
    block_size: int
    total_qubits: int

    def __post_init__(self):
        _check_block(self.block_size)
        if int(self.total_qubits) != self.total_qubits or self.total_qubits < 1:
            raise DomainError("total_qubits must be a positive integer")
        if self.total_qubits % self.block_size:
            raise DomainError(
                f"block size {self.block_size} does not divide {self.total_qubits}"
            )

    @property
    def logical_count(self):
        return self.total_qubits // self.block_size


@dataclass(frozen=True)
class QecSensitivity:
    p: float
    p_logical: float
    qfi: float
    qcrb: float
    n_opt: int
    gamma_eff: float


def logical_error_prob(n, p):
    """Probability that a majority of n independent phase flips occurs.

    sum_{k=0}^{(n-1)/2} C(n, k) p^(n-k) (1-p)^k. Blocks above 9 qubits are
    summed in log space so tiny p does not underflow term by term.
    """
    n = _check_block(n)
    p_arr = np.asarray(p, dtype=float)
    if np.any(~((p_arr >= 0) & (p_arr <= 0.5))):
        raise DomainError("p must lie in [0, 1/2]")
    ks = np.arange((n - 1) // 2 + 1)
    pp = p_arr[..., None]
    if n <= EXACT_SUM_MAX_BLOCK:
        coeffs = np.array([comb(n, int(k)) for k in ks], dtype=float)
        out = np.sum(coeffs * pp ** (n - ks) * (1.0 - pp) ** ks, axis=-1)
    else:
        log_c = gammaln(n + 1) - gammaln(ks + 1) - gammaln(n - ks + 1)
        with np.errstate(divide="ignore"):
            log_terms = log_c + (n - ks) * np.log(pp) + ks * np.log1p(-pp)
        out = np.exp(logsumexp(log_terms, axis=-1))
    return float(out) if out.ndim == 0 else out


def log_logical_coherence(n, gamma, tau):
    """ln(1 - 2 p_L) at p = (1 - exp(-gamma tau))/2.

    For n = 1 this is exactly -gamma tau.
    """
    n = _check_block(n)
    if n == 1:
        return -float(gamma) * float(tau)
    p_l = logical_error_prob(n, single_qubit_error_prob(gamma, tau))
    if p_l >= 0.5:
        return -np.inf
    return float(np.log1p(-2.0 * p_l))


def logical_qfi(code, beta, tau, gamma):
    n, big_n = code.block_size, code.total_qubits
    tau = float(tau)
    log_q = log_logical_coherence(n, gamma, tau)
    return float((beta * big_n * tau**2.0) ** 2 * np.exp(2.0 * big_n / n * log_q))


@dataclass(frozen=True)
class QcrbCurve:
    x: np.ndarray
    qcrb: np.ndarray
    argmin: int

    @property
    def x_at_min(self):
        return float(self.x[self.argmin])

    @property
    def min_value(self):
        return float(self.qcrb[self.argmin])


def logical_qcrb_curve(code, beta, gamma, tau_grid):
    """delta Omega sqrt(T) = 1/sqrt(F_L/tau) against gamma tau."""
    grid = np.asarray(tau_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise DomainError("tau grid must be a non-empty vector")
    if np.any(grid <= 0):
        raise DomainError("tau grid must be positive")
    vals = np.array([1.0 / np.sqrt(logical_qfi(code, beta, t, gamma) / t) for t in grid])
    return QcrbCurve(gamma * grid, vals, int(np.argmin(vals)))


def optimal_total_qubits(n, p):
    """(N_opt by exact scan over multiples of n, continuous n / |ln(1 - 2 p_L)|).

    The scan maximizes N^2 (1 - 2 p_L)^(2N/n) over N = n, 2n, 3n, ...
    """
    n = _check_block(n)
    if not 0 < p < 0.5:
        raise DomainError("p must lie in (0, 1/2)")
    p_l = logical_error_prob(n, p)
    rate = -np.log1p(-2.0 * p_l)
    closed = n / rate
    m_stop = int(np.ceil(2.0 / rate)) + 2
    m = np.arange(1, m_stop + 1, dtype=float)
    objective = 2.0 * np.log(n * m) - 2.0 * m * rate
    best = int(m[np.argmax(objective)])
    return best * n, float(closed)


def optimal_total_qubits_at(n, gamma_tau):
    return optimal_total_qubits(n, single_qubit_error_prob(gamma_tau, 1.0))


def effective_dephasing(n, gamma, tau):
    """Rate whose plain exponential decay reproduces the logical coherence at tau."""
    if not tau > 0:
        raise DomainError("tau must be positive")
    log_q = log_logical_coherence(n, gamma, tau)
    if not np.isfinite(log_q):
        raise InfiniteRateError("logical error probability reached 1/2")
    return -log_q / tau


def qcrb_vs_total_qubits(n, gamma_tau, totals, beta=1.0, gamma=1.0):
    """delta Omega sqrt(T) at fixed gamma tau for each total qubit number."""
    tau = gamma_tau / gamma
    out = []
    for big_n in totals:
        f = logical_qfi(QecCode(n, int(big_n)), beta, tau, gamma)
        out.append(1.0 / np.sqrt(f / tau))
    return np.array(out)


def heisenberg_window_slope(n, gamma_tau, upper=None):
    """Least-squares slope of log(qcrb) vs log N over N = n, 2n, ..., upper.

    ``upper`` defaults to N_opt / 2.
    """
    if upper is None:
        n_opt, _ = optimal_total_qubits_at(n, gamma_tau)
        upper = n_opt / 2
    totals = np.arange(n, int(upper) + 1, n)
    if totals.size < 2:
        raise DomainError("window holds fewer than two points")
    y = np.log(qcrb_vs_total_qubits(n, gamma_tau, totals))
    slope, _ = np.polyfit(np.log(totals), y, 1)
    return float(slope)


def sample_majority_failures(n, p, trials, rng, chunk=1_000_000):
    """Count trials in which more than half of n i.i.d. flips (prob p) occur."""
    n = _check_block(n)
    failures = 0
    remaining = int(trials)
    while remaining > 0:
        size = min(chunk, remaining)
        flips = rng.random((size, n)) < p
        failures += int(np.count_nonzero(flips.sum(axis=1) > n // 2))
        remaining -= size
    return failures
