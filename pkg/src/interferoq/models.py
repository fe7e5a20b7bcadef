"""Closed-form sensitivity laws for lambda-class interferometers.

A GHZ probe of N qubits accumulates the phase phi = c N chi tau**lambda
(lambda = 2, c = beta for the Sagnac gyroscope, lambda = 1 for Ramsey).
Under dephasing the QFI with respect to chi is

    ghz, independent:          c^2 N^2 tau^(2 lambda) exp(-2 N gamma tau)
    ghz, collective:           c^2 N^2 tau^(2 lambda) exp(-2 N^2 Gamma tau)
    uncorrelated, independent: N c^2 tau^(2 lambda) exp(-2 gamma tau)

and F/tau peaks at tau_opt = (2 lambda - 1) / (2 k) with k = N gamma,
N^2 Gamma or gamma respectively.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dephasing import COLLECTIVE, INDEPENDENT, MODES, DephasingParams, apply_dephasing
from .errors import DomainError, NoOptimumError, UnsupportedCombinationError
from .qfi import StateFamily
from .qstate import collective_jz, ghz_state, phase_gate, product_plus_state

GHZ = "ghz"
UNCORRELATED = "uncorrelated"
PROBES = (GHZ, UNCORRELATED)


@dataclass(frozen=True)
class InterferometerSpec:
    lam: float
    prefactor: float = 1.0
    nqubits: int = 1
    mode: str = INDEPENDENT
    strength: float = 1.0
    probe: str = GHZ

    def __post_init__(self):
        if not self.lam > 0:
            raise DomainError(f"lam must be > 0, got {self.lam!r}")
        if not self.prefactor > 0:
            raise DomainError(f"prefactor must be > 0, got {self.prefactor!r}")
        if int(self.nqubits) != self.nqubits or self.nqubits < 1:
            raise DomainError(f"nqubits must be a positive integer, got {self.nqubits!r}")
        if self.mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not self.strength >= 0:
            raise DomainError(f"strength must be >= 0, got {self.strength!r}")
        if self.probe not in PROBES:
            raise DomainError(f"probe must be one of {PROBES}, got {self.probe!r}")

    def decay_rate(self):
        """k such that the QFI decays as exp(-2 k tau)."""
        if self.probe == UNCORRELATED:
            if self.mode == COLLECTIVE:
                raise UnsupportedCombinationError(
                    "no closed form for uncorrelated probes under collective dephasing"
                )
            return self.strength
        if self.mode == INDEPENDENT:
            return self.nqubits * self.strength
        return self.nqubits**2 * self.strength

    def noise(self, tau):
        return DephasingParams(self.mode, self.strength, tau)


@dataclass(frozen=True)
class SensitivityReport:
    tau_opt: float
    f_over_tau_opt: float
    qcrb_normalized: float
    scaling_exponent: float
    rounds: float | None = None
    delta: float | None = None


@dataclass(frozen=True)
class SagnacGeometry:
    """Ring of radius R traversed at speed v; natural units by default."""

    speed: float
    mass: float = 1.0
    radius: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        for name in ("speed", "mass", "radius", "hbar"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")

    @property
    def area(self):
        return np.pi * self.radius**2

    @property
    def beta(self):
        return 2.0 * self.mass * self.speed**2 / (np.pi * self.hbar)

    @property
    def recombination_time(self):
        return np.pi * self.radius / self.speed

    def single_particle_phase(self, omega):
        """2 m Omega A / hbar."""
        return 2.0 * self.mass * omega * self.area / self.hbar

    def spec(self, nqubits=1, mode=INDEPENDENT, strength=0.0, probe=GHZ):
        return InterferometerSpec(2.0, self.beta, nqubits, mode, strength, probe)


def _check_tau(tau):
    arr = np.asarray(tau, dtype=float)
    if np.any(~(arr >= 0)):
        raise DomainError("tau must be >= 0")
    return arr


def phase(spec, chi, tau):
    """Accumulated phase c N chi tau**lambda."""
    t = _check_tau(tau)
    out = spec.prefactor * spec.nqubits * chi * t**spec.lam
    return float(out) if np.ndim(out) == 0 else out


def scale_factor(spec, tau):
    """d phase / d chi for the whole probe (per qubit for uncorrelated)."""
    t = _check_tau(tau)
    if spec.probe == GHZ:
        return spec.prefactor * spec.nqubits * t**spec.lam
    return spec.prefactor * t**spec.lam


def qfi_closed_form(spec, tau):
    t = _check_tau(tau)
    rate = spec.decay_rate()
    s = scale_factor(spec, t)
    out = s**2 * np.exp(-2.0 * rate * t)
    if spec.probe == UNCORRELATED:
        out = spec.nqubits * out
    return float(out) if np.ndim(out) == 0 else out


def scaling_exponent(lam, mode=INDEPENDENT):
    """Exponent of N in (F/tau)_opt for a GHZ probe."""
    if not lam > 0.5:
        raise NoOptimumError(f"F/tau has no interior optimum for lambda = {lam} <= 1/2")
    if mode == INDEPENDENT:
        return 3.0 - 2.0 * lam
    if mode == COLLECTIVE:
        return 4.0 * (1.0 - lam)
    raise DomainError(f"unknown mode {mode!r}")


def qcrb(f_over_tau, total_time=None, tau=None):
    """Time-normalized quantum Cramer-Rao bound 1/sqrt(F/tau).

    With ``total_time`` the absolute bound 1/sqrt(nu F) = qcrb/sqrt(T) is
    returned as ``delta``; ``tau`` additionally yields nu = T/tau rounds.
    """
    if not f_over_tau > 0:
        raise DomainError(f"f_over_tau must be positive, got {f_over_tau!r}")
    bound = 1.0 / np.sqrt(f_over_tau)
    out = {"qcrb_normalized": float(bound), "delta": None, "rounds": None}
    if total_time is not None:
        if not total_time > 0:
            raise DomainError("total_time must be positive")
        out["delta"] = float(bound / np.sqrt(total_time))
        if tau is not None:
            rounds = total_time / tau
            if rounds < 1:
                raise DomainError(f"total_time {total_time} shorter than one round of {tau}")
            out["rounds"] = float(rounds)
    return out


def optimal_interrogation(spec, total_time=None):
    """Interrogation time maximizing F/tau and the resulting bound."""
    lam = spec.lam
    if not lam > 0.5:
        raise NoOptimumError(f"F/tau has no interior optimum for lambda = {lam} <= 1/2")
    rate = spec.decay_rate()
    if not rate > 0:
        raise NoOptimumError("F/tau grows without bound in the absence of dephasing")
    tau_opt = (2 * lam - 1) / (2 * rate)
    # c^2 N^2 tau^(2 lam - 1) exp(-2 k tau) at tau_opt
    f_opt = float(qfi_closed_form(spec, tau_opt) / tau_opt)
    exponent = 1.0 if spec.probe == UNCORRELATED else scaling_exponent(lam, spec.mode)
    bound = qcrb(f_opt, total_time, tau_opt)
    return SensitivityReport(
        tau_opt=float(tau_opt),
        f_over_tau_opt=f_opt,
        qcrb_normalized=bound["qcrb_normalized"],
        scaling_exponent=exponent,
        rounds=bound["rounds"],
        delta=bound["delta"],
    )


def optimum_f_over_tau(spec):
    """Closed-form (F/tau)_opt written out as c^2 N^e [(2 lam - 1)/(2 s e)]^(2 lam - 1)."""
    lam, c, n, s = spec.lam, spec.prefactor, spec.nqubits, spec.strength
    if not lam > 0.5:
        raise NoOptimumError(f"no optimum for lambda = {lam}")
    base = ((2 * lam - 1) / (2 * s * np.e)) ** (2 * lam - 1)
    if spec.probe == UNCORRELATED:
        spec.decay_rate()
        return n * c**2 * base
    return c**2 * float(n) ** scaling_exponent(lam, spec.mode) * base


@dataclass(frozen=True)
class ScanCurve:
    tau: np.ndarray
    f_over_tau: np.ndarray
    argmax: int

    @property
    def tau_at_max(self):
        return float(self.tau[self.argmax])

    @property
    def max_value(self):
        return float(self.f_over_tau[self.argmax])

    def refined_peak(self):
        """Vertex of the parabola through the grid maximum and its neighbours.

        Falls back to the raw grid maximum at the edges of the grid.
        """
        i = self.argmax
        if i == 0 or i == self.tau.size - 1:
            return self.tau_at_max, self.max_value
        x = self.tau[i - 1 : i + 2]
        y = self.f_over_tau[i - 1 : i + 2]
        a, b, c = np.polyfit(x - x[1], y, 2)
        if a >= 0:
            return self.tau_at_max, self.max_value
        dx = -b / (2 * a)
        return float(x[1] + dx), float(c - b * b / (4 * a))


def scan_f_over_tau(spec, tau_grid):
    grid = np.asarray(tau_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise DomainError("tau grid must be a non-empty vector")
    if np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise DomainError("tau grid must be positive and strictly increasing")
    values = qfi_closed_form(spec, grid) / grid
    values = np.atleast_1d(values)
    return ScanCurve(grid, values, int(np.argmax(values)))


def dephased_state_family(spec, tau):
    """chi -> full 2^N x 2^N readout state, for brute-force QFI checks.

    The phase gate uses J_z with angle c chi tau**lambda, so the relative
    phase between |0...0> and |1...1> is c N chi tau**lambda.
    """
    prep = ghz_state if spec.probe == GHZ else product_plus_state
    rho0 = prep(spec.nqubits).density_matrix()
    jz = collective_jz(spec.nqubits)
    noise = spec.noise(tau)
    angle_per_chi = spec.prefactor * float(tau) ** spec.lam

    def evaluate(chi):
        return apply_dephasing(phase_gate(rho0, angle_per_chi * chi, jz), noise)

    return StateFamily(evaluate, parameter_name="chi")
