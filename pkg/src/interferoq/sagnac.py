"""Single-particle Sagnac interferometer on a ring, in angular-momentum modes.

The wavefunction is Psi(theta) = (2 pi)^(-1/2) sum_l c_l exp(i l theta) with
l in [-l_max, l_max]. Without interactions the rotating-frame Hamiltonian
hbar^2 l^2 / (2 m R^2) - Omega hbar l is diagonal in l, so free evolution is
an exact per-mode phase. The kick exp(+-i k0 theta) is an exact index shift.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError, TruncationError

TRUNCATION_TOL = 1e-12
# |sigma~(tau)| threshold standing in for "much smaller than pi"
CONDITION_WIDTH = np.pi / 4


def default_l_max(k0, sigma):
    return int(k0 + np.ceil(8.0 / sigma))


@dataclass(frozen=True)
class RingParams:
    k0: int = 50
    sigma: float = 0.1
    omega: float = 0.0
    hbar: float = 1.0
    mass: float = 1.0
    radius: float = 1.0
    l_max: int | None = None

    def __post_init__(self):
        if isinstance(self.k0, bool) or int(self.k0) != self.k0 or self.k0 < 1:
            raise DomainError(
                f"k0 must be a positive integer (single-valued kick on the ring), got {self.k0!r}"
            )
        object.__setattr__(self, "k0", int(self.k0))
        if not 0 < self.sigma <= np.pi / 4:
            raise DomainError(f"sigma must lie in (0, pi/4], got {self.sigma!r}")
        for name in ("hbar", "mass", "radius"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        if self.l_max is None:
            object.__setattr__(self, "l_max", default_l_max(self.k0, self.sigma))
        elif int(self.l_max) != self.l_max or self.l_max < default_l_max(self.k0, self.sigma):
            raise DomainError(
                f"l_max must be an integer >= k0 + ceil(8/sigma) = "
                f"{default_l_max(self.k0, self.sigma)}, got {self.l_max!r}"
            )

    @property
    def speed(self):
        """v = hbar k0 / (m R)."""
        return self.hbar * self.k0 / (self.mass * self.radius)

    @property
    def area(self):
        return np.pi * self.radius**2

    def with_omega(self, omega):
        return replace(self, omega=omega)


@dataclass(frozen=True)
class WavePacket:
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=complex)
        if c.ndim != 1 or c.size % 2 == 0:
            raise DomainError("coefficients must be a vector of odd length 2*l_max + 1")
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    @property
    def l_max(self):
        return (self.coefficients.size - 1) // 2

    @property
    def modes(self):
        return np.arange(-self.l_max, self.l_max + 1)

    def norm(self):
        return float(np.sum(np.abs(self.coefficients) ** 2))

    def boundary_weight(self):
        c = self.coefficients
        return float(max(abs(c[0]) ** 2, abs(c[-1]) ** 2))

    def mean_momentum(self):
        return float(np.sum(self.modes * np.abs(self.coefficients) ** 2) / self.norm())

    def overlap(self, other):
        """<other|self> = sum_l conj(other_l) self_l."""
        return complex(np.vdot(other.coefficients, self.coefficients))

    def on_grid(self, npoints=None):
        """(theta, Psi(theta)) on a uniform grid of [0, 2 pi)."""
        size = self.coefficients.size
        npoints = npoints or 4 * size
        if npoints < size:
            raise DomainError("grid must hold at least 2*l_max + 1 points")
        buf = np.zeros(npoints, dtype=complex)
        buf[self.modes % npoints] = self.coefficients
        theta = 2 * np.pi * np.arange(npoints) / npoints
        return theta, np.fft.ifft(buf) * npoints / np.sqrt(2 * np.pi)

    def center(self, npoints=None):
        """Circular mean of |Psi(theta)|^2, wrapped to (-pi, pi]."""
        theta, psi = self.on_grid(npoints)
        return wrap_phase(np.angle(np.sum(np.abs(psi) ** 2 * np.exp(1j * theta))))


@dataclass(frozen=True)
class InterferenceResult:
    phase_sim: float
    visibility: float
    phase_predicted: float
    width_at_tau: float
    condition_ok: bool
    tau: float


def wrap_phase(x):
    """Map to (-pi, pi]."""
    y = np.mod(np.asarray(x, dtype=float) + np.pi, 2 * np.pi) - np.pi
    y = np.where(y == -np.pi, np.pi, y)
    return float(y) if np.ndim(y) == 0 else y


def init_gaussian_packet(params):
    """Gaussian centred at theta = 0 with angular width sigma, unit norm."""
    ls = np.arange(-params.l_max, params.l_max + 1)
    c = np.exp(-(params.sigma**2) * ls.astype(float) ** 2 / 2.0)
    c = c / np.sqrt(np.sum(c**2))
    packet = WavePacket(c.astype(complex))
    if packet.boundary_weight() > TRUNCATION_TOL:
        raise TruncationError(
            f"boundary weight {packet.boundary_weight():.3g} exceeds {TRUNCATION_TOL}; raise l_max"
        )
    return packet


def apply_kick(packet, sign, params):
    """Multiply by exp(i sign k0 theta): shift every coefficient l -> l + sign k0."""
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    shift = sign * params.k0
    c = packet.coefficients
    if abs(shift) >= c.size:
        raise TruncationError("kick larger than the mode window")
    out = np.zeros_like(c)
    if shift > 0:
        lost = c[-shift:]
        out[shift:] = c[:-shift]
    else:
        lost = c[:-shift]
        out[:shift] = c[-shift:]
    if np.sum(np.abs(lost) ** 2) > TRUNCATION_TOL:
        raise TruncationError("kick pushes wave-packet weight past l_max")
    return WavePacket(out)


def evolve_free(packet, t, params):
    """Exact free evolution in the rotating frame for time t >= 0."""
    if not t >= 0:
        raise DomainError("t must be >= 0")
    ls = packet.modes.astype(float)
    kinetic = params.hbar * t / (2.0 * params.mass * params.radius**2)
    phases = params.omega * t * ls - kinetic * ls**2
    return WavePacket(packet.coefficients * np.exp(1j * phases))


def recombination_time(params):
    """tau = pi R / v = pi m R^2 / (hbar k0)."""
    return np.pi * params.mass * params.radius**2 / (params.hbar * params.k0)


def packet_width(params, t):
    """|sigma~(t)| = sqrt(sigma^2 + (hbar t / (m R^2 sigma))^2)."""
    spread = params.hbar * t / (params.mass * params.radius**2 * params.sigma)
    return float(np.hypot(params.sigma, spread))


def simulate_sagnac(params):
    """Split, counter-propagate for tau = pi R / v, recombine, read the phase."""
    tau = recombination_time(params)
    packet = init_gaussian_packet(params)
    arms = []
    for sign in (1, -1):
        arm = apply_kick(packet, sign, params)
        arm = evolve_free(arm, tau, params)
        arms.append(apply_kick(arm, -sign, params))
    coherence = arms[0].overlap(arms[1])
    width = packet_width(params, tau)
    predicted = 2.0 * params.mass * params.omega * params.area / params.hbar
    return InterferenceResult(
        phase_sim=wrap_phase(np.angle(coherence)),
        visibility=float(min(1.0, abs(coherence))),
        phase_predicted=wrap_phase(predicted),
        width_at_tau=width,
        condition_ok=bool(width <= CONDITION_WIDTH),
        tau=float(tau),
    )


def multiparticle_phase(phase_single, nqubits):
    if int(nqubits) != nqubits or nqubits < 1:
        raise DomainError("nqubits must be a positive integer")
    return float(nqubits * phase_single)


def ghz_coherence(visibility, nqubits):
    """Magnitude of the GHZ coherence when each particle has the given visibility."""
    return float(visibility**nqubits)


def phase_sweep(params, omegas):
    """Unwrapped simulated phases along an increasing Omega sweep."""
    phases = [simulate_sagnac(params.with_omega(w)).phase_sim for w in omegas]
    return np.unwrap(phases)
