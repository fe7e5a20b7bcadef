"""Self-verification: every oracle cross-check, one report line each.

Checks reach the library through module attributes (``dephasing.apply_dephasing``
and so on), so a fault injected into one code path shows up only in the
checks that exercise it. A check that raises counts as failed; the exception
text goes into the report instead of an error value.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import dephasing, models, qec, qfi, sagnac
from .dephasing import COLLECTIVE, INDEPENDENT

QFI_NQUBITS = (1, 2, 3, 4, 5)
QFI_GAMMA_TAUS = (0.1, 0.5, 1.0)
QFI_LAMS = (1.0, 2.0)
QFI_TOL = 1e-5

RK4_STEPS = 10_000
RK4_NQUBITS = 4
RK4_STATES = 3
RK4_TOL = 1e-8

SAGNAC_OMEGAS = (0.005, 0.01, 0.02, 0.05)
SAGNAC_K0S = (25, 50, 100)
SAGNAC_TOL = 1e-3
SAGNAC_K0_TOL = 2e-3
SAGNAC_ZERO_TOL = 1e-12

MC_CASES = tuple((n, p) for n in (1, 3, 5) for p in (0.05, 0.1, 0.2))
MC_TRIALS = 10_000_000
MC_STREAMS = 10
MC_SIGMAS = 3.0

NOPT_BLOCKS = (1, 3, 5, 15)
NOPT_GAMMA_TAU = 0.1

DEFAULT_SEED = 20240611


@dataclass
class CheckResult:
    name: str
    max_error: float
    tolerance: float
    passed: bool
    seconds: float = 0.0
    detail: str = ""

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        text = (
            f"{status}  {self.name:<28} max_err={self.max_error:.3e}  "
            f"tol={self.tolerance:.1e}  ({self.seconds:.2f} s)"
        )
        return text + (f"  {self.detail}" if self.detail else "")


def _rel(a, b):
    return abs(a - b) / abs(b)


def qfi_max_error(mode):
    worst = 0.0
    for n in QFI_NQUBITS:
        for gt in QFI_GAMMA_TAUS:
            for lam in QFI_LAMS:
                spec = models.InterferometerSpec(lam, 1.0, n, mode, 1.0)
                family = models.dephased_state_family(spec, gt)
                numeric = qfi.qfi_spectral(family, 0.3).value
                worst = max(worst, _rel(numeric, models.qfi_closed_form(spec, gt)))
    return worst


def random_density_matrix(nqubits, rng):
    dim = 2**nqubits
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def channel_max_error(mode, seed):
    rng = np.random.default_rng([seed, 3])
    params = dephasing.DephasingParams(mode, 0.7, 1.3)
    worst = 0.0
    for _ in range(RK4_STATES):
        rho = random_density_matrix(RK4_NQUBITS, rng)
        exact = dephasing.apply_dephasing(rho, params)
        numeric = dephasing.integrate_master_equation(rho, params, RK4_STEPS)
        worst = max(worst, dephasing.trace_distance(exact, numeric))
    return worst


def kraus_max_error(seed):
    rng = np.random.default_rng([seed, 4])
    worst = 0.0
    for n in (1, 2, 3, 4):
        rho = random_density_matrix(n, rng)
        ops = dephasing.kraus_operators(n, 0.7, 1.3)
        a = dephasing.apply_kraus(rho, ops)
        b = dephasing.apply_dephasing(rho, dephasing.DephasingParams(INDEPENDENT, 0.7, 1.3))
        worst = max(worst, dephasing.trace_distance(a, b))
    return worst


def sagnac_phase_error():
    worst = 0.0
    for omega in SAGNAC_OMEGAS:
        r = sagnac.simulate_sagnac(sagnac.RingParams(k0=50, sigma=0.1, omega=omega))
        worst = max(worst, _rel(r.phase_sim, 2 * math.pi * omega))
    zero = sagnac.simulate_sagnac(sagnac.RingParams(k0=50, sigma=0.1, omega=0.0))
    return worst, abs(zero.phase_sim)


def sagnac_speed_spread():
    worst = 0.0
    for omega in SAGNAC_OMEGAS:
        phases = [
            sagnac.simulate_sagnac(sagnac.RingParams(k0=k0, sigma=0.1, omega=omega)).phase_sim
            for k0 in SAGNAC_K0S
        ]
        worst = max(worst, (max(phases) - min(phases)) / (2 * math.pi * omega))
    return worst


def monte_carlo_zscores(seed, threads=1):
    """|p_hat - p_L| / sigma for every (n, p) case.

    Each case owns a fixed child seed and splits its trials over a fixed
    number of sub-streams, so the counts do not depend on ``threads``.
    """
    root = np.random.SeedSequence(seed)
    children = root.spawn(len(MC_CASES))
    per_stream = MC_TRIALS // MC_STREAMS
    jobs = []
    for (n, p), child in zip(MC_CASES, children):
        for sub in child.spawn(MC_STREAMS):
            jobs.append((n, p, sub))

    def run(job):
        n, p, sub = job
        return qec.sample_majority_failures(n, p, per_stream, np.random.default_rng(sub))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            counts = list(pool.map(run, jobs))
    else:
        counts = [run(j) for j in jobs]
    out = []
    for i, (n, p) in enumerate(MC_CASES):
        failures = sum(counts[i * MC_STREAMS : (i + 1) * MC_STREAMS])
        trials = per_stream * MC_STREAMS
        exact = qec.logical_error_prob(n, p)
        sigma = math.sqrt(exact * (1 - exact) / trials)
        out.append(((n, p), abs(failures / trials - exact) / sigma))
    return out


def nopt_errors():
    """|scan - continuous optimum| in units of the block size, per block size.

    The objective is unimodal in the number of blocks, so the integer
    optimum lies within one block of the continuous one.
    """
    return [
        abs(scan - closed) / n
        for n in NOPT_BLOCKS
        for scan, closed in [qec.optimal_total_qubits_at(n, NOPT_GAMMA_TAU)]
    ]


def n1_reduction_error():
    worst = 0.0
    for gt in (0.01, 0.1, 0.5, 1.0):
        for big_n in (1, 2, 5, 10):
            a = qec.logical_qfi(qec.QecCode(1, big_n), 1.0, gt, 1.0)
            b = models.qfi_closed_form(models.InterferometerSpec(2.0, 1.0, big_n), gt)
            worst = max(worst, _rel(a, b))
    return worst


def _timed(name, tol, fn):
    t0 = time.perf_counter()
    try:
        err, detail = fn()
        passed = bool(err <= tol)
    except Exception as exc:  # a crashing check is a failed check
        err, detail, passed = math.inf, f"{type(exc).__name__}: {exc}", False
    return CheckResult(name, float(err), tol, passed, time.perf_counter() - t0, detail)


def run_checks(seed=DEFAULT_SEED, threads=1):
    checks = []
    checks.append(
        _timed("qfi_spectral_independent", QFI_TOL, lambda: (qfi_max_error(INDEPENDENT), ""))
    )
    checks.append(
        _timed("qfi_spectral_collective", QFI_TOL, lambda: (qfi_max_error(COLLECTIVE), ""))
    )
    for mode in (INDEPENDENT, COLLECTIVE):
        checks.append(
            _timed(
                f"channel_rk4_{mode}",
                RK4_TOL,
                lambda mode=mode: (channel_max_error(mode, seed), ""),
            )
        )
    checks.append(_timed("kraus_independent", 1e-12, lambda: (kraus_max_error(seed), "")))

    checks.append(_timed("sagnac_phase", SAGNAC_TOL, lambda: (sagnac_phase_error()[0], "")))
    checks.append(
        _timed("sagnac_zero_rotation", SAGNAC_ZERO_TOL, lambda: (sagnac_phase_error()[1], ""))
    )
    checks.append(
        _timed("sagnac_speed_independence", SAGNAC_K0_TOL, lambda: (sagnac_speed_spread(), ""))
    )

    def mc_check():
        z = monte_carlo_zscores(seed, threads)
        worst = max(z, key=lambda item: item[1])
        return worst[1], f"worst case n={worst[0][0]} p={worst[0][1]}, seed={seed}"

    checks.append(_timed("logical_error_monte_carlo", MC_SIGMAS, mc_check))
    checks.append(_timed("n_opt_scan_vs_formula", 1.0, lambda: (max(nopt_errors()), "")))
    checks.append(_timed("logical_qfi_n1_reduction", 1e-15, lambda: (n1_reduction_error(), "")))
    return checks


def report(checks):
    lines = [c.line() for c in checks]
    failed = sum(not c.passed for c in checks)
    lines.append(f"{len(checks) - failed}/{len(checks)} checks passed")
    return "\n".join(lines)
