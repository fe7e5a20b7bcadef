"""Dataset builders behind the CLI commands.

Each ``cmd_*`` takes a resolved config (see :mod:`interferoq.config`) and
returns a :class:`CurveDataset`. Rows are produced in grid order; when a
sweep runs on several threads the results are collected in that order too.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .config import expand_grid
from .datasets import CurveDataset, config_hash
from .errors import NoOptimumError, TruncationError
from .models import InterferometerSpec, optimal_interrogation, scaling_exponent, scan_f_over_tau
from .qec import QecCode, log_logical_coherence, optimal_total_qubits_at
from .sagnac import RingParams, simulate_sagnac


def provenance(config, **extra):
    out = {
        "version": __version__,
        "command": config["command"],
        "config": config,
        "config_sha256": config_hash(config),
    }
    out.update(extra)
    return out


def _map(fn, items, threads):
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _power_label(exponent):
    return f"{exponent:g}"


def cmd_qfi_scan(config, threads=1):
    lam = float(config["lam"])
    c = float(config["prefactor"])
    gamma = float(config["strength"])
    gamma_tau = expand_grid(config["gamma_tau"], "gamma_tau")
    unit = (
        "beta^2/gamma^3"
        if lam == 2.0
        else f"c^2/gamma^{_power_label(2 * lam - 1)}"
    )
    ds = CurveDataset(
        columns=["probe", "N", "gamma_tau", "f_over_tau", "is_argmax"],
        units={
            "probe": "label",
            "N": "qubits",
            "gamma_tau": "dimensionless",
            "f_over_tau": unit,
            "is_argmax": "flag",
        },
        provenance=provenance(config),
    )
    scale = c**2 / gamma ** (2 * lam - 1)
    for n in config["nqubits"]:
        spec = InterferometerSpec(lam, c, n, config["mode"], gamma, config["probe"])
        curve = scan_f_over_tau(spec, gamma_tau / gamma)
        values = curve.f_over_tau / scale
        for i, (x, y) in enumerate(zip(gamma_tau, values)):
            ds.add(config["probe"], n, float(x), float(y), i == curve.argmax)
    return ds


QEC_COLUMNS = ["n", "N", "gamma_tau", "qcrb", "log10_qcrb", "is_min", "skipped", "overflow"]
QEC_UNITS = {
    "n": "qubits per block",
    "N": "qubits",
    "gamma_tau": "dimensionless",
    "qcrb": "gamma^(3/2)/beta",
    "log10_qcrb": "log10(gamma^(3/2)/beta)",
    "is_min": "flag",
    "skipped": "flag",
    "overflow": "flag",
}


def log_qcrb(n, big_n, gamma_tau):
    """ln of delta Omega sqrt(T) with beta = gamma = 1, safe from underflow of F_L."""
    tau = gamma_tau
    log_f = 2.0 * math.log(big_n * tau**2) + 2.0 * big_n / n * log_logical_coherence(n, 1.0, tau)
    return -0.5 * (log_f - math.log(tau))


def _qec_row(n, big_n, gamma_tau):
    ln_q = log_qcrb(n, big_n, gamma_tau)
    value = math.exp(ln_q) if ln_q < 709.0 else math.inf
    return [n, big_n, float(gamma_tau), value, ln_q / math.log(10), False, False, math.isinf(value)]


def _flag_minimum(rows):
    live = [r for r in rows if not r[6]]
    if live:
        best = min(live, key=lambda r: r[4])
        best[5] = True


def integer_grid(spec, path, block=1):
    """Positive integers from a grid spec; ``multiple_of`` snaps to multiples.

    ``"multiple_of": "block"`` snaps to multiples of the block size ``block``.
    """
    step = 1
    if isinstance(spec, dict) and "multiple_of" in spec:
        spec = dict(spec)
        step = spec.pop("multiple_of")
        step = block if step == "block" else step
    values = expand_grid(spec, path) / step
    values = np.unique(np.maximum(np.rint(values), 1).astype(np.int64)) * step
    return [int(v) for v in values]


def cmd_qec_curves(config, threads=1):
    ds = CurveDataset(
        columns=list(QEC_COLUMNS),
        units=dict(QEC_UNITS),
        provenance=provenance(config),
        flag_columns=("skipped", "overflow"),
    )
    nan = math.nan
    if config["panel"] == "a":
        big_n = int(config["total_qubits"])
        grid = expand_grid(config["gamma_tau"], "gamma_tau")
        for n in config["block_sizes"]:
            if big_n % n:
                ds.add(n, big_n, nan, nan, nan, False, True, False)
                continue
            QecCode(n, big_n)
            rows = _map(lambda x, n=n: _qec_row(n, big_n, x), grid, threads)
            _flag_minimum(rows)
            ds.rows.extend(rows)
        return ds

    gamma_tau = float(config["gamma_tau"])
    for n in config["block_sizes"]:
        wanted = set(integer_grid(config["total_qubits"], "total_qubits", block=n))
        if config.get("include_optimum", True):
            n_opt, _ = optimal_total_qubits_at(n, gamma_tau)
            wanted.add(n_opt)
        rows = []
        for big_n in sorted(wanted):
            if big_n % n:
                rows.append([n, big_n, gamma_tau, nan, nan, False, True, False])
            else:
                rows.append(_qec_row(n, big_n, gamma_tau))
        _flag_minimum(rows)
        ds.rows.extend(rows)
    return ds


def _sagnac_row(base, omega):
    try:
        r = simulate_sagnac(base.with_omega(float(omega)))
    except TruncationError as exc:
        nan = math.nan
        return [float(omega), nan, nan, nan, nan, False, True, str(exc)]
    return [
        float(omega),
        r.phase_sim,
        r.phase_predicted,
        r.visibility,
        r.width_at_tau,
        r.condition_ok,
        False,
        "",
    ]


def cmd_sagnac_sim(config, threads=1):
    base = RingParams(
        k0=int(config["k0"]),
        sigma=float(config["sigma"]),
        hbar=float(config["hbar"]),
        mass=float(config["mass"]),
        radius=float(config["radius"]),
        l_max=config.get("l_max"),
    )
    omegas = expand_grid(config["omega"], "omega", positive=False)
    ds = CurveDataset(
        columns=[
            "Omega",
            "phase_sim",
            "phase_predicted",
            "visibility",
            "width_at_tau",
            "condition_ok",
            "truncation_error",
            "diagnostic",
        ],
        units={
            "Omega": "rad/time",
            "phase_sim": "rad",
            "phase_predicted": "rad",
            "visibility": "dimensionless",
            "width_at_tau": "rad",
            "condition_ok": "flag",
            "truncation_error": "flag",
            "diagnostic": "text",
        },
        provenance=provenance(config, l_max_used=base.l_max),
        flag_columns=("truncation_error",),
    )
    ds.rows.extend(_map(lambda w: _sagnac_row(base, w), omegas, threads))
    return ds


def cmd_scaling_table(config, threads=1):
    c = float(config["prefactor"])
    s = float(config["strength"])
    ns = [int(n) for n in config["nqubits"]]
    ds = CurveDataset(
        columns=[
            "lam",
            "mode",
            "N",
            "tau_opt",
            "f_over_tau_opt",
            "fitted_exponent",
            "predicted_exponent",
            "no_optimum",
        ],
        units={
            "lam": "dimensionless",
            "mode": "label",
            "N": "qubits",
            "tau_opt": "1/strength",
            "f_over_tau_opt": "c^2/strength^(2*lam-1)",
            "fitted_exponent": "dimensionless",
            "predicted_exponent": "dimensionless",
            "no_optimum": "flag",
        },
        provenance=provenance(config),
        flag_columns=("no_optimum",),
    )
    nan = math.nan
    for lam in config["lams"]:
        lam = float(lam)
        for mode in config["modes"]:
            try:
                predicted = scaling_exponent(lam, mode)
            except NoOptimumError:
                for n in ns:
                    ds.add(lam, mode, n, nan, nan, nan, nan, True)
                continue
            reports = [optimal_interrogation(InterferometerSpec(lam, c, n, mode, s)) for n in ns]
            f_opt = np.array([r.f_over_tau_opt for r in reports])
            fitted = float(np.polyfit(np.log(ns), np.log(f_opt), 1)[0])
            for n, r in zip(ns, reports):
                ds.add(lam, mode, n, r.tau_opt, r.f_over_tau_opt, fitted, predicted, False)
    return ds


COMMANDS = {
    "qfi-scan": cmd_qfi_scan,
    "qec-curves": cmd_qec_curves,
    "sagnac-sim": cmd_sagnac_sim,
    "scaling-table": cmd_scaling_table,
}
