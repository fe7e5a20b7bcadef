"""Optional figure rendering for CLI datasets (``--plot``).

The CSV is the product; figures are a convenience view of the same rows.
matplotlib is imported lazily with the Agg backend so the library itself
never needs a display or the plotting dependency.
"""

from __future__ import annotations

import math
from collections import defaultdict


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _group(ds, key, x, y, skip=()):
    out = defaultdict(lambda: ([], []))
    ki, xi, yi = (ds.columns.index(c) for c in (key, x, y))
    si = [ds.columns.index(c) for c in skip]
    for row in ds.rows:
        if any(row[i] for i in si):
            continue
        if isinstance(row[yi], float) and not math.isfinite(row[yi]):
            continue
        xs, ys = out[row[ki]]
        xs.append(row[xi])
        ys.append(row[yi])
    return out


def _qfi_scan(ds, ax):
    for n, (xs, ys) in _group(ds, "N", "gamma_tau", "f_over_tau").items():
        ax.plot(xs, ys, label=f"N = {n}")
    ax.set_xlabel(r"$\gamma\tau$")
    ax.set_ylabel(f"F/tau [{ds.units['f_over_tau']}]")


def _qec_curves(ds, ax):
    panel_b = ds.provenance.get("config", {}).get("panel") == "b"
    x = "N" if panel_b else "gamma_tau"
    groups = _group(ds, "n", x, "qcrb", skip=("skipped", "overflow"))
    lowest = min((min(ys) for _, ys in groups.values() if ys), default=1.0)
    # the exponential blow-up past N_opt would otherwise swamp the axis
    cap = lowest * 1e8
    for n, (xs, ys) in groups.items():
        kept = [(x_, y_) for x_, y_ in zip(xs, ys) if y_ <= cap]
        ax.loglog([k[0] for k in kept], [k[1] for k in kept], label=f"n = {n}")
    ax.set_ylim(lowest / 3, cap)
    ax.set_xlabel("N" if panel_b else r"$\gamma\tau$")
    ax.set_ylabel(r"$\delta\Omega\sqrt{T}$" + f" [{ds.units['qcrb']}]")


def _sagnac_sim(ds, ax):
    rows = [r for r in ds.rows if not r[ds.columns.index("truncation_error")]]
    omega = [r[0] for r in rows]
    ax.plot(omega, [r[1] for r in rows], "o", label="simulated")
    ax.plot(omega, [r[2] for r in rows], "-", label="2 m Omega A / hbar")
    ax.set_xlabel("Omega")
    ax.set_ylabel("phase [rad]")


def _scaling_table(ds, ax):
    groups = defaultdict(lambda: ([], []))
    for row in ds.rows:
        if row[-1]:
            continue
        xs, ys = groups[(row[0], row[1])]
        xs.append(row[2])
        ys.append(row[4])
    for (lam, mode), (xs, ys) in groups.items():
        ax.loglog(xs, ys, marker="o", label=f"lambda = {lam:g}, {mode}")
    ax.set_xlabel("N")
    ax.set_ylabel("(F/tau)_opt")


RENDERERS = {
    "qfi-scan": _qfi_scan,
    "qec-curves": _qec_curves,
    "sagnac-sim": _sagnac_sim,
    "scaling-table": _scaling_table,
}


def render(ds, path):
    """Draw ``ds`` according to the command that produced it and save to ``path``."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    RENDERERS[ds.provenance["command"]](ds, ax)
    ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
