"""Run configurations: JSON schema, embedded presets and validation.

Every command takes a flat JSON object. Grids are either an explicit list of
numbers or ``{"start": a, "stop": b, "count": k, "spacing": "linear"|"log"}``.
Integer grids (``total_qubits`` in panel b) also accept ``"multiple_of"``:
an integer, or ``"block"`` to snap each curve to multiples of its own block
size. Validation happens up front and reports the offending field as a dotted path,
so no computation starts on a bad config.

The ``fig2a``/``fig2b`` presets sample gamma*tau on (0, 3] with step 0.001,
so every GHZ optimum 3/(2N) for N <= 5 is a grid point.
"""

from __future__ import annotations

import copy
import json
import math

import numpy as np

from .dephasing import MODES
from .errors import ConfigError
from .models import PROBES

GRID_KEYS = {"start", "stop", "count", "spacing"}

PRESETS = {
    "fig2a": {
        "command": "qfi-scan",
        "probe": "ghz",
        "lam": 2.0,
        "mode": "independent",
        "nqubits": [1, 2, 3, 4, 5],
        "gamma_tau": {"start": 0.001, "stop": 3.0, "count": 3000, "spacing": "linear"},
    },
    "fig2b": {
        "command": "qfi-scan",
        "probe": "uncorrelated",
        "lam": 2.0,
        "mode": "independent",
        "nqubits": [1, 2, 3, 4, 5],
        "gamma_tau": {"start": 0.001, "stop": 3.0, "count": 3000, "spacing": "linear"},
    },
    "fig3a": {
        "command": "qec-curves",
        "panel": "a",
        "total_qubits": 15,
        "block_sizes": [1, 3, 5, 15],
        "gamma_tau": {"start": 0.001, "stop": 1.0, "count": 1000, "spacing": "log"},
    },
    "fig3b": {
        "command": "qec-curves",
        "panel": "b",
        "gamma_tau": 0.1,
        "block_sizes": [1, 3, 5, 15],
        "total_qubits": {
            "start": 1,
            "stop": 1e9,
            "count": 400,
            "spacing": "log",
            "multiple_of": "block",
        },
        "include_optimum": True,
    },
    "sagnac-default": {
        "command": "sagnac-sim",
        "k0": 50,
        "sigma": 0.1,
        "hbar": 1.0,
        "mass": 1.0,
        "radius": 1.0,
        "l_max": None,
        "omega": [0.0, 0.005, 0.01, 0.02, 0.05],
    },
    "scaling-default": {
        "command": "scaling-table",
        "lams": [0.4, 1.0, 1.5, 2.0, 3.0],
        "modes": ["independent", "collective"],
        "nqubits": [1, 2, 4, 8, 16, 32],
        "prefactor": 1.0,
        "strength": 1.0,
    },
}

DEFAULT_PRESET = {
    "qfi-scan": "fig2a",
    "qec-curves": "fig3b",
    "sagnac-sim": "sagnac-default",
    "scaling-table": "scaling-default",
}


def _fail(path, message):
    raise ConfigError(path, message)


def _number(cfg, key, path, positive=False, nonneg=False):
    v = cfg.get(key)
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        _fail(f"{path}{key}", f"expected a finite number, got {v!r}")
    if positive and not v > 0:
        _fail(f"{path}{key}", f"must be > 0, got {v!r}")
    if nonneg and not v >= 0:
        _fail(f"{path}{key}", f"must be >= 0, got {v!r}")
    return float(v)


def _integer(value, path, minimum=1):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or value != int(value):
        _fail(path, f"expected an integer, got {value!r}")
    if value < minimum:
        _fail(path, f"must be >= {minimum}, got {value!r}")
    return int(value)


def _int_list(cfg, key, path, minimum=1):
    v = cfg.get(key)
    if not isinstance(v, list) or not v:
        _fail(f"{path}{key}", "expected a non-empty list of integers")
    return [_integer(x, f"{path}{key}[{i}]", minimum) for i, x in enumerate(v)]


def _choice(cfg, key, path, options):
    v = cfg.get(key)
    if v not in options:
        _fail(f"{path}{key}", f"expected one of {list(options)}, got {v!r}")
    return v


def expand_grid(spec, path, positive=True):
    """Turn a grid spec into a strictly increasing float array."""
    if isinstance(spec, list):
        if len(spec) < 1:
            _fail(path, "grid list is empty")
        for i, x in enumerate(spec):
            if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
                _fail(f"{path}[{i}]", f"expected a finite number, got {x!r}")
        values = np.array(spec, dtype=float)
    elif isinstance(spec, dict):
        extra = set(spec) - GRID_KEYS
        if extra:
            _fail(path, f"unknown grid keys {sorted(extra)}")
        start = _number(spec, "start", path + ".")
        stop = _number(spec, "stop", path + ".")
        count = _integer(spec.get("count"), path + ".count", minimum=2)
        spacing = spec.get("spacing", "linear")
        if spacing == "linear":
            values = np.linspace(start, stop, count)
        elif spacing == "log":
            if not (start > 0 and stop > 0):
                _fail(path, "log grids need positive start and stop")
            values = np.geomspace(start, stop, count)
        else:
            _fail(path + ".spacing", f"expected 'linear' or 'log', got {spacing!r}")
    else:
        _fail(path, f"expected a list or a grid object, got {spec!r}")
    if values.size > 1 and np.any(np.diff(values) <= 0):
        _fail(path, "grid must be strictly increasing")
    if positive and np.any(values <= 0):
        _fail(path, "grid values must be positive")
    if not positive and np.any(values < 0):
        _fail(path, "grid values must be non-negative")
    return values


def _check_keys(cfg, allowed):
    extra = set(cfg) - set(allowed) - {"command"}
    if extra:
        _fail(sorted(extra)[0], "unknown field")


def validate_qfi_scan(cfg):
    _check_keys(cfg, ("probe", "lam", "mode", "nqubits", "gamma_tau", "strength", "prefactor"))
    _choice(cfg, "probe", "", PROBES)
    _choice(cfg, "mode", "", MODES)
    if cfg["probe"] == "uncorrelated" and cfg["mode"] == "collective":
        _fail("mode", "uncorrelated probes have no closed form under collective dephasing")
    _number(cfg, "lam", "", positive=True)
    _int_list(cfg, "nqubits", "")
    expand_grid(cfg.get("gamma_tau"), "gamma_tau")


def validate_qec_curves(cfg):
    panel = _choice(cfg, "panel", "", ("a", "b"))
    blocks = _int_list(cfg, "block_sizes", "")
    for i, n in enumerate(blocks):
        if n % 2 == 0:
            _fail(f"block_sizes[{i}]", f"block size must be odd, got {n}")
    if panel == "a":
        _check_keys(cfg, ("panel", "block_sizes", "total_qubits", "gamma_tau"))
        _integer(cfg.get("total_qubits"), "total_qubits")
        expand_grid(cfg.get("gamma_tau"), "gamma_tau")
    else:
        _check_keys(cfg, ("panel", "block_sizes", "total_qubits", "gamma_tau", "include_optimum"))
        gt = _number(cfg, "gamma_tau", "", positive=True)
        if gt >= 50:
            _fail("gamma_tau", "phase-flip probability indistinguishable from 1/2")
        grid = cfg.get("total_qubits")
        if isinstance(grid, dict) and "multiple_of" in grid:
            grid = dict(grid)
            step = grid.pop("multiple_of")
            if step != "block":
                _integer(step, "total_qubits.multiple_of")
        expand_grid(grid, "total_qubits")
        if not isinstance(cfg.get("include_optimum", True), bool):
            _fail("include_optimum", "expected a boolean")


def validate_sagnac_sim(cfg):
    _check_keys(cfg, ("k0", "sigma", "hbar", "mass", "radius", "l_max", "omega"))
    _integer(cfg.get("k0"), "k0")
    sigma = _number(cfg, "sigma", "", positive=True)
    if sigma > math.pi / 4:
        _fail("sigma", "must lie in (0, pi/4]")
    for key in ("hbar", "mass", "radius"):
        _number(cfg, key, "", positive=True)
    if cfg.get("l_max") is not None:
        lmax = _integer(cfg["l_max"], "l_max")
        need = int(cfg["k0"] + math.ceil(8.0 / sigma))
        if lmax < need:
            _fail("l_max", f"must be >= k0 + ceil(8/sigma) = {need}")
    expand_grid(cfg.get("omega"), "omega", positive=False)


def validate_scaling_table(cfg):
    _check_keys(cfg, ("lams", "modes", "nqubits", "prefactor", "strength"))
    lams = cfg.get("lams")
    if not isinstance(lams, list) or not lams:
        _fail("lams", "expected a non-empty list")
    for i, lam in enumerate(lams):
        if isinstance(lam, bool) or not isinstance(lam, (int, float)) or not lam > 0:
            _fail(f"lams[{i}]", "lambda must be > 0")
    modes = cfg.get("modes")
    if not isinstance(modes, list) or not modes:
        _fail("modes", "expected a non-empty list")
    for i, m in enumerate(modes):
        if m not in MODES:
            _fail(f"modes[{i}]", f"expected one of {list(MODES)}, got {m!r}")
    ns = _int_list(cfg, "nqubits", "")
    if len(ns) < 2 or any(b <= a for a, b in zip(ns, ns[1:])):
        _fail("nqubits", "need at least two strictly increasing qubit numbers for the fit")


VALIDATORS = {
    "qfi-scan": validate_qfi_scan,
    "qec-curves": validate_qec_curves,
    "sagnac-sim": validate_sagnac_sim,
    "scaling-table": validate_scaling_table,
}

OPTIONAL_DEFAULTS = {
    "qfi-scan": {"strength": 1.0, "prefactor": 1.0},
    "qec-curves": {},
    "sagnac-sim": {"hbar": 1.0, "mass": 1.0, "radius": 1.0, "l_max": None},
    "scaling-table": {"prefactor": 1.0, "strength": 1.0},
}


def resolve(command, preset=None, config_path=None):
    """Build the fully resolved config for ``command``.

    The preset (or the command's default preset when no config file is given)
    supplies the base; fields from the config file override it.
    """
    if command not in VALIDATORS:
        _fail("command", f"unknown command {command!r}")
    base = {}
    if preset is not None:
        if preset not in PRESETS:
            _fail("preset", f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
        base = copy.deepcopy(PRESETS[preset])
        if base["command"] != command:
            _fail("preset", f"preset {preset!r} belongs to command {base['command']!r}")
    elif config_path is None:
        base = copy.deepcopy(PRESETS[DEFAULT_PRESET[command]])
    if config_path is not None:
        try:
            with open(config_path) as fh:
                user = json.load(fh)
        except OSError as exc:
            _fail("config", f"cannot read {config_path}: {exc.strerror}")
        except json.JSONDecodeError as exc:
            _fail("config", f"invalid JSON at line {exc.lineno}: {exc.msg}")
        if not isinstance(user, dict):
            _fail("config", "top level must be a JSON object")
        if user.get("command", command) != command:
            _fail("command", f"config is for {user['command']!r}, not {command!r}")
        base.update(user)
    base["command"] = command
    for key, value in OPTIONAL_DEFAULTS[command].items():
        base.setdefault(key, value)
    VALIDATORS[command](base)
    return base
