"""Run configuration: JSON schema, validation, defaults.

A config file is a JSON object with an explicit ``schema_version`` and
optional sections; unknown keys anywhere are rejected so that typos
cannot silently fall back to defaults.  All defaults reproduce the
standard operating point of the library (10 atoms on 200 sites,
Gamma_1D = 0.3, J = 4, L = 100, Omega_c = 2, 1000 disorder samples).
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .model import PhysicalParams

__all__ = ["SCHEMA_VERSION", "load_config", "resolve_config",
           "params_from_config", "delta_grid_from_config"]

SCHEMA_VERSION = 1

_PHYSICAL_DEFAULTS = {
    "gamma_1d": 0.3,
    "gamma_e_prime": 1.0,
    "j_strength": 4.0,
    "int_length": 100.0,
    "omega_c": 2.0,
    "delta_c": 0.0,
    "k0_d": math.pi / 2,
    "kb_d": math.pi,
    "gamma_d": 0.0,
    "gamma_em": 0.0,
    "sigma_ih": 0.0,
    "drive_amp": 1.5e-5,
    "n_sites": 200,
}

_ENSEMBLE_DEFAULTS = {
    "mode": "fixed",
    "n": 10,
    "n_mean": None,
    "samples": 1000,
    "master_seed": 0,
    "solver": "coherent",
}

_SPECTRUM_DEFAULTS = {
    "delta_min": -10.0,
    "delta_max": 50.0,
    "delta_step": 0.1,
}

_SWEEP_DEFAULTS = {
    "axis": None,
    "values": None,
}

_G2_DEFAULTS = {
    "delta": "auto",
    "tau_max": 20.0,
    "tau_points": 512,
    "field": "reflected",
}

_ANALYSIS_DEFAULTS = {
    "prominence": 0.02,
    "min_depth": 0.05,
    "window": None,
    "input": None,
}

_OUTPUT_DEFAULTS = {
    "dir": ".",
}

_SECTIONS = {
    "physical": _PHYSICAL_DEFAULTS,
    "ensemble": _ENSEMBLE_DEFAULTS,
    "spectrum": _SPECTRUM_DEFAULTS,
    "sweep": _SWEEP_DEFAULTS,
    "g2": _G2_DEFAULTS,
    "analysis": _ANALYSIS_DEFAULTS,
    "output": _OUTPUT_DEFAULTS,
}

_INT_KEYS = {"n_sites", "n", "samples", "master_seed", "tau_points"}
_STRING_KEYS = {"mode", "solver", "axis", "delta", "field", "input", "dir"}
_ENUMS = {
    "mode": ("fixed", "poisson"),
    "solver": ("coherent", "lindblad"),
    "field": ("reflected", "transmitted"),
    "axis": ("n", "n_mean", "sigma_ih", "gamma_d", "j_strength", "gamma_em",
             "int_length", "omega_c"),
}
_NULLABLE = {"n", "n_mean", "axis", "values", "window", "input"}


def _check_value(section: str, key: str, value):
    path = f"{section}.{key}"
    if value is None:
        if key in _NULLABLE:
            return value
        raise ConfigError(f"{path} must not be null")
    if key == "delta":   # g2.delta: "auto" or a number
        if isinstance(value, str):
            if value != "auto":
                raise ConfigError(f'{path} must be "auto" or a number')
            return value
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f'{path} must be "auto" or a number')
        return float(value)
    if key == "values":
        if not isinstance(value, list) or len(value) < 2:
            raise ConfigError(f"{path} must be a list with at least 2 entries")
        out = []
        for item in value:
            if isinstance(item, bool) or not isinstance(item, (int, float)):
                raise ConfigError(f"{path} entries must be numbers")
            out.append(item)
        return out
    if key == "window":
        if (not isinstance(value, list) or len(value) != 2
                or any(isinstance(v, bool) or not isinstance(v, (int, float))
                       for v in value)):
            raise ConfigError(f"{path} must be a [low, high] pair")
        return [float(value[0]), float(value[1])]
    if key in _STRING_KEYS:
        if not isinstance(value, str):
            raise ConfigError(f"{path} must be a string")
        if key in _ENUMS and value not in _ENUMS[key]:
            raise ConfigError(
                f"{path} must be one of {_ENUMS[key]}, got {value!r}")
        return value
    if key in _INT_KEYS:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{path} must be an integer")
        return value
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path} must be a number")
    return float(value)


def resolve_config(raw: dict) -> dict:
    """Validate a raw config dict and merge in all defaults."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(raw) - set(_SECTIONS) - {"schema_version"}
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
    version = raw.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(
            f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})")
    resolved = {"schema_version": SCHEMA_VERSION}
    for section, defaults in _SECTIONS.items():
        given = raw.get(section, {})
        if not isinstance(given, dict):
            raise ConfigError(f"section {section!r} must be an object")
        unknown = set(given) - set(defaults)
        if unknown:
            raise ConfigError(
                f"unknown keys in {section!r}: {sorted(unknown)}")
        merged = {}
        for key, default in defaults.items():
            if key in given:
                merged[key] = _check_value(section, key, given[key])
            else:
                merged[key] = default
        resolved[section] = merged
    ens = resolved["ensemble"]
    if ens["mode"] == "fixed" and ens["n"] is None:
        raise ConfigError("ensemble.n is required in fixed mode")
    if ens["mode"] == "poisson" and ens["n_mean"] is None:
        raise ConfigError("ensemble.n_mean is required in poisson mode")
    return resolved


def load_config(path: str | Path | None) -> dict:
    """Load and resolve a config file; None means all defaults."""
    if path is None:
        return resolve_config({})
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"config parse error at line {exc.lineno} column {exc.colno}: "
            f"{exc.msg}") from exc
    return resolve_config(raw)


def params_from_config(cfg: dict) -> PhysicalParams:
    try:
        return PhysicalParams(**cfg["physical"])
    except ValueError as exc:
        raise ConfigError(f"invalid physical parameters: {exc}") from exc


def delta_grid_from_config(cfg: dict) -> np.ndarray:
    spec = cfg["spectrum"]
    lo, hi, step = spec["delta_min"], spec["delta_max"], spec["delta_step"]
    if step <= 0:
        raise ConfigError("spectrum.delta_step must be > 0")
    if hi < lo:
        raise ConfigError("spectrum.delta_max must be >= delta_min")
    count = int(round((hi - lo) / step)) + 1
    return lo + step * np.arange(count)
