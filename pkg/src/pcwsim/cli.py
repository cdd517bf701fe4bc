"""Command-line entry points and bit-stable result serialization.

Subcommands: spectrum (ensemble T/R over a detuning grid), sweep (one
parameter axis, dip report per value), g2 (photon-photon correlation at
a working detuning), analyze (dip report for an existing spectrum CSV).

Outputs are a CSV table (UTF-8, comma separated, LF endings, 17
significant digits) plus a JSON summary that echoes the fully resolved
configuration, so a run can be replayed and diffed byte for byte.
Exit codes: 0 success, 2 configuration error, 3 solver-failure
threshold exceeded, 4 no usable signal for g2.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import analysis
from .config import (delta_grid_from_config, load_config, params_from_config)
from .ensemble import EnsembleSpec, run_ensemble, run_g2_ensemble
from .errors import (ConfigError, EnsembleFailureError, PcwsimError,
                     WeakReflectionError)

__all__ = ["main"]

WORKERS_ENV_VAR = "PCWSIM_WORKERS"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_NO_SIGNAL = 4


def _fmt(value) -> str:
    """Fixed 17-significant-digit float formatting (round-trip exact)."""
    return format(float(value), ".17g")


def _write_csv(path: Path, header, columns) -> None:
    lines = [",".join(header)]
    rows = zip(*columns)
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8",
                    newline="\n")


def _jsonable(value):
    if value is None or isinstance(value, (bool, int, str)):
        return value
    if isinstance(value, float):
        return value
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if dataclasses.is_dataclass(value):
        return {f.name: _jsonable(getattr(value, f.name))
                for f in dataclasses.fields(value)}
    raise TypeError(f"cannot serialize {type(value)!r}")


def _ensemble_spec(cfg, delta_grid) -> EnsembleSpec:
    ens = cfg["ensemble"]
    try:
        return EnsembleSpec(
            mode=ens["mode"], samples=ens["samples"], delta_grid=delta_grid,
            master_seed=ens["master_seed"], n=ens["n"], n_mean=ens["n_mean"],
            solver=ens["solver"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _spacing_window(cfg, params):
    window = cfg["analysis"]["window"]
    if window is not None:
        return tuple(window)
    ens = cfg["ensemble"]
    n_bar = ens["n_mean"] if ens["mode"] == "poisson" else ens["n"]
    j = params.j_strength
    if n_bar is None or j == 0:
        return None
    return (n_bar * j - 4 * j, n_bar * j + 4 * j)


def _progress(stream):
    def hook(done, total):
        if done == total or done % max(1, total // 20) == 0:
            print(f"  {done}/{total} samples", file=stream, flush=True)
    return hook


def cmd_spectrum(cfg, workers, out_dir: Path) -> int:
    params = params_from_config(cfg)
    grid = delta_grid_from_config(cfg)
    spec = _ensemble_spec(cfg, grid)
    result = run_ensemble(spec, params, workers=workers,
                          progress=_progress(sys.stderr))
    _write_csv(out_dir / "spectrum.csv",
               ["delta", "T_mean", "T_stderr", "R_mean", "R_stderr"],
               [result.delta, result.t_mean, result.t_stderr,
                result.r_mean, result.r_stderr])
    report = analysis.analyze_spectrum(
        result.delta, result.t_mean,
        prominence=cfg["analysis"]["prominence"],
        min_depth=cfg["analysis"]["min_depth"],
        spacing_window=_spacing_window(cfg, params))
    _write_json(out_dir / "spectrum_summary.json", {
        "command": "spectrum",
        "config": cfg,
        "samples": result.samples,
        "failures": result.failures,
        "report": _jsonable(report),
    })
    print(f"wrote {out_dir / 'spectrum.csv'} and "
          f"{out_dir / 'spectrum_summary.json'}")
    return EXIT_OK


_SWEEP_ENSEMBLE_AXES = {"n": "n", "n_mean": "n_mean"}


def _sweep_point(cfg, axis, value):
    """Config for one sweep point: the axis value lands in the right section."""
    point = json.loads(json.dumps(cfg))  # deep copy, JSON-native by design
    if axis in _SWEEP_ENSEMBLE_AXES:
        if axis == "n":
            point["ensemble"]["mode"] = "fixed"
            point["ensemble"]["n"] = int(value)
        else:
            point["ensemble"]["mode"] = "poisson"
            point["ensemble"]["n_mean"] = float(value)
    else:
        point["physical"][axis] = float(value)
    return point


def cmd_sweep(cfg, workers, out_dir: Path) -> int:
    axis = cfg["sweep"]["axis"]
    values = cfg["sweep"]["values"]
    if axis is None or values is None:
        raise ConfigError("sweep.axis and sweep.values are required")
    rows = []
    for value in values:
        point = _sweep_point(cfg, axis, value)
        params = params_from_config(point)
        grid = delta_grid_from_config(point)
        spec = _ensemble_spec(point, grid)
        result = run_ensemble(spec, params, workers=workers,
                              progress=_progress(sys.stderr))
        report = analysis.analyze_spectrum(
            result.delta, result.t_mean,
            prominence=point["analysis"]["prominence"],
            min_depth=point["analysis"]["min_depth"],
            spacing_window=_spacing_window(point, params))
        rows.append((value, report))
        loc = "none" if report.omega_max is None else _fmt(report.omega_max)
        print(f"{axis}={value:g}: omega_max={loc}", file=sys.stderr)

    nan = float("nan")
    _write_csv(out_dir / "sweep.csv",
               [axis, "omega_max", "T_peak", "T_dip", "spacing_S", "n_dips"],
               [[v for v, _ in rows],
                [r.omega_max if r.omega_max is not None else nan
                 for _, r in rows],
                [r.t_peak if r.t_peak is not None else nan for _, r in rows],
                [r.t_dip if r.t_dip is not None else nan for _, r in rows],
                [r.spacing if r.spacing is not None else nan for _, r in rows],
                [len(r.dips) for _, r in rows]])
    fit = None
    if axis in _SWEEP_ENSEMBLE_AXES:
        points = [(v, r.omega_max) for v, r in rows if r.omega_max is not None]
        if len(points) >= 3:
            fit = analysis.fit_omega_vs_n(points)
    _write_json(out_dir / "sweep_summary.json", {
        "command": "sweep",
        "config": cfg,
        "axis": axis,
        "rows": [{"value": _jsonable(v), "report": _jsonable(r)}
                 for v, r in rows],
        "fit": _jsonable(fit) if fit is not None else None,
    })
    print(f"wrote {out_dir / 'sweep.csv'} and {out_dir / 'sweep_summary.json'}")
    return EXIT_OK


def cmd_g2(cfg, workers, out_dir: Path) -> int:
    params = params_from_config(cfg)
    g2cfg = cfg["g2"]
    delta = g2cfg["delta"]
    if delta == "auto":
        grid = delta_grid_from_config(cfg)
        spec = _ensemble_spec(cfg, grid)
        result = run_ensemble(spec, params, workers=workers,
                              progress=_progress(sys.stderr))
        located = analysis.locate_omega_max(
            analysis.find_dips(result.delta, result.t_mean,
                               prominence=cfg["analysis"]["prominence"],
                               min_depth=cfg["analysis"]["min_depth"]),
            min_depth=cfg["analysis"]["min_depth"])
        if located is None:
            raise WeakReflectionError(
                "no qualifying dip found to set the working detuning; "
                "set g2.delta explicitly")
        delta = located
        print(f"auto-located working detuning delta={_fmt(delta)}",
              file=sys.stderr)
    tau = np.linspace(0.0, g2cfg["tau_max"], g2cfg["tau_points"])
    spec = _ensemble_spec(cfg, np.array([float(delta)]))
    reflected = g2cfg["field"] == "reflected"
    result = run_g2_ensemble(spec, params, float(delta), tau,
                             reflected=reflected, workers=workers,
                             progress=_progress(sys.stderr))
    column = "g2_R" if reflected else "g2_T"
    _write_csv(out_dir / "g2.csv", ["tau", column],
               [result.tau, result.g2_mean])
    beat = analysis.dominant_beat_frequency(result.tau, result.g2_mean)
    _write_json(out_dir / "g2_summary.json", {
        "command": "g2",
        "config": cfg,
        "delta": _jsonable(result.delta),
        "field": g2cfg["field"],
        "g2_zero": _jsonable(result.g2_mean[0]),
        "beat_frequency": _jsonable(beat),
        "samples": result.samples,
        "failures": result.failures,
    })
    print(f"wrote {out_dir / 'g2.csv'} and {out_dir / 'g2_summary.json'}")
    return EXIT_OK


def cmd_analyze(cfg, workers, out_dir: Path) -> int:
    del workers
    source = cfg["analysis"]["input"]
    if source is None:
        raise ConfigError("analysis.input (a spectrum CSV path) is required")
    try:
        with open(source, encoding="utf-8") as fh:
            header = fh.readline().strip().split(",")
            data = np.loadtxt(fh, delimiter=",", ndmin=2)
    except OSError as exc:
        raise ConfigError(f"cannot read {source}: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"malformed CSV {source}: {exc}") from exc
    try:
        delta = data[:, header.index("delta")]
        t_mean = data[:, header.index("T_mean")]
    except ValueError as exc:
        raise ConfigError(
            f"{source} must have 'delta' and 'T_mean' columns") from exc
    params = params_from_config(cfg)
    report = analysis.analyze_spectrum(
        delta, t_mean,
        prominence=cfg["analysis"]["prominence"],
        min_depth=cfg["analysis"]["min_depth"],
        spacing_window=_spacing_window(cfg, params))
    _write_json(out_dir / "analysis_report.json", {
        "command": "analyze",
        "config": cfg,
        "input": str(source),
        "report": _jsonable(report),
    })
    print(f"wrote {out_dir / 'analysis_report.json'}")
    return EXIT_OK


_COMMANDS = {
    "spectrum": cmd_spectrum,
    "sweep": cmd_sweep,
    "g2": cmd_g2,
    "analyze": cmd_analyze,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pcwsim",
        description="Transmission spectra and photon correlations of an "
                    "atom chain coupled to a photonic-crystal waveguide")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
            ("spectrum", "ensemble-averaged T/R over a detuning grid"),
            ("sweep", "dip report along one swept parameter axis"),
            ("g2", "photon-photon correlation of an output field"),
            ("analyze", "dip report for an existing spectrum CSV")):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", type=Path, default=None,
                         help="JSON run configuration (defaults when omitted)")
        cmd.add_argument("--seed", type=int, default=None,
                         help="override ensemble.master_seed")
        cmd.add_argument("--workers", type=int, default=None,
                         help=f"worker processes (default ${WORKERS_ENV_VAR} or 1)")
        cmd.add_argument("--out", type=Path, default=Path("."),
                         help="output directory (created if missing)")
    return parser


def _resolve_workers(flag_value) -> int:
    if flag_value is not None:
        value = flag_value
    else:
        env = os.environ.get(WORKERS_ENV_VAR)
        if env is None:
            return 1
        try:
            value = int(env)
        except ValueError as exc:
            raise ConfigError(
                f"{WORKERS_ENV_VAR} must be an integer, got {env!r}") from exc
    if value < 1:
        raise ConfigError(f"workers must be >= 1, got {value}")
    return value


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            if args.seed < 0 or args.seed >= 2**64:
                raise ConfigError("--seed must fit in an unsigned 64-bit int")
            cfg["ensemble"]["master_seed"] = args.seed
        workers = _resolve_workers(args.workers)
        out_dir = args.out
        out_dir.mkdir(parents=True, exist_ok=True)
        return _COMMANDS[args.command](cfg, workers, out_dir)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EnsembleFailureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except WeakReflectionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_SIGNAL
    except PcwsimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
