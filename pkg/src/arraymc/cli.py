"""Command-line front end: configuration, experiment runs, CSV/JSON outputs.

Azimuth convention: angles are measured in degrees from broadside (the
+y axis) toward the array axis, so 90 degrees is end-fire.  Lengths are
meters unless suffixed with `lam`, which scales by the carrier
wavelength (e.g. `0.5lam`).
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import __version__
from ._linalg import jitter_count, reset_jitter_count
from .constants import SPEED_OF_LIGHT
from .em_coupling import (
    ArrayGeometry,
    CouplingModel,
    dipole_self_impedance,
    mutual_impedance,
)
from .mc import Detector, ExperimentSpec, run_sweep
from .multiport import CircuitParams

_EXPERIMENTS = ("azimuth", "spacing", "count", "single")

_DEFAULT_GRIDS = {
    "azimuth": "0:10:90",
    "spacing": "0.05lam:0.05lam:1.0lam",
    "count": "16,32,64,128,256",
    "single": "0",
}

_DEFAULTS = {
    "experiment": "azimuth",
    "frequency": "30e9",
    "bandwidth": "20e6",
    "z_g": "186-31.6j",
    "z_l": "186-31.6j",
    "z_a": "73+42.5j",
    "z_at": "73+42.5j",
    "r_n": "5",
    "rho": "0.2730+0.1793j",
    "t_a": "290",
    "normalization": "1",
    "user_range": "25",
    "user_azimuth": "-30",
    "scatterers": "20",
    "cluster_radius": "3",
    "mod_order": "4",
    "snr_db": "5",
    "n_elements": "128",
    "aperture": "0.5",
    "grid": "",
    "trials": "100000",
    "seed": "1",
    "scene_seed": "",
    "detectors": "NC-M,C-M,NC-MM,C-MM,NC-U,C-U",
    "coupling": "half_wave_dipole",
    "mm_gain": "complex",
    "workers": "",
    "output_dir": ".",
}

_HELP = {
    "experiment": "sweep kind: azimuth (theta grid, degrees from broadside; 90 = end-fire), "
    "spacing (element separation grid), count (antenna count grid at fixed aperture), single",
    "frequency": "carrier frequency, Hz",
    "bandwidth": "equivalent noise bandwidth, Hz",
    "z_g": "generator impedance, Ohm (complex, e.g. 186-31.6j)",
    "z_l": "per-antenna load impedance, Ohm (complex)",
    "z_a": "receive element self-impedance, Ohm (complex)",
    "z_at": "transmit antenna impedance, Ohm (complex)",
    "r_n": "LNA noise resistance, Ohm (> 0)",
    "rho": "LNA voltage/current noise correlation (complex, |rho| <= 1)",
    "t_a": "antenna noise temperature, K",
    "normalization": "signal-space normalization constant, V^2",
    "user_range": "user distance from the array origin, m",
    "user_azimuth": "user azimuth, degrees from broadside",
    "scatterers": "number of scatterers around the user",
    "cluster_radius": "scatterer circle radius, m",
    "mod_order": "unipolar PAM order (>= 2)",
    "snr_db": "average SNR target, dB",
    "n_elements": "antenna count (fixed for azimuth/spacing/single sweeps)",
    "aperture": "array aperture, m or `lam` suffix (fixed for azimuth/count/single sweeps)",
    "grid": "sweep values: comma list or start:step:stop; spacing values take a `lam` suffix",
    "trials": "Monte Carlo trials per sweep point and detector",
    "seed": "master seed for symbol/channel/noise randomness",
    "scene_seed": "separate seed for scatterer placement (defaults to the master seed)",
    "detectors": "comma list from NC-M,C-M,NC-MM,C-MM,NC-U,C-U",
    "coupling": "receive coupling model: half_wave_dipole or uncoupled",
    "mm_gain": "mismatched-detector channel gain: complex (phase kept) or magnitude",
    "workers": "trial-block worker threads (default from ARRAYMC_WORKERS, else 1)",
    "output_dir": "directory for results.csv and run.json",
}


class ConfigError(ValueError):
    """Invalid configuration value; message names the field and valid range."""


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run configuration (lengths in meters, angles in degrees)."""

    experiment: str
    frequency: float
    bandwidth: float
    z_g: complex
    z_l: complex
    z_a: complex
    z_at: complex
    r_n: float
    rho: complex
    t_a: float
    normalization: float
    user_range: float
    user_azimuth: float
    scatterers: int
    cluster_radius: float
    mod_order: int
    snr_db: float
    n_elements: int
    aperture: float
    grid: tuple[float, ...]
    trials: int
    seed: int
    scene_seed: int | None
    detectors: tuple[str, ...]
    coupling: str
    mm_gain: str
    workers: int
    output_dir: str

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.frequency


def _parse_length(text: str, wavelength: float, field: str) -> float:
    t = text.strip()
    scale = 1.0
    if t.endswith("lam"):
        t, scale = t[:-3], wavelength
    try:
        return float(t) * scale
    except ValueError:
        raise ConfigError(
            f"{field}: expected a length in meters or with `lam` suffix, got {text!r}"
        ) from None


def _parse_grid(text: str, wavelength: float, field: str) -> tuple[float, ...]:
    t = text.strip()
    if not t:
        raise ConfigError(f"{field}: sweep grid must be nonempty")
    if ":" in t:
        parts = t.split(":")
        if len(parts) != 3:
            raise ConfigError(f"{field}: ranges take the form start:step:stop, got {text!r}")
        start, step, stop = (_parse_length(p, wavelength, field) for p in parts)
        if step <= 0 or stop < start:
            raise ConfigError(f"{field}: need step > 0 and stop >= start, got {text!r}")
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        return tuple(start + i * step for i in range(count))
    return tuple(_parse_length(p, wavelength, field) for p in t.split(","))


def _parse_scalar(raw: dict, key: str, kind, low=None, high=None, what: str = ""):
    text = raw[key]
    try:
        value = kind(text)
    except (ValueError, TypeError):
        raise ConfigError(f"{key}: cannot parse {text!r} as {kind.__name__}") from None
    if low is not None and not value >= low:
        raise ConfigError(f"{key}: must be >= {low}{what}, got {text!r}")
    if high is not None and not value <= high:
        raise ConfigError(f"{key}: must be <= {high}{what}, got {text!r}")
    return value


def read_config_file(path: str) -> dict:
    """Read a `key = value` config file; unknown keys are rejected."""
    values = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, value = stripped.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{lineno}: expected key = value, got {line!r}")
        key = key.strip().replace("-", "_")
        if key not in _DEFAULTS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value.strip()
    return values


def resolve_config(raw: dict) -> RunConfig:
    """Validate raw string settings into a RunConfig; raises ConfigError."""
    experiment = raw["experiment"]
    if experiment not in _EXPERIMENTS:
        raise ConfigError(f"experiment: must be one of {', '.join(_EXPERIMENTS)}, got {experiment!r}")
    frequency = _parse_scalar(raw, "frequency", float, low=1.0)
    wavelength = SPEED_OF_LIGHT / frequency

    rho = _parse_scalar(raw, "rho", complex)
    if abs(rho) > 1.0:
        raise ConfigError(f"rho: noise correlation magnitude must be <= 1, got {raw['rho']!r}")
    z_g = _parse_scalar(raw, "z_g", complex)
    z_l = _parse_scalar(raw, "z_l", complex)
    z_a = _parse_scalar(raw, "z_a", complex)
    z_at = _parse_scalar(raw, "z_at", complex)
    for key, z in (("z_g", z_g), ("z_a", z_a), ("z_at", z_at)):
        if not z.real > 0:
            raise ConfigError(f"{key}: real part must be positive, got {raw[key]!r}")

    grid_text = raw["grid"].strip() or _DEFAULT_GRIDS[experiment]
    grid = _parse_grid(grid_text, wavelength, "grid")
    if experiment == "azimuth" and not all(-90.0 <= g <= 90.0 for g in grid):
        raise ConfigError("grid: azimuth values must lie in [-90, 90] degrees")
    if experiment == "count":
        bad = [g for g in grid if g != int(g) or g < 2]
        if bad:
            raise ConfigError(f"grid: antenna counts must be integers >= 2, got {bad}")
    if experiment == "spacing" and not all(g > 0 for g in grid):
        raise ConfigError("grid: spacings must be positive")

    detectors = tuple(d.strip() for d in raw["detectors"].split(",") if d.strip())
    if not detectors:
        raise ConfigError("detectors: need at least one of NC-M,C-M,NC-MM,C-MM,NC-U,C-U")
    for label in detectors:
        try:
            Detector.from_label(label)
        except ValueError:
            raise ConfigError(
                f"detectors: unknown label {label!r}; valid: NC-M,C-M,NC-MM,C-MM,NC-U,C-U"
            ) from None
    coupling = raw["coupling"]
    if coupling not in ("half_wave_dipole", "uncoupled"):
        raise ConfigError(f"coupling: must be half_wave_dipole or uncoupled, got {coupling!r}")
    mm_gain = raw["mm_gain"]
    if mm_gain not in ("complex", "magnitude"):
        raise ConfigError(f"mm_gain: must be complex or magnitude, got {mm_gain!r}")

    scene_seed_text = str(raw["scene_seed"]).strip()
    workers_text = str(raw["workers"]).strip()
    return RunConfig(
        experiment=experiment,
        frequency=frequency,
        bandwidth=_parse_scalar(raw, "bandwidth", float, low=1.0),
        z_g=z_g,
        z_l=z_l,
        z_a=z_a,
        z_at=z_at,
        r_n=_parse_scalar(raw, "r_n", float, low=1e-12),
        rho=rho,
        t_a=_parse_scalar(raw, "t_a", float, low=1e-12),
        normalization=_parse_scalar(raw, "normalization", float, low=1e-300),
        user_range=_parse_scalar(raw, "user_range", float, low=1e-9),
        user_azimuth=_parse_scalar(raw, "user_azimuth", float, low=-90.0, high=90.0, what=" degrees"),
        scatterers=_parse_scalar(raw, "scatterers", int, low=1),
        cluster_radius=_parse_scalar(raw, "cluster_radius", float, low=1e-9),
        mod_order=_parse_scalar(raw, "mod_order", int, low=2),
        snr_db=_parse_scalar(raw, "snr_db", float),
        n_elements=_parse_scalar(raw, "n_elements", int, low=2),
        aperture=_parse_length(raw["aperture"], wavelength, "aperture"),
        grid=grid,
        trials=_parse_scalar(raw, "trials", int, low=1),
        seed=_parse_scalar(raw, "seed", int, low=0),
        scene_seed=int(scene_seed_text) if scene_seed_text else None,
        detectors=detectors,
        coupling=coupling,
        mm_gain=mm_gain,
        workers=int(workers_text) if workers_text else 0,
        output_dir=raw["output_dir"],
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="arraymc",
        description="Monte Carlo symbol-error-rate experiments for densely spaced "
        "receive arrays with mutual coupling.",
        epilog="Flags override config-file values, which override defaults. "
        "Azimuths are degrees from broadside (90 = end-fire).",
    )
    parser.add_argument("--config", help="key = value config file")
    parser.add_argument("--emit-coupling-curve", action="store_true",
                        help="also write coupling.csv (normalized mutual resistance vs d/lambda)")
    for key in _DEFAULTS:
        flag = "--" + key.replace("_", "-")
        parser.add_argument(flag, dest=key, help=f"{_HELP[key]} (default: {_DEFAULTS[key] or 'auto'})")
    return parser


def parse_config(argv: list[str] | None = None) -> tuple[RunConfig, bool]:
    """Merge defaults, config file, and flags into a RunConfig."""
    args = _build_parser().parse_args(argv)
    raw = dict(_DEFAULTS)
    if args.config:
        raw.update(read_config_file(args.config))
    for key in _DEFAULTS:
        value = getattr(args, key)
        if value is not None:
            raw[key] = value
    return resolve_config(raw), args.emit_coupling_curve


def _experiment_spec(config: RunConfig) -> ExperimentSpec:
    params = CircuitParams(
        generator_impedance=config.z_g,
        load_impedance=config.z_l,
        tx_antenna_impedance=config.z_at,
        rx_antenna_impedance=config.z_a,
        lna_noise_resistance=config.r_n,
        noise_correlation=config.rho,
        antenna_temperature=config.t_a,
        bandwidth=config.bandwidth,
        normalization=config.normalization,
    )
    return ExperimentSpec(
        kind=config.experiment,
        grid=config.grid,
        wavelength=config.wavelength,
        n_elements=config.n_elements,
        aperture=config.aperture,
        user_range=config.user_range,
        user_azimuth_deg=config.user_azimuth,
        scatterer_count=config.scatterers,
        cluster_radius=config.cluster_radius,
        modulation_order=config.mod_order,
        snr_db=config.snr_db,
        trials=config.trials,
        master_seed=config.seed,
        scene_seed=config.scene_seed,
        detectors=tuple(Detector.from_label(d) for d in config.detectors),
        coupling=CouplingModel(config.coupling),
        mismatched_gain=config.mm_gain,
        params=params,
    )


def _jsonable(value):
    if isinstance(value, complex):
        return str(value)
    if isinstance(value, tuple):
        return [_jsonable(v) for v in value]
    return value


def _git_describe() -> str:
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            cwd=Path(__file__).resolve().parent,
            capture_output=True,
            text=True,
            timeout=10,
        )
    except (OSError, subprocess.TimeoutExpired):
        return "unknown"
    return out.stdout.strip() if out.returncode == 0 else "unknown"


def write_coupling_curve(path: Path, config: RunConfig) -> None:
    """Normalized mutual-resistance curve over d/lambda in [0.01, 3]."""
    wavelength = config.wavelength
    norm = dipole_self_impedance().real
    with path.open("w") as fh:
        fh.write("d_over_lambda,re_coupling_normalized\n")
        for ratio in np.arange(0.01, 3.0 + 1e-9, 0.01):
            geometry = ArrayGeometry.from_spacing(2, ratio * wavelength, wavelength)
            z = mutual_impedance(0, 1, geometry)
            fh.write(f"{ratio:.9g},{z.real / norm:.9g}\n")


def run(config: RunConfig, emit_coupling_curve: bool = False) -> int:
    """Execute the configured experiment and write results.csv / run.json."""
    out_dir = Path(config.output_dir)
    results_path = out_dir / "results.csv"
    meta_path = out_dir / "run.json"
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        results_handle = results_path.open("w")
        with meta_path.open("a"):
            pass
    except OSError as exc:
        print(f"error: cannot write outputs under {out_dir}: {exc}", file=sys.stderr)
        return 1

    reset_jitter_count()
    spec = _experiment_spec(config)
    workers = config.workers
    if workers <= 0:
        env = os.environ.get("ARRAYMC_WORKERS", "").strip()
        try:
            workers = int(env) if env else 1
        except ValueError:
            print(f"error: ARRAYMC_WORKERS: expected an integer, got {env!r}", file=sys.stderr)
            return 2
        if workers < 1:
            workers = 1
    started = time.time()
    with results_handle:
        results_handle.write(
            "sweep_var,sweep_value,detector,mode,ser,errors,trials,ci95_lo,ci95_hi\n"
        )
        result = run_sweep(
            spec, workers=workers, progress=lambda msg: print(msg, file=sys.stderr)
        )
        for row in result.rows:
            est = row.estimate
            results_handle.write(
                f"{row.sweep_var},{row.sweep_value:.9g},{row.detector.kind},"
                f"{row.detector.mode.value},{est.ser:.9g},{est.errors},{est.trials},"
                f"{est.ci95[0]:.9g},{est.ci95[1]:.9g}\n"
            )
    wall_time = time.time() - started

    if emit_coupling_curve:
        write_coupling_curve(out_dir / "coupling.csv", config)

    meta = {
        "config": {f.name: _jsonable(getattr(config, f.name)) for f in fields(RunConfig)},
        "wavelength_m": config.wavelength,
        "seeds": {"master": config.seed, "scene": config.scene_seed},
        "workers": workers,
        "git_describe": _git_describe(),
        "version": __version__,
        "wall_time_s": wall_time,
        "rows": len(result.rows),
        "failures": [asdict(f) for f in result.failures],
        "jitter_retries": jitter_count(),
    }
    meta_path.write_text(json.dumps(meta, indent=2) + "\n")
    return 0 if not result.failures else 1


def main(argv: list[str] | None = None) -> int:
    try:
        config, emit_curve = parse_config(argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run(config, emit_curve)


if __name__ == "__main__":
    sys.exit(main())
