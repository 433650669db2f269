"""Monte Carlo symbol-error-rate estimation and the sweep experiments.

Reproducibility contract: every random draw is tied to a substream
keyed by (master seed, sweep-point index, detector stream, block index)
through numpy SeedSequence spawn keys, with a fixed block length.
Trials are generated block by block in a canonical order (symbols,
scatterer gains, noise), so error counts are integers accumulated in
any order and results are bit-identical for any worker count.

The uncoupled detector mode reuses the matched code path on the
uncoupled model, including its stream key; running a matched detector
on an explicitly uncoupled configuration therefore reproduces the
uncoupled mode exactly.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .detect import (
    Constellation,
    DetectorMode,
    NcCache,
    build_constellation,
    build_nc_cache,
    mrc_detect_batch,
    nc_detect_batch,
)
from ._linalg import cholesky_psd
from .em_coupling import (
    ArrayGeometry,
    CouplingModel,
    Scene,
    response_matrix,
    sample_scatterers,
)
from .multiport import (
    CircuitParams,
    MultiportChannel,
    build_channel,
    channel_scale,
)

TRIAL_BLOCK = 4096
"Trials per random-stream block; fixed, part of the reproducibility contract."

_SCENE_STREAM = 4
_WILSON_Z = 1.959963984540054  # two-sided 95%


@dataclass(frozen=True)
class Detector:
    """A detector choice: combining kind (C or NC) and model mode."""

    kind: str
    mode: DetectorMode

    def __post_init__(self) -> None:
        if self.kind not in ("C", "NC"):
            raise ValueError(f"detector kind must be 'C' or 'NC', got {self.kind!r}")

    @property
    def label(self) -> str:
        return f"{self.kind}-{self.mode.value}"

    @classmethod
    def from_label(cls, label: str) -> "Detector":
        kind, _, mode = label.partition("-")
        try:
            return cls(kind, DetectorMode(mode))
        except ValueError:
            raise ValueError(f"unknown detector label {label!r}") from None

    @property
    def stream(self) -> int:
        """Substream index; uncoupled mode shares the matched stream."""
        base = 0 if self.kind == "C" else 2
        return base + (1 if self.mode is DetectorMode.MISMATCHED else 0)


DEFAULT_DETECTORS = tuple(
    Detector.from_label(lbl) for lbl in ("NC-M", "C-M", "NC-MM", "C-MM", "NC-U", "C-U")
)


def wilson_interval(errors: int, trials: int) -> tuple[float, float]:
    """95% Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    z2 = _WILSON_Z**2
    p = errors / trials
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2.0 * trials)) / denom
    half = (
        _WILSON_Z
        * np.sqrt(p * (1.0 - p) / trials + z2 / (4.0 * trials**2))
        / denom
    )
    # rounding must never push the point estimate outside its own interval
    lo = min(max(0.0, float(center - half)), p)
    hi = max(min(1.0, float(center + half)), p)
    return lo, hi


@dataclass(frozen=True)
class SerEstimate:
    """Symbol-error-rate estimate with its 95% confidence interval."""

    errors: int
    trials: int
    ser: float
    ci95: tuple[float, float]

    @classmethod
    def from_counts(cls, errors: int, trials: int) -> "SerEstimate":
        return cls(errors, trials, errors / trials, wilson_interval(errors, trials))


def calibrate_power(c_h: np.ndarray, c_z: np.ndarray, snr_db: float) -> float:
    """Mean symbol power that meets the average-SNR target for this model."""
    tr_h = float(np.real(np.trace(c_h)))
    tr_z = float(np.real(np.trace(c_z)))
    if not tr_h > 0.0:
        raise ValueError("channel covariance trace must be positive for calibration")
    if not tr_z > 0.0:
        raise ValueError("noise covariance trace must be positive for calibration")
    return 10.0 ** (snr_db / 10.0) * tr_z / tr_h


@dataclass(frozen=True)
class PointModel:
    """Everything fixed at one sweep point: geometry, scene, both models."""

    geometry: ArrayGeometry
    scene: Scene
    params: CircuitParams
    coupling: CouplingModel
    coupled: MultiportChannel
    uncoupled: MultiportChannel
    a_matrix: np.ndarray


def build_point_model(
    geometry: ArrayGeometry,
    scene: Scene,
    params: CircuitParams,
    coupling: CouplingModel = CouplingModel.HALF_WAVE_DIPOLE,
) -> PointModel:
    coupled = build_channel(geometry, scene, params, coupling)
    if coupling is CouplingModel.UNCOUPLED:
        uncoupled = coupled
    else:
        uncoupled = build_channel(geometry, scene, params, CouplingModel.UNCOUPLED)
    return PointModel(
        geometry, scene, params, coupling, coupled, uncoupled,
        response_matrix(scene, geometry),
    )


@dataclass(frozen=True)
class TrialPlan:
    """Precomputed per-(point, detector) state consumed by the trial blocks."""

    detector: Detector
    constellation: Constellation
    alpha_scale: np.ndarray
    gen_map: np.ndarray
    noise_factor: np.ndarray
    det_noise_factor: np.ndarray | None = None
    det_channel_map: np.ndarray | None = None
    cache: NcCache | None = None


def build_trial_plan(
    point: PointModel,
    detector: Detector,
    snr_db: float,
    modulation_order: int,
    mismatched_gain: str = "complex",
) -> TrialPlan:
    """Resolve generation model, calibration, and detector inputs for one estimate.

    Matched and uncoupled detectors read the generating model directly;
    the mismatched detector sees coupled-model observations but combines
    with the uncoupled surrogate: channel g_u z_ART (complex gain by
    default, magnitude-only if requested), coupling covariance scaled by
    gamma1, and white noise gamma2 I.
    """
    if mismatched_gain not in ("complex", "magnitude"):
        raise ValueError(f"mismatched_gain must be 'complex' or 'magnitude', got {mismatched_gain!r}")
    gen = point.uncoupled if detector.mode is DetectorMode.UNCOUPLED else point.coupled
    mean_power = calibrate_power(gen.c_h, gen.c_z, snr_db)
    constellation = build_constellation(modulation_order, mean_power)
    zart_map = 1j * point.params.radiation_resistance * point.a_matrix
    gen_map = channel_scale(point.params) * (gen.q @ zart_map)
    alpha_scale = np.sqrt(point.scene.scatterer_powers / 2.0)
    noise_factor = cholesky_psd(gen.c_z)
    n = point.geometry.n_elements

    mismatched = detector.mode is DetectorMode.MISMATCHED
    uncoupled = point.uncoupled
    if detector.kind == "C":
        if mismatched:
            gain = uncoupled.g_u if mismatched_gain == "complex" else abs(uncoupled.g_u)
            det_channel_map = gain * zart_map
            det_noise_factor = np.sqrt(uncoupled.gamma2) * np.eye(n, dtype=complex)
        else:
            det_channel_map = None  # detector uses the true per-trial channel
            det_noise_factor = noise_factor
        return TrialPlan(
            detector, constellation, alpha_scale, gen_map, noise_factor,
            det_noise_factor=det_noise_factor, det_channel_map=det_channel_map,
        )

    if mismatched:
        cache = build_nc_cache(
            uncoupled.gamma1 * point.coupled.c_art,
            uncoupled.gamma2 * np.eye(n, dtype=complex),
            constellation,
        )
    else:
        cache = build_nc_cache(gen.c_h, gen.c_z, constellation)
    return TrialPlan(
        detector, constellation, alpha_scale, gen_map, noise_factor, cache=cache
    )


def _block_errors(
    plan: TrialPlan,
    master_seed: int,
    point_index: int,
    block_index: int,
    count: int,
) -> int:
    """Run one block of trials and return its error count.

    Canonical draw order within a block: symbol indices, scatterer
    gains, receiver noise.
    """
    seq = np.random.SeedSequence(
        master_seed, spawn_key=(point_index, plan.detector.stream, block_index)
    )
    rng = np.random.Generator(np.random.Philox(seq))
    order = plan.constellation.order
    n_scatter = len(plan.alpha_scale)
    n = plan.gen_map.shape[0]

    symbols = rng.integers(0, order, size=count)
    g = rng.standard_normal((2, n_scatter, count))
    alpha = plan.alpha_scale[:, None] * (g[0] + 1j * g[1])
    w = rng.standard_normal((2, n, count))
    noise = plan.noise_factor @ ((w[0] + 1j * w[1]) / np.sqrt(2.0))

    h = plan.gen_map @ alpha
    y = h * plan.constellation.points[symbols] + noise

    if plan.cache is not None:
        decisions = nc_detect_batch(y, plan.cache)
    else:
        h_det = h if plan.det_channel_map is None else plan.det_channel_map @ alpha
        decisions = mrc_detect_batch(y, h_det, plan.det_noise_factor, plan.constellation)
    return int(np.count_nonzero(decisions != symbols))


def estimate_ser(
    point: PointModel,
    detector: Detector,
    *,
    snr_db: float,
    modulation_order: int,
    trials: int,
    master_seed: int,
    point_index: int = 0,
    mismatched_gain: str = "complex",
    workers: int = 1,
) -> SerEstimate:
    """Monte Carlo SER estimate for one sweep point and detector.

    Bit-identical for a given (master_seed, trials) regardless of the
    worker count.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    plan = build_trial_plan(point, detector, snr_db, modulation_order, mismatched_gain)
    blocks = [
        (i, min(TRIAL_BLOCK, trials - i * TRIAL_BLOCK))
        for i in range((trials + TRIAL_BLOCK - 1) // TRIAL_BLOCK)
    ]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = pool.map(
                lambda b: _block_errors(plan, master_seed, point_index, b[0], b[1]),
                blocks,
            )
            errors = sum(counts)
    else:
        errors = sum(
            _block_errors(plan, master_seed, point_index, i, c) for i, c in blocks
        )
    return SerEstimate.from_counts(errors, trials)


@dataclass(frozen=True)
class ExperimentSpec:
    """A sweep definition: what varies, what is fixed, and the sampling budget."""

    kind: str
    grid: tuple[float, ...]
    wavelength: float
    n_elements: int = 128
    aperture: float = 0.5
    user_range: float = 25.0
    user_azimuth_deg: float = -30.0
    scatterer_count: int = 20
    cluster_radius: float = 3.0
    modulation_order: int = 4
    snr_db: float = 5.0
    trials: int = 100_000
    master_seed: int = 1
    scene_seed: int | None = None
    detectors: tuple[Detector, ...] = DEFAULT_DETECTORS
    coupling: CouplingModel = CouplingModel.HALF_WAVE_DIPOLE
    mismatched_gain: str = "complex"
    params: CircuitParams = field(default_factory=CircuitParams)

    def __post_init__(self) -> None:
        if self.kind not in ("spacing", "count", "azimuth", "single"):
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if len(self.grid) == 0:
            raise ValueError("sweep grid must be nonempty")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if len(self.detectors) == 0:
            raise ValueError("at least one detector is required")

    @property
    def sweep_var(self) -> str:
        return {
            "spacing": "spacing_m",
            "count": "n_elements",
            "azimuth": "theta_deg",
            "single": "point",
        }[self.kind]


def point_geometry(spec: ExperimentSpec, value: float) -> tuple[ArrayGeometry, float]:
    """Geometry and user azimuth for one grid value of the sweep."""
    if spec.kind == "spacing":
        geometry = ArrayGeometry.from_spacing(spec.n_elements, value, spec.wavelength)
        azimuth = spec.user_azimuth_deg
    elif spec.kind == "count":
        n = int(round(value))
        if n != value or n < 2:
            raise ValueError(f"antenna-count grid values must be integers >= 2, got {value}")
        geometry = ArrayGeometry.from_aperture(n, spec.aperture, spec.wavelength)
        azimuth = spec.user_azimuth_deg
    elif spec.kind == "azimuth":
        geometry = ArrayGeometry.from_aperture(spec.n_elements, spec.aperture, spec.wavelength)
        azimuth = value
    else:  # single
        geometry = ArrayGeometry.from_aperture(spec.n_elements, spec.aperture, spec.wavelength)
        azimuth = spec.user_azimuth_deg
    return geometry, azimuth


def point_scene(spec: ExperimentSpec, point_index: int, azimuth: float) -> Scene:
    """One fixed scene realization per sweep point, from the scene seed."""
    entropy = spec.master_seed if spec.scene_seed is None else spec.scene_seed
    seq = np.random.SeedSequence(entropy, spawn_key=(point_index, _SCENE_STREAM))
    rng = np.random.Generator(np.random.Philox(seq))
    return sample_scatterers(
        spec.user_range, azimuth, spec.cluster_radius, spec.scatterer_count, rng
    )


@dataclass(frozen=True)
class SweepRow:
    sweep_var: str
    sweep_value: float
    detector: Detector
    estimate: SerEstimate


@dataclass(frozen=True)
class SweepFailure:
    sweep_value: float
    detector: str
    message: str


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    failures: tuple[SweepFailure, ...]


def run_sweep(spec: ExperimentSpec, workers: int = 1, progress=None) -> SweepResult:
    """Estimate SER for every (grid value, detector) pair of the sweep.

    Per-point numerical failures are recorded and the run continues;
    successful rows keep the deterministic grid-major order.
    """
    rows: list[SweepRow] = []
    failures: list[SweepFailure] = []
    for index, value in enumerate(spec.grid):
        try:
            geometry, azimuth = point_geometry(spec, value)
            scene = point_scene(spec, index, azimuth)
            point = build_point_model(geometry, scene, spec.params, spec.coupling)
        except Exception as exc:  # noqa: BLE001 - per-point isolation is the contract
            for detector in spec.detectors:
                failures.append(SweepFailure(value, detector.label, str(exc)))
            if progress is not None:
                progress(f"{spec.sweep_var}={value:g}: point failed: {exc}")
            continue
        for detector in spec.detectors:
            try:
                estimate = estimate_ser(
                    point,
                    detector,
                    snr_db=spec.snr_db,
                    modulation_order=spec.modulation_order,
                    trials=spec.trials,
                    master_seed=spec.master_seed,
                    point_index=index,
                    mismatched_gain=spec.mismatched_gain,
                    workers=workers,
                )
            except Exception as exc:  # noqa: BLE001
                failures.append(SweepFailure(value, detector.label, str(exc)))
                if progress is not None:
                    progress(f"{spec.sweep_var}={value:g} {detector.label}: failed: {exc}")
                continue
            rows.append(SweepRow(spec.sweep_var, value, detector, estimate))
            if progress is not None:
                progress(
                    f"{spec.sweep_var}={value:g} {detector.label}: "
                    f"ser={estimate.ser:.3e} ({estimate.errors}/{estimate.trials})"
                )
    return SweepResult(tuple(rows), tuple(failures))
