"""Circuit algebra of the receive chain.

Maps the electromagnetic quantities (receive impedance matrix, coupling
vector and its covariance) through the source/matching/load circuit to
the dimensionless signal-space channel vector, channel covariance, and
noise covariance used by the detectors, plus the scalar factors of the
equivalent uncoupled chain.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._linalg import NumericalError, hermitize
from .constants import BOLTZMANN
from .em_coupling import (
    ArrayGeometry,
    CouplingModel,
    Scene,
    impedance_matrix,
    inter_array_covariance,
)

_COND_LIMIT = 1e12
_PSD_TOL = 1e-10


@dataclass(frozen=True)
class CircuitParams:
    """Impedances, noise parameters and normalization of the receive chain.

    The current-noise variance is tied to the other noise parameters as
    2 k_B B_W T_A / R_N and therefore derived, not stored.
    """

    generator_impedance: complex = 186.0 - 31.6j
    load_impedance: complex = 186.0 - 31.6j
    tx_antenna_impedance: complex = 73.0 + 42.5j
    rx_antenna_impedance: complex = 73.0 + 42.5j
    lna_noise_resistance: float = 5.0
    noise_correlation: complex = 0.2730 + 0.1793j
    antenna_temperature: float = 290.0
    bandwidth: float = 20e6
    normalization: float = 1.0

    def __post_init__(self) -> None:
        if not self.generator_impedance.real > 0.0:
            raise ValueError("generator impedance needs a positive real part")
        if not self.tx_antenna_impedance.real > 0.0:
            raise ValueError("transmit antenna impedance needs a positive real part")
        if not self.rx_antenna_impedance.real > 0.0:
            raise ValueError("receive antenna impedance needs a positive real part")
        if not self.lna_noise_resistance > 0.0:
            raise ValueError("LNA noise resistance must be positive")
        if abs(self.noise_correlation) > 1.0:
            raise ValueError("noise correlation magnitude cannot exceed 1")
        if not self.antenna_temperature > 0.0:
            raise ValueError("antenna temperature must be positive")
        if not self.bandwidth > 0.0:
            raise ValueError("bandwidth must be positive")
        if not self.normalization > 0.0:
            raise ValueError("normalization constant must be positive")

    @property
    def generator_resistance(self) -> float:
        return self.generator_impedance.real

    @property
    def radiation_resistance(self) -> float:
        return self.rx_antenna_impedance.real

    @property
    def current_noise_variance(self) -> float:
        """LNA current-noise variance, A^2."""
        return (
            2.0
            * BOLTZMANN
            * self.bandwidth
            * self.antenna_temperature
            / self.lna_noise_resistance
        )


def matching_network(params: CircuitParams) -> np.ndarray:
    """Purely reactive transmit matching two-port, shape (2, 2), Ohm.

    Chosen so that the impedance seen by the generator is the conjugate
    of the generator impedance (power match).
    """
    x_g = params.generator_impedance.imag
    coupling = np.sqrt(params.generator_resistance * params.tx_antenna_impedance.real)
    return np.array(
        [
            [-1j * x_g, -1j * coupling],
            [-1j * coupling, -1j * params.tx_antenna_impedance.imag],
        ]
    )


def input_impedance(params: CircuitParams) -> complex:
    """Impedance seen by the generator through the matching network."""
    z_mt = matching_network(params)
    return z_mt[0, 0] - z_mt[0, 1] ** 2 / (params.tx_antenna_impedance + z_mt[1, 1])


def q_matrix(load_impedance: complex, z_r: np.ndarray) -> np.ndarray:
    """Voltage-divider matrix Z_L (Z_L I + Z_R)^{-1}, dimensionless."""
    n = z_r.shape[0]
    a = load_impedance * np.eye(n) + z_r
    cond = np.linalg.cond(a)
    if not np.isfinite(cond) or cond > _COND_LIMIT:
        raise NumericalError(
            f"load-plus-array impedance matrix is ill conditioned (cond={cond:.3e}, N={n})"
        )
    return load_impedance * np.linalg.inv(a)


def channel_scale(params: CircuitParams) -> complex:
    """Scalar -j / (2 sqrt(R_G Re Z_AT)) mapping coupling vectors to channels."""
    return -1j / (
        2.0 * np.sqrt(params.generator_resistance * params.tx_antenna_impedance.real)
    )


def channel_from_zart(z_art: np.ndarray, q: np.ndarray, params: CircuitParams) -> np.ndarray:
    """Signal-space channel for coupling vector(s) z_art, shape (N,) or (N, T)."""
    return channel_scale(params) * (q @ z_art)


def noise_covariance(q: np.ndarray, z_r: np.ndarray, params: CircuitParams) -> np.ndarray:
    """Normalized covariance of the output noise, shape (N, N).

    Combines antenna-captured background radiation (proportional to the
    real part of the impedance matrix) with LNA voltage/current noise,
    mapped through the voltage divider and divided by the normalization
    constant.
    """
    n = z_r.shape[0]
    extrinsic = (
        4.0 * BOLTZMANN * params.antenna_temperature * params.bandwidth * np.real(z_r)
    )
    rho = params.noise_correlation
    r_n = params.lna_noise_resistance
    lna = params.current_noise_variance * (
        r_n**2 * np.eye(n)
        + z_r @ z_r.conj().T
        - 2.0 * r_n * np.real(np.conj(rho) * z_r)
    )
    c_n = hermitize(q @ (extrinsic + lna) @ q.conj().T)
    scale = np.real(np.trace(c_n)) / n
    if np.linalg.eigvalsh(c_n).min() < -_PSD_TOL * scale:
        raise NumericalError(
            "noise covariance is not positive semidefinite; the impedance matrix is nonphysical"
        )
    return c_n / params.normalization


def channel_covariance(q: np.ndarray, c_art: np.ndarray, params: CircuitParams) -> np.ndarray:
    """Channel covariance: congruence of the coupling covariance, shape (N, N)."""
    scale = 1.0 / (4.0 * params.generator_resistance * params.tx_antenna_impedance.real)
    return hermitize(scale * (q @ c_art @ q.conj().T))


def gamma_factors(params: CircuitParams) -> tuple[float, float, complex]:
    """Scalar factors of the uncoupled chain: (gamma1, gamma2, g_u).

    g_u is the complex per-antenna gain from coupling vector to channel,
    gamma1 = |g_u|^2 the matching power factor, and gamma2 the
    per-antenna normalized noise power.  With these, the uncoupled chain
    collapses to h = g_u z_ART and a white noise covariance gamma2 I.
    """
    z_a = params.rx_antenna_impedance
    q_u = params.load_impedance / (params.load_impedance + z_a)
    g_u = channel_scale(params) * q_u
    gamma1 = abs(g_u) ** 2
    rho = params.noise_correlation
    r_n = params.lna_noise_resistance
    noise = (
        4.0 * BOLTZMANN * params.antenna_temperature * params.bandwidth * z_a.real
        + params.current_noise_variance
        * (r_n**2 + abs(z_a) ** 2 - 2.0 * r_n * (np.conj(rho) * z_a).real)
    )
    gamma2 = abs(q_u) ** 2 * noise / params.normalization
    return gamma1, gamma2, g_u


@dataclass(frozen=True)
class MultiportChannel:
    """Per-configuration matrices and scalars of the receive chain."""

    z_r: np.ndarray
    q: np.ndarray
    c_art: np.ndarray
    c_h: np.ndarray
    c_z: np.ndarray
    gamma1: float
    gamma2: float
    g_u: complex


def build_channel(
    geometry: ArrayGeometry,
    scene: Scene,
    params: CircuitParams,
    model: CouplingModel,
) -> MultiportChannel:
    """Assemble the full per-configuration channel description."""
    z_r = impedance_matrix(geometry, model, params.rx_antenna_impedance)
    q = q_matrix(params.load_impedance, z_r)
    c_art = inter_array_covariance(scene, geometry, params.radiation_resistance)
    c_h = channel_covariance(q, c_art, params)
    c_z = noise_covariance(q, z_r, params)
    gamma1, gamma2, g_u = gamma_factors(params)
    return MultiportChannel(z_r, q, c_art, c_h, c_z, gamma1, gamma2, g_u)


__all__ = [
    "CircuitParams",
    "MultiportChannel",
    "build_channel",
    "channel_covariance",
    "channel_from_zart",
    "channel_scale",
    "gamma_factors",
    "input_impedance",
    "matching_network",
    "noise_covariance",
    "q_matrix",
]
