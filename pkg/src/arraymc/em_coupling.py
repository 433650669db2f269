"""Receive-array geometry, dipole mutual impedance, and scatterer scenes.

The receive array is a uniform linear array of side-by-side center-fed
half-wavelength dipoles on the x axis.  Mutual impedances between
elements follow the classical induced-EMF expressions in terms of sine
and cosine integrals; the propagation side is a near-field scatterer
cluster with exact spherical-wavefront distances (no plane-wave
approximation).

Angle convention: azimuth is measured from broadside (the +y axis)
toward the array axis, so 90 degrees is end-fire.  Scenes are built from
polar (range, azimuth-degrees) user coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.linalg import toeplitz

from .constants import FREE_SPACE_IMPEDANCE
from .specfun import cosine_integral, sine_integral


class CouplingModel(Enum):
    """Intra-array coupling kernel for the receive impedance matrix."""

    HALF_WAVE_DIPOLE = "half_wave_dipole"
    UNCOUPLED = "uncoupled"


@dataclass(frozen=True)
class ArrayGeometry:
    """Uniform linear array on the x axis; element n sits at origin + (n*d, 0)."""

    n_elements: int
    wavelength: float
    spacing: float
    origin: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self) -> None:
        if self.n_elements < 1:
            raise ValueError(f"n_elements must be >= 1, got {self.n_elements}")
        if not self.wavelength > 0.0:
            raise ValueError(f"wavelength must be positive, got {self.wavelength}")
        if self.n_elements == 1:
            if self.spacing != 0.0:
                raise ValueError("a single-element array has no spacing; pass 0.0")
        elif not self.spacing > 0.0:
            raise ValueError(f"spacing must be positive for N >= 2, got {self.spacing}")

    @classmethod
    def from_spacing(cls, n_elements: int, spacing: float, wavelength: float) -> "ArrayGeometry":
        return cls(n_elements, wavelength, spacing)

    @classmethod
    def from_aperture(cls, n_elements: int, aperture: float, wavelength: float) -> "ArrayGeometry":
        if n_elements < 2:
            raise ValueError("aperture-defined arrays need N >= 2")
        return cls(n_elements, wavelength, aperture / (n_elements - 1))

    @property
    def aperture(self) -> float:
        return (self.n_elements - 1) * self.spacing

    @property
    def wavenumber(self) -> float:
        return 2.0 * np.pi / self.wavelength

    @property
    def dipole_length(self) -> float:
        return 0.5 * self.wavelength

    @property
    def positions(self) -> np.ndarray:
        """Element coordinates, shape (N, 2)."""
        xy = np.zeros((self.n_elements, 2))
        xy[:, 0] = self.origin[0] + self.spacing * np.arange(self.n_elements)
        xy[:, 1] = self.origin[1]
        return xy


def polar_to_cartesian(radius: float, azimuth_deg: float) -> np.ndarray:
    """(range, azimuth from broadside in degrees) -> (x, y) meters."""
    a = np.deg2rad(azimuth_deg)
    return np.array([radius * np.sin(a), radius * np.cos(a)])


@dataclass(frozen=True)
class Scene:
    """A user surrounded by a cluster of point scatterers.

    scatterer_powers holds the mean square gains of the scatterer
    amplitudes; positions are Cartesian meters.
    """

    user_position: np.ndarray
    scatterer_positions: np.ndarray
    scatterer_powers: np.ndarray
    cluster_radius: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "user_position", np.asarray(self.user_position, dtype=float))
        object.__setattr__(
            self, "scatterer_positions", np.asarray(self.scatterer_positions, dtype=float)
        )
        object.__setattr__(
            self, "scatterer_powers", np.asarray(self.scatterer_powers, dtype=float)
        )
        if self.scatterer_positions.ndim != 2 or self.scatterer_positions.shape[1] != 2:
            raise ValueError("scatterer_positions must have shape (L, 2)")
        if len(self.scatterer_positions) < 1:
            raise ValueError("a scene needs at least one scatterer")
        if len(self.scatterer_powers) != len(self.scatterer_positions):
            raise ValueError("scatterer_powers length must match scatterer count")
        if np.any(self.scatterer_powers <= 0.0):
            raise ValueError("scatterer powers must be positive")
        if not self.cluster_radius > 0.0:
            raise ValueError("cluster_radius must be positive")

    @property
    def n_scatterers(self) -> int:
        return len(self.scatterer_positions)


def sample_scatterers(
    user_range: float,
    user_azimuth_deg: float,
    cluster_radius: float,
    count: int,
    rng: np.random.Generator,
) -> Scene:
    """Draw a scene with `count` scatterers uniform on the circle around the user.

    Scatterers sit exactly on the circle of radius `cluster_radius`
    (angles i.i.d. uniform); each carries power 1/count so the total
    cluster power is independent of the count.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if not cluster_radius > 0.0:
        raise ValueError("cluster_radius must be positive")
    center = polar_to_cartesian(user_range, user_azimuth_deg)
    angles = rng.uniform(0.0, 2.0 * np.pi, size=count)
    offsets = cluster_radius * np.stack([np.cos(angles), np.sin(angles)], axis=1)
    powers = np.full(count, 1.0 / count)
    return Scene(center, center + offsets, powers, cluster_radius)


def dipole_self_impedance(eta: float = FREE_SPACE_IMPEDANCE) -> complex:
    """Half-wave dipole self-impedance consistent with the mutual-impedance kernel.

    This is the d -> 0 limit of the side-by-side mutual impedance,
    approximately 73.079 + j42.515 Ohm.  The conventional rounded rating
    73 + j42.5 Ohm differs in the real part by 0.079 Ohm, which is
    exactly the passivity margin of the coupling matrix; use this value
    where exact positive semidefiniteness of Re(Z_R) matters.
    """
    two_pi = 2.0 * np.pi
    euler_gamma = 0.5772156649015329
    re = euler_gamma + np.log(two_pi) - cosine_integral(two_pi)
    im = sine_integral(two_pi)
    return eta / (4.0 * np.pi) * complex(re, im)


def _mutual_impedance_from_offsets(
    offsets: np.ndarray, wavenumber: float, dipole_length: float, eta: float
) -> np.ndarray:
    """Mutual impedance of parallel half-wave dipoles at the given axial offsets."""
    m = np.asarray(offsets, dtype=float)
    hyp = np.hypot(m, dipole_length)
    u = wavenumber * m
    v = wavenumber * (hyp + dipole_length)
    # hyp - l written to avoid cancellation at small offsets
    w = wavenumber * (m * m / (hyp + dipole_length))
    scale = eta / (4.0 * np.pi)
    re = scale * (2.0 * cosine_integral(u) - cosine_integral(v) - cosine_integral(w))
    im = -scale * (2.0 * sine_integral(u) - sine_integral(v) - sine_integral(w))
    return re + 1j * im


def mutual_impedance(
    p: int, q: int, geometry: ArrayGeometry, eta: float = FREE_SPACE_IMPEDANCE
) -> complex:
    """Mutual impedance between elements p and q (p != q), in Ohm.

    Depends on the element separation only, so the result is symmetric
    in (p, q).  Self terms are assigned, never computed; p == q is a
    contract violation.
    """
    n = geometry.n_elements
    if not (0 <= p < n and 0 <= q < n):
        raise ValueError(f"element indices out of range for N={n}: ({p}, {q})")
    if p == q:
        raise ValueError("self-impedance is assigned, not computed; p must differ from q")
    offset = geometry.spacing * abs(p - q)
    return complex(
        _mutual_impedance_from_offsets(
            np.array([offset]), geometry.wavenumber, geometry.dipole_length, eta
        )[0]
    )


def impedance_matrix(
    geometry: ArrayGeometry,
    model: CouplingModel,
    self_impedance: complex,
    eta: float = FREE_SPACE_IMPEDANCE,
) -> np.ndarray:
    """Receive impedance matrix: self terms on the diagonal, mutual terms elsewhere.

    Complex-symmetric (reciprocity) and Toeplitz by construction; the
    uncoupled model is simply self_impedance times the identity.
    """
    n = geometry.n_elements
    if model is CouplingModel.UNCOUPLED:
        return self_impedance * np.eye(n, dtype=complex)
    column = np.empty(n, dtype=complex)
    column[0] = self_impedance
    if n > 1:
        offsets = geometry.spacing * np.arange(1, n)
        column[1:] = _mutual_impedance_from_offsets(
            offsets, geometry.wavenumber, geometry.dipole_length, eta
        )
    # explicit second argument: Z_R is symmetric, not Hermitian
    return toeplitz(column, column)


def array_response(scatterer: np.ndarray, geometry: ArrayGeometry) -> np.ndarray:
    """Spherical-wavefront response of the array to a point source, shape (N,).

    Entry n is exp(-j k r_n) / (k r_n) with r_n the exact distance from
    the scatterer to element n; valid in radiative near field and far
    field alike.
    """
    k = geometry.wavenumber
    dist = np.hypot(*(np.asarray(scatterer, dtype=float) - geometry.positions).T)
    if np.any(dist == 0.0):
        raise ValueError("scatterer coincides with an array element")
    return np.exp(-1j * k * dist) / (k * dist)


def response_matrix(scene: Scene, geometry: ArrayGeometry) -> np.ndarray:
    """Column-stacked array responses of all scatterers, shape (N, L)."""
    return np.stack(
        [array_response(s, geometry) for s in scene.scatterer_positions], axis=1
    )


def inter_array_covariance(
    scene: Scene, geometry: ArrayGeometry, radiation_resistance: float
) -> np.ndarray:
    """Covariance of the transmitter-to-array coupling vector, shape (N, N), Ohm^2.

    Hermitian PSD with rank at most min(N, L).
    """
    a = response_matrix(scene, geometry)
    c = (radiation_resistance**2) * ((a * scene.scatterer_powers) @ a.conj().T)
    return 0.5 * (c + c.conj().T)


def draw_inter_array_coupling(
    scene: Scene,
    geometry: ArrayGeometry,
    radiation_resistance: float,
    rng: np.random.Generator,
    size: int | None = None,
) -> np.ndarray:
    """Random coupling vector(s): j R_r times the scatterer-weighted responses.

    Scatterer amplitudes are independent circularly-symmetric complex
    Gaussians with variances scene.scatterer_powers.  Returns shape (N,)
    or (N, size); the sample covariance converges to
    inter_array_covariance.
    """
    a = response_matrix(scene, geometry)
    n_draws = 1 if size is None else size
    g = rng.standard_normal((2, scene.n_scatterers, n_draws))
    alpha = np.sqrt(scene.scatterer_powers / 2.0)[:, None] * (g[0] + 1j * g[1])
    z = 1j * radiation_resistance * (a @ alpha)
    return z[:, 0] if size is None else z
