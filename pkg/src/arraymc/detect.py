"""Unipolar PAM constellation and the coherent / noncoherent detectors.

The coherent detector is a maximal ratio combiner on the whitened
observation; the noncoherent detector is the unconditional ML rule over
the per-symbol Gaussian covariances, evaluated from cached Cholesky
factors.  All decision paths break ties toward the lower symbol index
so runs are bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.linalg import solve_triangular

from ._linalg import cholesky_psd


class DetectorMode(Enum):
    """Model knowledge of the detector relative to the generated signal.

    MATCHED detects with the true coupled model; MISMATCHED detects
    coupled-model signals with the uncoupled surrogate (scalar-gain
    channel, scaled coupling covariance, white noise); UNCOUPLED both
    generates and detects with the uncoupled model.
    """

    MATCHED = "M"
    MISMATCHED = "MM"
    UNCOUPLED = "U"


@dataclass(frozen=True)
class Constellation:
    """Unipolar PAM points 0, delta, ..., (M-1) delta with uniform prior."""

    points: np.ndarray
    spacing: float
    mean_power: float

    @property
    def order(self) -> int:
        return len(self.points)


def build_constellation(order: int, mean_power: float) -> Constellation:
    """Unipolar PAM constellation of the given order and mean symbol power."""
    if order < 2:
        raise ValueError(f"constellation order must be >= 2, got {order}")
    if not mean_power > 0.0:
        raise ValueError(f"mean power must be positive, got {mean_power}")
    # E[|x|^2] = delta^2 sum((m-1)^2) / M over m = 1..M
    sum_sq = (order - 1) * order * (2 * order - 1) // 6
    delta = float(np.sqrt(mean_power * order / sum_sq))
    return Constellation(delta * np.arange(order, dtype=float), delta, mean_power)


def nearest_symbol(statistic: np.ndarray, constellation: Constellation) -> np.ndarray:
    """Indices of the constellation points nearest to real statistic(s).

    Exact midpoints resolve to the lower index.
    """
    ratio = np.asarray(statistic, dtype=float) / constellation.spacing
    idx = np.ceil(ratio - 0.5).astype(np.intp)
    return np.clip(idx, 0, constellation.order - 1)


@dataclass(frozen=True)
class NcCache:
    """Per-symbol Cholesky factors and log-determinants of |x|^2 C_h + C_z."""

    factors: np.ndarray
    log_dets: np.ndarray

    @property
    def order(self) -> int:
        return len(self.log_dets)


def build_nc_cache(c_h: np.ndarray, c_z: np.ndarray, constellation: Constellation) -> NcCache:
    """Factor the per-symbol observation covariances once per configuration."""
    factors = []
    log_dets = []
    for x in constellation.points:
        factor = cholesky_psd(abs(x) ** 2 * c_h + c_z)
        factors.append(factor)
        log_dets.append(2.0 * float(np.sum(np.log(np.real(np.diag(factor))))))
    return NcCache(np.stack(factors), np.array(log_dets))


def nc_metrics(observations: np.ndarray, cache: NcCache) -> np.ndarray:
    """Negative log-likelihood metrics, shape (M, T) for observations (N, T)."""
    y = np.atleast_2d(observations.T).T if observations.ndim == 1 else observations
    metrics = np.empty((cache.order, y.shape[1]))
    for m in range(cache.order):
        white = solve_triangular(
            cache.factors[m], y, lower=True, check_finite=False
        )
        metrics[m] = np.sum(np.abs(white) ** 2, axis=0) + cache.log_dets[m]
    return metrics


def nc_detect_batch(observations: np.ndarray, cache: NcCache) -> np.ndarray:
    """Unconditional-ML decisions for a batch of observations (N, T) -> (T,)."""
    return np.argmin(nc_metrics(observations, cache), axis=0)


def nc_detect(y: np.ndarray, cache: NcCache, constellation: Constellation) -> int:
    """Unconditional-ML symbol decision for one observation vector."""
    if cache.order != constellation.order:
        raise ValueError("cache and constellation orders differ")
    return int(nc_detect_batch(np.asarray(y, dtype=complex).reshape(-1, 1), cache)[0])


def mrc_statistic_batch(
    observations: np.ndarray, channels: np.ndarray, noise_factor: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Whitened-MRC scalar statistics for batches (N, T).

    Returns (statistics, valid) where valid flags trials whose channel
    vector is nonzero; statistics of degenerate trials are 0.
    """
    white_h = solve_triangular(noise_factor, channels, lower=True, check_finite=False)
    white_y = solve_triangular(noise_factor, observations, lower=True, check_finite=False)
    energy = np.sum(np.abs(white_h) ** 2, axis=0)
    valid = energy > 0.0
    corr = np.real(np.sum(np.conj(white_h) * white_y, axis=0))
    stat = np.zeros_like(energy)
    np.divide(corr, energy, out=stat, where=valid)
    return stat, valid


def mrc_detect_batch(
    observations: np.ndarray,
    channels: np.ndarray,
    noise_factor: np.ndarray,
    constellation: Constellation,
) -> np.ndarray:
    """MRC decisions for a batch; degenerate zero channels resolve to symbol 0."""
    stat, valid = mrc_statistic_batch(observations, channels, noise_factor)
    idx = nearest_symbol(stat, constellation)
    idx[~valid] = 0
    return idx


def mrc_detect(
    y: np.ndarray, h: np.ndarray, c_z: np.ndarray, constellation: Constellation
) -> int:
    """MRC symbol decision for one observation and channel realization.

    Raises on an exactly zero channel; batch callers choose their own
    degenerate-channel policy.
    """
    h = np.asarray(h, dtype=complex)
    if not np.any(h != 0.0):
        raise ValueError("degenerate zero channel; MRC statistic undefined")
    factor = cholesky_psd(np.asarray(c_z, dtype=complex))
    stat, _ = mrc_statistic_batch(
        np.asarray(y, dtype=complex).reshape(-1, 1), h.reshape(-1, 1), factor
    )
    return int(nearest_symbol(stat, constellation)[0])
