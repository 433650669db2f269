"""Shared numerical helpers: guarded Cholesky factorization and Hermitian cleanup."""

from __future__ import annotations

import warnings

import numpy as np

_JITTER_EPS = 1e-12

_jitter_count = 0


class NumericalError(RuntimeError):
    """Raised when a matrix operation fails beyond the configured safety nets."""


def hermitize(matrix: np.ndarray) -> np.ndarray:
    """Symmetrize away the rounding-level Hermitian residual of a congruence product."""
    return 0.5 * (matrix + matrix.conj().T)


def cholesky_psd(matrix: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor, with a single diagonal-jitter retry.

    Covariances assembled from rank-deficient terms can sit a few ulp on
    the wrong side of singular.  On factorization failure a jitter of
    1e-12 * (trace/N) is added to the diagonal and the factorization is
    retried once; each retry is counted and warned about.
    """
    global _jitter_count
    try:
        return np.linalg.cholesky(matrix)
    except np.linalg.LinAlgError:
        pass
    n = matrix.shape[0]
    scale = np.real(np.trace(matrix)) / n
    jittered = matrix + (_JITTER_EPS * scale) * np.eye(n)
    try:
        factor = np.linalg.cholesky(jittered)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(
            f"covariance not positive definite even after jitter (N={n}, trace/N={scale:.3e})"
        ) from exc
    _jitter_count += 1
    warnings.warn("covariance factorization needed diagonal jitter", RuntimeWarning, stacklevel=2)
    return factor


def jitter_count() -> int:
    """Number of jittered factorizations since the last reset."""
    return _jitter_count


def reset_jitter_count() -> None:
    global _jitter_count
    _jitter_count = 0
