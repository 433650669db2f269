"""Real sine and cosine integrals Si(x), Ci(x).

Two-regime evaluation: an alternating power series up to x = 4, and a
complex continued fraction for the auxiliary exponential-integral form
beyond.  Both functions are needed by the dipole mutual-impedance
formulas, whose arguments span roughly [1e-4, 1e5] for the sweeps of
interest; absolute accuracy is a few ulp, comfortably below the 1e-10
budget the rest of the code assumes.
"""

from __future__ import annotations

import math

import numpy as np

EULER_GAMMA = 0.5772156649015329

_SERIES_CUTOFF = 4.0
_CF_MAX_ITER = 10_000
_EPS = 1e-16


def _sici_series(x: float) -> tuple[float, float]:
    """Power series for Si(x) and Ci(x), effective for 0 < x <= ~8."""
    x2 = x * x
    # Si: sum of (-1)^k x^(2k+1) / ((2k+1)(2k+1)!)
    p = x
    si = x
    k = 1
    while True:
        p *= -x2 / ((2 * k) * (2 * k + 1))
        term = p / (2 * k + 1)
        si += term
        if abs(term) < _EPS * (1.0 + abs(si)):
            break
        k += 1
    # Ci: gamma + ln x + sum of (-1)^k x^(2k) / ((2k)(2k)!)
    q = 1.0
    acc = 0.0
    k = 1
    while True:
        q *= -x2 / ((2 * k - 1) * (2 * k))
        term = q / (2 * k)
        acc += term
        if abs(term) < _EPS * (1.0 + abs(acc)):
            break
        k += 1
    ci = EULER_GAMMA + math.log(x) + acc
    return si, ci


def _sici_contfrac(x: float) -> tuple[float, float]:
    """Continued fraction for E1(jx); accurate for x >= ~2."""
    # Modified Lentz evaluation of
    #   E1(jx) = e^{-jx} / (jx + 1 - 1/(jx + 3 - 4/(jx + 5 - ...)))
    # with E1(jx) = -Ci(x) + j(Si(x) - pi/2).
    b = complex(1.0, x)
    c = complex(1e300)
    d = 1.0 / b
    h = d
    for i in range(2, _CF_MAX_ITER):
        a = -((i - 1) ** 2)
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    else:
        raise RuntimeError(f"sine/cosine integral fraction stalled at x={x!r}")
    e1 = complex(math.cos(x), -math.sin(x)) * h
    return math.pi / 2 + e1.imag, -e1.real


def _sici(x: float) -> tuple[float, float]:
    if x <= _SERIES_CUTOFF:
        return _sici_series(x)
    return _sici_contfrac(x)


def _validate(x, name: str, positive: bool) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} requires finite input, got {x!r}")
    if positive:
        if np.any(arr <= 0.0):
            raise ValueError(f"{name} requires x > 0, got {x!r}")
    elif np.any(arr < 0.0):
        raise ValueError(f"{name} requires x >= 0, got {x!r}")
    return arr


def sine_integral(x):
    """Si(x) = integral of sin(t)/t from 0 to x, for x >= 0.

    Accepts a scalar or array; returns the same shape.
    """
    arr = _validate(x, "sine_integral", positive=False)
    out = np.empty(arr.shape)
    flat = arr.ravel()
    res = out.ravel()
    for i, v in enumerate(flat):
        res[i] = 0.0 if v == 0.0 else _sici(float(v))[0]
    if np.isscalar(x) or np.ndim(x) == 0:
        return float(out)
    return out


def cosine_integral(x):
    """Ci(x) = -integral of cos(t)/t from x to infinity, for x > 0.

    Diverges to -inf as x -> 0+, so zero is rejected rather than clamped.
    Accepts a scalar or array; returns the same shape.
    """
    arr = _validate(x, "cosine_integral", positive=True)
    out = np.empty(arr.shape)
    flat = arr.ravel()
    res = out.ravel()
    for i, v in enumerate(flat):
        res[i] = _sici(float(v))[1]
    if np.isscalar(x) or np.ndim(x) == 0:
        return float(out)
    return out
