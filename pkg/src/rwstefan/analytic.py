"""Closed-form reference solutions.

All functions broadcast over numpy arrays where that makes sense.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .core import PhysicalParams

__all__ = [
    "DomainError",
    "NonConvergence",
    "LambdaSolution",
    "erf",
    "solve_lambda",
    "stefan_T",
    "stefan_s",
    "special_T",
    "special_s",
    "gaussian_T",
    "fourier_T",
    "flux_amplitude",
]

SQRT_PI = math.sqrt(math.pi)


class DomainError(ValueError):
    pass


class NonConvergence(ArithmeticError):
    """Root finding failed; carries the last iterate and its residual."""

    def __init__(self, message, last, residual):
        super().__init__(f"{message} (last iterate {last!r}, residual {residual!r})")
        self.last = last
        self.residual = residual


def erf(x):
    # scipy's Cephes-based erf is accurate to a few ulp and exactly odd
    out = special.erf(x)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class LambdaSolution:
    lam: float
    residual: float
    iterations: int
    method: str = "newton"

    @property
    def lambda_(self):
        return self.lam


def _lambda_residual(x, beta, T0):
    return SQRT_PI * beta * x * math.exp(x * x) * math.erf(x) - T0


def _lambda_slope(x, beta):
    return beta * (SQRT_PI * math.exp(x * x) * math.erf(x) * (2 * x * x + 1) + 2 * x)


def solve_lambda(beta, T0, tol=1e-6, max_iter=200):
    """Root of sqrt(pi) beta lam exp(lam^2) erf(lam) = T0.

    Newton from lam = 1, falling back to bisection when Newton leaves the
    positive axis or stalls.
    """
    for name, value in (("beta", beta), ("T0", T0), ("tol", tol)):
        if not value > 0:
            raise DomainError(f"{name} must be positive, got {value!r}")

    x = 1.0
    fx = _lambda_residual(x, beta, T0)
    it = 0
    while abs(fx) > tol and it < max_iter:
        step = fx / _lambda_slope(x, beta)
        x = x - step
        it += 1
        if not (x > 0 and math.isfinite(x)):
            break
        fx = _lambda_residual(x, beta, T0)
    else:
        if abs(fx) <= tol:
            return LambdaSolution(x, abs(fx), it, "newton")

    # bisection fallback on [0, hi]; the residual is increasing with f(0) = -T0
    lo, hi = 0.0, 1.0
    while _lambda_residual(hi, beta, T0) < 0:
        hi *= 2.0
        if hi > 30:
            raise NonConvergence("cannot bracket lambda", hi, _lambda_residual(hi, beta, T0))
    for k in range(2000):
        mid = 0.5 * (lo + hi)
        fm = _lambda_residual(mid, beta, T0)
        if abs(fm) <= tol:
            return LambdaSolution(mid, abs(fm), it + k + 1, "bisection")
        if fm < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 4 * np.finfo(float).eps * hi:
            break
    raise NonConvergence("lambda bisection did not reach tolerance", mid, abs(fm))


def stefan_s(t, params, lam):
    """Front position 2 lam sqrt(alpha t) for a constant surface temperature."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("stefan_s needs t >= 0")
    out = 2.0 * lam * np.sqrt(params.alpha * t)
    return float(out) if out.ndim == 0 else out


def stefan_T(x, t, params, T0, lam, outside="raise"):
    """Similarity solution T0 (1 - erf(x / (2 sqrt(alpha t))) / erf(lam)).

    ``outside="zero"`` returns 0 in the solid (x > s(t)) instead of raising.
    """
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise DomainError("stefan_T needs t > 0")
    s = 2.0 * lam * np.sqrt(params.alpha * t)
    solid = x > s * (1 + 1e-12)
    if np.any(x < 0) or (outside == "raise" and np.any(solid)):
        raise DomainError("x outside the liquid region [0, s(t)]")
    T = T0 * (1.0 - special.erf(x / (2.0 * np.sqrt(params.alpha * t))) / special.erf(lam))
    T = np.where(solid, 0.0, T)
    return float(T) if T.ndim == 0 else T


def special_T(x, t):
    """exp(t - x) - 1, the beta = 1 solution for f(t) = exp(t) - 1."""
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(x < 0) or np.any(x > t * (1 + 1e-12)):
        raise DomainError("special_T defined on 0 <= x <= t")
    out = np.expm1(t - x)
    return float(out) if out.ndim == 0 else out


def special_s(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError("special_s needs t >= 0")
    return float(t) if t.ndim == 0 else t.copy()


def gaussian_T(x, t, alpha=1.0):
    """Heat kernel (4 pi alpha t)^(-1/2) exp(-x^2 / (4 alpha t))."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise DomainError("gaussian_T needs t > 0")
    x = np.asarray(x, dtype=float)
    out = np.exp(-x * x / (4 * alpha * t)) / np.sqrt(4 * math.pi * alpha * t)
    return float(out) if out.ndim == 0 else out


def fourier_T(x, t, L=1.0, alpha=1.0, K=100):
    """K-term sine series for the slab 0 < x < L with T(x, 0) = 1 and T = 0 at both ends."""
    if K < 1:
        raise DomainError("need at least one Fourier term")
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    m = 2 * np.arange(K) + 1.0
    shape = np.broadcast_shapes(x.shape, t.shape)
    xb = np.broadcast_to(x, shape)[..., None]
    tb = np.broadcast_to(t, shape)[..., None]
    terms = np.exp(-alpha * (math.pi / L) ** 2 * m**2 * tb) / m * np.sin(m * math.pi * xb / L)
    out = 4.0 / math.pi * terms.sum(axis=-1)
    return float(out) if out.ndim == 0 else out


def flux_amplitude(lam):
    """q0 = 1 / (sqrt(pi) erf(lam)) for the dimensionless alpha = beta = T0 = k_L = 1 case."""
    return 1.0 / (SQRT_PI * math.erf(lam))
