"""Domain types and the discretization contract shared by all solvers.

Units are whatever the caller chooses, as long as they are consistent.
Validation scenarios are dimensionless (alpha = beta = 1); the water preset
uses mm, s and K.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

__all__ = [
    "ConfigError",
    "PhysicalParams",
    "GridSpec",
    "BoundaryDriver",
    "Constant",
    "Exponential",
    "Sinusoid",
    "SampledTemperature",
    "InverseSqrtFlux",
    "SampledFlux",
    "SolutionField",
    "make_grid",
    "water_params",
    "round_half_away",
]


class ConfigError(ValueError):
    """Invalid scenario parameters."""


def _positive(name, value):
    if not (isinstance(value, (int, float, np.floating, np.integer)) and value > 0):
        raise ConfigError(f"{name} must be positive, got {value!r}")
    if not math.isfinite(value) and name not in ("L",):
        raise ConfigError(f"{name} must be finite, got {value!r}")


def round_half_away(x):
    """Round to nearest integer, ties away from zero."""
    x = np.asarray(x, dtype=float)
    out = np.sign(x) * np.floor(np.abs(x) + 0.5)
    return out.astype(np.int64) if out.ndim else int(out)


@dataclass(frozen=True)
class PhysicalParams:
    """Material constants of the liquid phase.

    ``alpha`` may be given directly (the dimensionless scenarios) or derived
    from ``k_L / (rho * c)``. ``beta`` is always ``l / c``.
    """

    alpha: float = 1.0
    k_L: float = 1.0
    rho: float = 1.0
    c: float = 1.0
    l: float = 1.0
    units: str = "dimensionless"

    def __post_init__(self):
        for name in ("alpha", "k_L", "rho", "c", "l"):
            _positive(name, getattr(self, name))

    @classmethod
    def from_conductivity(cls, k_L, rho, c, l, units="SI"):
        return cls(alpha=k_L / (rho * c), k_L=k_L, rho=rho, c=c, l=l, units=units)

    @classmethod
    def dimensionless(cls, alpha=1.0, beta=1.0):
        """alpha and beta given directly, with rho = c = 1 and k_L = alpha."""
        return cls(alpha=alpha, k_L=alpha, rho=1.0, c=1.0, l=beta)

    @property
    def beta(self):
        return self.l / self.c

    @property
    def is_consistent(self):
        """True when alpha agrees with k_L/(rho c) to 1e-12 relative."""
        derived = self.k_L / (self.rho * self.c)
        return abs(self.alpha - derived) <= 1e-12 * derived


def water_params():
    """Liquid water at 0 degC in mm, s, K.

    c = 4.22 kJ/(kg K) and l = 334 kJ/kg, so beta = l/c ~ 79.15 K. The
    diffusivity 0.1429 mm^2/s is taken as given; rho is expressed per mm^3 and
    k_L is chosen so that k_L/(rho c) reproduces it.
    """
    c = 4.22e3  # J/(kg K)
    l = 334e3  # J/kg
    rho = 1000.0e-9  # kg/mm^3
    alpha = 0.1429  # mm^2/s
    return PhysicalParams(alpha=alpha, k_L=alpha * rho * c, rho=rho, c=c, l=l,
                          units="mm/s/K")


@dataclass(frozen=True)
class GridSpec:
    """Uniform space/time grid coupled by ``dt = dx**2 / (2 alpha)``.

    Cell ``i`` sits at ``x_i = i * dx``; cell 0 is the fixed boundary. The
    stored time levels are ``t_j = j * dt`` for ``j = 0 .. N_t``.
    """

    dx: float
    dt: float
    N_x: int
    N_t: int

    def __post_init__(self):
        _positive("dx", self.dx)
        _positive("dt", self.dt)
        if int(self.N_x) != self.N_x or self.N_x < 2:
            raise ConfigError(f"N_x must be an integer >= 2, got {self.N_x!r}")
        if int(self.N_t) != self.N_t or self.N_t < 1:
            raise ConfigError(f"N_t must be an integer >= 1, got {self.N_t!r}")

    @property
    def L(self):
        return self.N_x * self.dx

    @property
    def t_max(self):
        return self.N_t * self.dt

    @property
    def x(self):
        return np.arange(self.N_x) * self.dx

    @property
    def t(self):
        return np.arange(self.N_t + 1) * self.dt

    def alpha(self):
        """Diffusivity implied by the walk coupling."""
        return self.dx**2 / (2.0 * self.dt)

    def validate(self, alpha):
        expected = self.dx**2 / (2.0 * alpha)
        if abs(self.dt - expected) > 1e-12 * expected:
            raise ConfigError(
                f"dt={self.dt!r} breaks the walk coupling dt = dx^2/(2 alpha) = {expected!r}")
        return self


def _ceil_ratio(a, b):
    # guard against 0.5/5e-5 = 10000.000000000002 style round-off
    q = a / b
    r = round(q)
    return int(r) if abs(q - r) <= 1e-9 * max(1.0, abs(q)) else math.ceil(q)


def make_grid(alpha, dx, L, t_max):
    """Build the grid for a walk with step ``dx`` in a medium of diffusivity ``alpha``.

    ``L`` may be ``math.inf`` for free-space walks; ``N_x`` is then left at 2
    and only the time axis is meaningful.
    """
    for name, value in (("alpha", alpha), ("dx", dx), ("L", L), ("t_max", t_max)):
        _positive(name, value)
    if dx > L:
        raise ConfigError(f"dx={dx!r} exceeds domain length L={L!r}")
    dt = dx * dx / (2.0 * alpha)
    N_x = max(2, _ceil_ratio(L, dx)) if math.isfinite(L) else 2
    N_t = max(1, _ceil_ratio(t_max, dt))
    return GridSpec(dx=dx, dt=dt, N_x=N_x, N_t=N_t)


# --- boundary drivers -------------------------------------------------------

class BoundaryDriver:
    """Time-dependent condition at the fixed boundary x = 0.

    Dirichlet drivers return a temperature ``f(t)``; flux drivers return the
    gradient ``h(t) = dT/dx(0, t)``.
    """

    kind = "dirichlet"

    def __call__(self, t):
        raise NotImplementedError

    def describe(self):
        raise NotImplementedError

    @property
    def is_flux(self):
        return self.kind == "flux"


@dataclass(frozen=True)
class Constant(BoundaryDriver):
    T0: float = 1.0

    def __call__(self, t):
        return self.T0 + 0.0 * np.asarray(t, dtype=float)

    def describe(self):
        return f"const:{self.T0!r}"


@dataclass(frozen=True)
class Exponential(BoundaryDriver):
    """f(t) = exp(t) - 1; exact Stefan solution s = t when beta = 1."""

    def __call__(self, t):
        return np.expm1(np.asarray(t, dtype=float))

    def describe(self):
        return "exp"


@dataclass(frozen=True)
class Sinusoid(BoundaryDriver):
    def __call__(self, t):
        return np.sin(np.asarray(t, dtype=float))

    def describe(self):
        return "sin"


def _check_series(times, values):
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.ndim != 1 or times.shape != values.shape or times.size < 2:
        raise ConfigError("a sampled series needs at least two (time, value) pairs")
    if not (np.all(np.isfinite(times)) and np.all(np.isfinite(values))):
        raise ConfigError("sampled series contains non-finite entries")
    bad = np.flatnonzero(np.diff(times) <= 0)
    if bad.size:
        raise ConfigError(f"sample times must be strictly increasing (row {bad[0] + 1})")
    return times, values


@dataclass(frozen=True, eq=False)
class _Sampled(BoundaryDriver):
    times: np.ndarray
    values: np.ndarray
    mode: str = "linear"
    label: str = ""
    t_max: Optional[float] = None

    def __post_init__(self):
        times, values = _check_series(self.times, self.values)
        times.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        if self.mode not in ("linear", "hold"):
            raise ConfigError(f"unknown interpolation mode {self.mode!r}")

    @property
    def extrapolated(self):
        """True when t_max runs past the last sample."""
        return self.t_max is not None and self.t_max > self.times[-1]

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.mode == "linear":
            return np.interp(t, self.times, self.values)
        idx = np.clip(np.searchsorted(self.times, t, side="right") - 1, 0, None)
        return self.values[idx]


class SampledTemperature(_Sampled):
    def describe(self):
        return f"csv:{self.label}" if self.label else "csv"


class SampledFlux(_Sampled):
    kind = "flux"

    def describe(self):
        return f"fluxcsv:{self.label}" if self.label else "fluxcsv"


@dataclass(frozen=True)
class InverseSqrtFlux(BoundaryDriver):
    """h(t) = -q0 / (k_L sqrt(t)); equivalent to a constant surface temperature."""

    q0: float = 0.9108
    k_L: float = 1.0
    kind = "flux"

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            return -self.q0 / (self.k_L * np.sqrt(t))

    def describe(self):
        return f"flux:{self.q0!r}"


# --- results ----------------------------------------------------------------

@dataclass
class SolutionField:
    """Temperatures on the (x, t) grid plus run metadata.

    ``temperatures[i, j]`` is T(x_i, t_j). ``front`` holds s(t_j) for Stefan
    runs; both arrays stop at ``n_steps`` when a run is truncated.
    """

    x: np.ndarray
    t: np.ndarray
    temperatures: np.ndarray
    front: Optional[np.ndarray] = None
    counts: Optional[np.ndarray] = None
    ledger: Optional[dict] = None
    metadata: dict = field(default_factory=dict)

    def time_index(self, t_star):
        if t_star < self.t[0] - 1e-12 or t_star > self.t[-1] + 0.5 * (self.t[1] - self.t[0]):
            raise ConfigError(f"t={t_star!r} outside the simulated horizon [0, {self.t[-1]!r}]")
        return int(np.argmin(np.abs(self.t - t_star)))

    def cross_section(self, t_star):
        return self.temperatures[:, self.time_index(t_star)]

    def front_at(self, t_star):
        if self.front is None:
            raise ConfigError("this run has no moving front")
        return float(self.front[self.time_index(t_star)])
