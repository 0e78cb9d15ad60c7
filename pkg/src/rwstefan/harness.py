"""Error metrics, convergence sweeps and scenario runners."""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import analytic
from .core import ConfigError, Constant, Exponential, PhysicalParams, make_grid
from .rw_solver import StefanRunConfig, simulate_stefan

__all__ = [
    "cross_section_error",
    "front_error",
    "Scenario",
    "SCENARIOS",
    "ConvergenceReport",
    "run_convergence",
    "SweepError",
]


class SweepError(RuntimeError):
    """A run inside a sweep failed; the original error is the ``__cause__``."""


def cross_section_error(field, oracle, t_star, x_range=(0.0, 0.4)):
    """(L_inf, L2) of ``field`` minus ``oracle(x, t)`` on the nodes in ``x_range``.

    The time level is the one nearest ``t_star``. L2 is the discrete
    ``sqrt(dx * sum(e^2))``.
    """
    lo, hi = x_range
    j = field.time_index(t_star)
    x = np.asarray(field.x)
    mask = (x >= lo - 1e-12) & (x <= hi + 1e-12)
    if not mask.any():
        raise ConfigError(f"no grid nodes in x range {x_range!r}")
    err = field.temperatures[mask, j] - np.asarray(oracle(x[mask], field.t[j]), dtype=float)
    dx = x[1] - x[0] if x.size > 1 else 1.0
    return float(np.max(np.abs(err))), float(np.sqrt(dx * np.sum(err * err)))


def front_error(t, s, oracle_s, offset=0.0, t_range=None):
    """RMS of ``s - (offset + oracle_s(t))`` over the recorded steps (optionally a time window)."""
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    if s.size == 0:
        raise ConfigError("empty front trajectory")
    if t_range is not None:
        keep = (t >= t_range[0] - 1e-12) & (t <= t_range[1] + 1e-12)
        t, s = t[keep], s[keep]
    d = s - (offset + np.asarray(oracle_s(t), dtype=float))
    return float(np.sqrt(np.mean(d * d)))


@dataclass(frozen=True)
class Scenario:
    """A Stefan benchmark with a closed-form solution."""

    name: str
    driver: object
    beta: float = 1.0
    alpha: float = 1.0
    T0: float = 1.0
    L: float = 1.0
    t_max: float = 0.5
    t_star: float = 0.5
    x_range: tuple = (0.0, 0.4)

    @property
    def params(self):
        return PhysicalParams.dimensionless(self.alpha, self.beta)

    def oracles(self):
        """(T(x, t), s(t)) closed forms; T is zero beyond the front."""
        p = self.params
        if isinstance(self.driver, Exponential):
            def T(x, t):
                x = np.asarray(x, dtype=float)
                return np.where(x <= t, np.expm1(t - x), 0.0)

            return T, analytic.special_s
        lam = analytic.solve_lambda(self.beta, self.T0, tol=1e-12).lam
        return (lambda x, t: analytic.stefan_T(x, t, p, self.T0, lam, outside="zero"),
                lambda t: analytic.stefan_s(t, p, lam))

    def config(self, n, dx, seed):
        grid = make_grid(self.alpha, dx, self.L, self.t_max)
        return StefanRunConfig(grid=grid, params=self.params, driver=self.driver, n=n, seed=seed)


SCENARIOS = {
    "constant": Scenario("constant", Constant(1.0)),
    "exponential": Scenario("exponential", Exponential(), L=1.5, t_max=1.0),
}

METRICS = ("linf", "l2", "front_rms")


def _measure(args):
    scenario, n, dx, seed = args
    T_ora, s_ora = scenario.oracles()
    res = simulate_stefan(scenario.config(n, dx, seed))
    linf, l2 = cross_section_error(res, T_ora, scenario.t_star, scenario.x_range)
    rms = front_error(res.t, res.front, s_ora, offset=dx, t_range=(0.0, scenario.t_star))
    return {"linf": linf, "l2": l2, "front_rms": rms}


@dataclass
class ConvergenceReport:
    scenario: str
    sweep: str
    levels: list
    seeds: list
    metric: str
    errors: dict = field(default_factory=dict)  # metric -> levels x seeds

    @property
    def means(self):
        return {m: np.mean(np.asarray(v), axis=1).tolist() for m, v in self.errors.items()}

    @property
    def stds(self):
        return {m: np.std(np.asarray(v), axis=1, ddof=1).tolist() for m, v in self.errors.items()}

    @property
    def verdict(self):
        """True iff the mean of the sweep's metric strictly decreases level by level."""
        mean = self.means[self.metric]
        return bool(all(b < a for a, b in zip(mean, mean[1:])))

    def to_dict(self):
        return {
            "scenario": self.scenario,
            "sweep": self.sweep,
            "levels": list(self.levels),
            "seeds": list(self.seeds),
            "metric": self.metric,
            "errors": {m: np.asarray(v).tolist() for m, v in self.errors.items()},
            "means": self.means,
            "stds": self.stds,
            "verdict": self.verdict,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["scenario", "sweep", "level", "seed", *METRICS])
        for i, level in enumerate(self.levels):
            for k, seed in enumerate(self.seeds):
                w.writerow([self.scenario, self.sweep, level, seed,
                            *(repr(float(self.errors[m][i][k])) for m in METRICS)])
        return buf.getvalue()


def run_convergence(scenario="constant", sweep="n", levels=(100, 1000, 10_000), seeds=range(5),
                    n=10_000, dx=0.01, workers=1):
    """Sweep ``n`` (at fixed ``dx``) or ``dx`` (at fixed ``n``) over several seeds.

    The verdict uses the cross-section L_inf for an n-sweep and the front RMS
    for a dx-sweep.
    """
    if isinstance(scenario, str):
        try:
            scenario = SCENARIOS[scenario]
        except KeyError:
            raise ConfigError(f"unknown scenario {scenario!r}; choose from {sorted(SCENARIOS)}") from None
    levels = list(levels)
    seeds = list(seeds)
    if len(levels) < 2:
        raise ConfigError("a convergence sweep needs at least two levels")
    if len(seeds) < 3:
        raise ConfigError("a convergence sweep needs at least three seeds")
    if sweep not in ("n", "dx"):
        raise ConfigError(f"sweep must be 'n' or 'dx', got {sweep!r}")

    jobs = []
    for level in levels:
        for seed in seeds:
            jobs.append((scenario, int(level), dx, seed) if sweep == "n"
                        else (scenario, n, float(level), seed))
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_measure, jobs))
    else:
        results = []
        for job in jobs:
            try:
                results.append(_measure(job))
            except Exception as exc:
                where = job[1] if sweep == "n" else job[2]
                raise SweepError(f"{sweep}={where}, seed={job[3]}: {exc}") from exc

    errors = {m: [[0.0] * len(seeds) for _ in levels] for m in METRICS}
    for idx, res in enumerate(results):
        i, k = divmod(idx, len(seeds))
        for m in METRICS:
            errors[m][i][k] = res[m]
    metric = "linf" if sweep == "n" else "front_rms"
    return ConvergenceReport(scenario=scenario.name, sweep=sweep, levels=levels, seeds=seeds,
                             metric=metric, errors=errors)
