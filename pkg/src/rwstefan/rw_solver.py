"""Random-walk engines for diffusion, the fixed slab and the one-phase Stefan problem.

Walkers are never stored individually. Each cell holds a signed integer count
(``n`` walkers per degree), and one step splits that count into left and right
movers. Away from the front a binomial draw per cell does this; the cells
touching the front are resolved walker by walker in ascending cell order so the
front moves, and is seen by later walkers, exactly when an absorption happens.

Cell ``i`` sits at ``x_i = i * dx`` and cell 0 is the fixed boundary. With the
front at ``s`` the front index is ``floor(s / dx)``; cells below it are liquid
and a walker stepping onto it (or past it) is absorbed, moving the front by
``+-dx / (beta * n)``.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import rng as rng_mod
from .core import (
    BoundaryDriver,
    ConfigError,
    Constant,
    GridSpec,
    PhysicalParams,
    SolutionField,
    round_half_away,
)

__all__ = [
    "FreeWalkResult",
    "StefanRunConfig",
    "simulate_free",
    "simulate_fixed_dirichlet",
    "simulate_stefan",
    "simulate_stefan_flux",
    "absorbed_ledger",
    "LEDGER_KEYS",
]

# Signed walker totals. ``absorbed_front_neg`` and ``absorbed_clamped`` are
# <= 0 because they count negative walkers; every entry is in walker units
# (n per degree), so ``injected`` equals the sum of the other five.
LEDGER_KEYS = (
    "injected",
    "in_field",
    "absorbed_front_pos",
    "absorbed_front_neg",
    "absorbed_fixed",
    "absorbed_clamped",
)


def _new_ledger():
    return {k: 0 for k in LEDGER_KEYS}


class _Partitioner:
    """Maps cell (or walker) indices to streams in fixed contiguous blocks."""

    def __init__(self, size, partitions, seed, workers):
        if partitions < 1:
            raise ConfigError("partitions must be >= 1")
        if workers < 1:
            raise ConfigError("workers must be >= 1")
        self.partitions = int(partitions)
        self.block = max(1, math.ceil(size / self.partitions))
        self.gens = rng_mod.make_streams(seed, self.partitions)
        self.workers = int(workers)
        self._pool = ThreadPoolExecutor(self.workers) if self.workers > 1 else None

    def owner(self, i):
        return min(i // self.block, self.partitions - 1)

    def binomial_halves(self, counts, stop):
        """Right movers for cells 0..stop-1, each partition on its own stream."""
        out = np.zeros(stop, dtype=np.int64)
        jobs = []
        for p in range(self.partitions):
            lo = p * self.block
            hi = stop if p == self.partitions - 1 else min(stop, lo + self.block)
            if lo >= hi:
                continue
            jobs.append((p, lo, hi))

        def draw(job):
            p, lo, hi = job
            out[lo:hi] = rng_mod.right_movers(self.gens[p], counts[lo:hi])

        if self._pool is None or len(jobs) < 2:
            for job in jobs:
                draw(job)
        else:
            list(self._pool.map(draw, jobs))
        return out

    def close(self):
        if self._pool is not None:
            self._pool.shutdown()


# --- free space -------------------------------------------------------------

@dataclass
class FreeWalkResult:
    """Histogram of final positions on bins of width ``2 dx`` centred on the lattice."""

    centers: np.ndarray
    counts: np.ndarray
    positions: np.ndarray
    n_walkers: int
    dx: float
    steps: int

    @property
    def density(self):
        return self.counts / (self.n_walkers * 2.0 * self.dx)

    def as_dict(self):
        return {float(c): int(k) for c, k in zip(self.centers, self.counts)}


def simulate_free(n_walkers, x0=0.0, steps=1, dx=1.0, seed=0, partitions=1, workers=1):
    """Release ``n_walkers`` at ``x0`` and let each take ``steps`` unbiased steps of ``dx``."""
    if n_walkers < 1 or steps < 1:
        raise ConfigError("need n_walkers >= 1 and steps >= 1")
    part = _Partitioner(n_walkers, partitions, seed, workers)
    try:
        n_right = np.zeros(n_walkers, dtype=np.int64)
        for p in range(part.partitions):
            lo = p * part.block
            hi = n_walkers if p == part.partitions - 1 else min(n_walkers, lo + part.block)
            if lo < hi:
                # sum of `steps` fair +-1 increments, one draw per walker
                n_right[lo:hi] = part.gens[p].binomial(steps, 0.5, size=hi - lo)
    finally:
        part.close()
    k = 2 * n_right - steps
    positions = x0 + dx * k
    lattice = np.arange(-steps, steps + 1, 2)
    counts = np.bincount((k + steps) // 2, minlength=steps + 1)
    return FreeWalkResult(centers=x0 + dx * lattice, counts=counts, positions=positions,
                          n_walkers=n_walkers, dx=dx, steps=steps)


# --- fixed slab ---------------------------------------------------------------

def simulate_fixed_dirichlet(grid, g=1.0, f0=0.0, fL=0.0, n=10_000, seed=0,
                             partitions=1, workers=1):
    """Heat conduction on [0, L] with Dirichlet data at both ends.

    The slab has ``N_x + 1`` nodes, the last one at ``x = L``. ``g``, ``f0``
    and ``fL`` may be numbers or callables (of x and t respectively).
    """
    start = time.perf_counter()
    N = grid.N_x + 1
    x = np.arange(N) * grid.dx
    t = grid.t
    gfun = g if callable(g) else (lambda xs, _g=g: np.full_like(xs, float(_g)))
    f0fun = f0 if callable(f0) else (lambda tt, _v=f0: float(_v))
    fLfun = fL if callable(fL) else (lambda tt, _v=fL: float(_v))

    ledger = _new_ledger()
    counts = np.zeros(N, dtype=np.int64)
    counts[1:-1] = round_half_away(n * np.asarray(gfun(x[1:-1]), dtype=float))
    ledger["injected"] += int(counts.sum())

    field_counts = np.zeros((N, grid.N_t + 1), dtype=np.int64)
    part = _Partitioner(N, partitions, seed, workers)
    try:
        for j in range(grid.N_t + 1):
            b0 = int(round_half_away(n * float(f0fun(t[j]))))
            bL = int(round_half_away(n * float(fLfun(t[j]))))
            counts[0], counts[-1] = b0, bL
            ledger["injected"] += b0 + bL
            field_counts[:, j] = counts
            if j == grid.N_t:
                break
            sign = np.sign(counts)
            R = part.binomial_halves(counts, N)
            Rs = sign * R
            Ls = counts - Rs
            new = np.zeros(N, dtype=np.int64)
            new[1:] += Rs[:-1]
            new[:-1] += Ls[1:]
            # anything landing on a boundary node, or leaving the slab, is gone
            ledger["absorbed_fixed"] += int(new[0] + new[-1] + Ls[0] + Rs[-1])
            new[0] = new[-1] = 0
            counts = new
    finally:
        part.close()
    ledger["in_field"] = int(counts.sum())
    meta = {
        "solver": "rw_fixed_dirichlet",
        "seed": seed,
        "n": n,
        "dx": grid.dx,
        "dt": grid.dt,
        "partitions": part.partitions,
        "workers": part.workers,
        "rng": rng_mod.ALGORITHM,
        "runtime_s": time.perf_counter() - start,
    }
    return SolutionField(x=x, t=t, temperatures=field_counts / n, counts=field_counts,
                         ledger=ledger, metadata=meta)


# --- Stefan -------------------------------------------------------------------

@dataclass(frozen=True)
class StefanRunConfig:
    """Everything that determines a Stefan run.

    ``guard_ratio`` bounds the per-walker front step: ``dx / (beta n)`` must
    not exceed ``guard_ratio * dx``. ``front_update="deferred"`` applies
    absorptions to the walker classification only at the end of each step.
    """

    grid: GridSpec
    params: PhysicalParams = field(default_factory=PhysicalParams)
    driver: BoundaryDriver = field(default_factory=Constant)
    n: int = 10_000
    seed: int = 0
    partitions: int = 1
    workers: int = 1
    initial_front: Optional[float] = None
    guard_ratio: float = 0.1
    check_guard: bool = True
    front_update: str = "immediate"

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ConfigError(f"n must be a positive integer, got {self.n!r}")
        if self.front_update not in ("immediate", "deferred"):
            raise ConfigError(f"front_update must be 'immediate' or 'deferred', got {self.front_update!r}")
        self.grid.validate(self.params.alpha)
        s0 = self.s0
        if not (self.grid.dx <= s0 < (self.grid.N_x - 1) * self.grid.dx):
            raise ConfigError(f"initial_front={s0!r} must lie in [dx, (N_x-1) dx)")
        if self.check_guard and self.front_step > self.guard_ratio * self.grid.dx:
            need = math.ceil(1.0 / (self.params.beta * self.guard_ratio))
            raise ConfigError(
                f"front step ds/n = {self.front_step:.3g} exceeds {self.guard_ratio} dx; "
                f"raise n to at least {need}")

    @property
    def s0(self):
        return self.grid.dx if self.initial_front is None else float(self.initial_front)

    @property
    def delta_s(self):
        """Front displacement for one degree over one cell: (c/l) dx."""
        return self.grid.dx / self.params.beta

    @property
    def front_step(self):
        return self.delta_s / self.n

    def with_(self, **changes):
        return replace(self, **changes)


class _StefanWalk:
    def __init__(self, cfg):
        self.cfg = cfg
        g = cfg.grid
        self.N = g.N_x
        self.dx = g.dx
        self.n = int(cfg.n)
        self.s0 = cfg.s0
        self.ds_n = cfg.front_step
        # net absorbed walkers; s = s0 + K * ds_n keeps the front bookkeeping exact
        self.K = 0
        self.K_min = -math.floor((self.s0 - self.dx) / self.ds_n + 1e-9)
        self.ledger = _new_ledger()
        self.clamped = False
        self.counts = np.zeros(self.N, dtype=np.int64)
        self.part = _Partitioner(self.N, cfg.partitions, cfg.seed, cfg.workers)
        self.immediate = cfg.front_update == "immediate"

    @property
    def s(self):
        return self.s0 + self.K * self.ds_n

    def front_index(self, K=None):
        K = self.K if K is None else K
        return math.floor((self.s0 + K * self.ds_n) / self.dx)

    def _absorptions_to_cross(self, sign):
        """Same-sign absorptions needed before the front index changes (None if never)."""
        f = self.front_index()
        if sign > 0:
            k = max(1, math.ceil(((f + 1) * self.dx - self.s0) / self.ds_n - self.K))
            while k > 1 and self.front_index(self.K + k - 1) > f:
                k -= 1
            while self.front_index(self.K + k) <= f:
                k += 1
            return k
        k = max(1, math.ceil(self.K - (f * self.dx - self.s0) / self.ds_n))
        while k > 1 and self.front_index(self.K - k + 1) < f:
            k -= 1
        while self.front_index(self.K - k) >= f:
            k += 1
        if self.K - k < self.K_min:
            return None
        return k

    def _absorb(self, sign, a):
        if a == 0:
            return
        if sign > 0:
            self.K += a
            self.ledger["absorbed_front_pos"] += a
            return
        take = min(a, self.K - self.K_min)
        self.K -= take
        self.ledger["absorbed_front_neg"] -= take
        if a > take:
            self.ledger["absorbed_clamped"] -= a - take
            self.clamped = True

    def _serial_cell(self, i, c, new, f_step):
        sign = 1 if c > 0 else -1
        gen = self.part.gens[self.part.owner(i)]
        dirs = rng_mod.step_directions(gen, abs(int(c)))
        targets = i + dirs.astype(np.int64)
        pos = 0
        m = targets.size
        while pos < m:
            f = min(self.front_index(), self.N - 1) if self.immediate else f_step
            rest = targets[pos:]
            absorbing = rest >= f
            end = m - pos
            if self.immediate and absorbing.any():
                k = self._absorptions_to_cross(sign)
                if k is not None:
                    cum = np.cumsum(absorbing)
                    if cum[-1] >= k:
                        end = int(np.searchsorted(cum, k)) + 1
            seg = rest[:end]
            seg_abs = absorbing[:end]
            moved = seg[(~seg_abs) & (seg >= 1)]
            if moved.size:
                new += sign * np.bincount(moved, minlength=self.N)[: self.N]
            self.ledger["absorbed_fixed"] += sign * int(np.count_nonzero((~seg_abs) & (seg <= 0)))
            self._absorb(sign, int(np.count_nonzero(seg_abs)))
            pos += end

    def step(self):
        counts = self.counts
        F = min(self.front_index(), self.N - 1)
        new = np.zeros(self.N, dtype=np.int64)
        fast = max(F - 1, 0)  # cells 0..F-2 never reach the front this step
        if fast:
            R = self.part.binomial_halves(counts, fast)
            sign = np.sign(counts[:fast])
            Rs = sign * R
            Ls = counts[:fast] - Rs
            new[1:fast + 1] += Rs
            new[: fast - 1] += Ls[1:]
            self.ledger["absorbed_fixed"] += int(new[0] + Ls[0])
            new[0] = 0
        nz = np.flatnonzero(counts[fast:])
        for off in nz:
            i = fast + int(off)
            self._serial_cell(i, counts[i], new, F)
        new[0] = 0
        self.counts = new

    def close(self):
        self.part.close()


def _run_stefan(cfg, flux):
    start = time.perf_counter()
    g = cfg.grid
    driver = cfg.driver
    if flux != driver.is_flux:
        want = "a flux" if flux else "a Dirichlet"
        raise ConfigError(f"this solver needs {want} driver, got {driver.describe()}")
    walk = _StefanWalk(cfg)
    n = walk.n
    t = g.t
    field_counts = np.zeros((g.N_x, g.N_t + 1), dtype=np.int64)
    front = np.zeros(g.N_t + 1)
    truncated = False
    steps = g.N_t + 1
    try:
        if flux:
            walk.counts[1] += n
            walk.ledger["injected"] += n
        for j in range(g.N_t + 1):
            if walk.front_index() >= g.N_x - 1:
                truncated = True
                steps = j
                break
            if flux:
                b = 0 if j == 0 else int(round_half_away(
                    -n * g.dx * float(driver(t[j])) + walk.counts[1]))
            else:
                b = int(round_half_away(n * float(driver(t[j]))))
            walk.counts[0] = b
            walk.ledger["injected"] += b
            field_counts[:, j] = walk.counts
            front[j] = walk.s
            if j == g.N_t:
                break
            walk.step()
    finally:
        walk.close()
    walk.ledger["in_field"] = int(walk.counts.sum())
    field_counts = field_counts[:, :steps]
    meta = {
        "solver": "rw_stefan_flux" if flux else "rw_stefan",
        "seed": cfg.seed,
        "n": n,
        "dx": g.dx,
        "dt": g.dt,
        "alpha": cfg.params.alpha,
        "beta": cfg.params.beta,
        "units": cfg.params.units,
        "driver": driver.describe(),
        "partitions": walk.part.partitions,
        "workers": walk.part.workers,
        "rng": rng_mod.ALGORITHM,
        "front_update": cfg.front_update,
        "initial_front": walk.s0,
        "front_step": walk.ds_n,
        "net_front_walkers": walk.K,
        "final_front": walk.s,
        "truncated": truncated,
        "clamped": walk.clamped,
        "extrapolated_driver": bool(getattr(driver, "extrapolated", False)),
        "runtime_s": time.perf_counter() - start,
    }
    return SolutionField(x=g.x, t=t[:steps], temperatures=field_counts / n, front=front[:steps],
                         counts=field_counts, ledger=walk.ledger, metadata=meta)


def simulate_stefan(config):
    """One-phase Stefan run with a Dirichlet driver at x = 0."""
    return _run_stefan(config, flux=False)


def simulate_stefan_flux(config):
    """One-phase Stefan run with a prescribed surface gradient h(t).

    Cell 1 is seeded with ``n`` walkers; afterwards the boundary count is
    ``round(-n dx h(t_j) + counts[1])`` from a forward difference.
    """
    return _run_stefan(config, flux=True)


def absorbed_ledger(result):
    """The run's walker ledger as a tuple in ``LEDGER_KEYS`` order."""
    if result.ledger is None:
        raise ConfigError("result carries no walker ledger")
    return tuple(int(result.ledger[k]) for k in LEDGER_KEYS)
