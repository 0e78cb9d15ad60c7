"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Statistical criteria are judged on means over five seeds.
"""

import math
import time

import numpy as np
import pytest
from scipy.optimize import bisect

from rwstefan import analytic as an
from rwstefan.core import (
    Constant,
    Exponential,
    InverseSqrtFlux,
    PhysicalParams,
    SampledTemperature,
    Sinusoid,
    make_grid,
    water_params,
)
from rwstefan.fdm import FdmConfig, solve_fdm_stefan
from rwstefan.harness import SCENARIOS, cross_section_error, front_error, run_convergence
from rwstefan.ingest import bundled_series_path, driver_from_series, load_series
from rwstefan.rw_solver import (
    StefanRunConfig,
    simulate_fixed_dirichlet,
    simulate_free,
    simulate_stefan,
    simulate_stefan_flux,
)

from conftest import assert_ledger_balanced

SEEDS = range(5)
UNIT = PhysicalParams.dimensionless(1.0, 1.0)


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {number:2d}] {'PASS' if ok else 'FAIL'}  {detail}")
        return ok

    return emit


def stefan_cfg(driver, seed, beta=1.0, dx=0.01, L=1.0, t_max=0.5, n=10_000):
    return StefanRunConfig(grid=make_grid(1.0, dx, L, t_max), params=PhysicalParams.dimensionless(1.0, beta),
                           driver=driver, n=n, seed=seed)


def test_01_transcendental_solver(report):
    sol = an.solve_lambda(1.0, 1.0, tol=1e-10)
    residual = abs(math.sqrt(math.pi) * sol.lam * math.exp(sol.lam**2) * math.erf(sol.lam) - 1.0)
    oracle = bisect(lambda z: math.sqrt(math.pi) * z * math.exp(z * z) * math.erf(z) - 1.0,
                    0.0, 2.0, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    q0 = an.flux_amplitude(sol.lam)
    elapsed = min(_timed(lambda: an.solve_lambda(1.0, 1.0, tol=1e-10)) for _ in range(20))
    ok = residual <= 1e-10 and abs(sol.lam - oracle) <= 1e-9 and abs(q0 - 0.9108) <= 5e-4 and elapsed < 1e-3
    assert report(1, ok, f"lambda={sol.lam:.12f} residual={residual:.1e} |lam-bisect|={abs(sol.lam - oracle):.1e} "
                         f"q0={q0:.5f} time={elapsed * 1e6:.0f}us")


def _timed(fn):
    start = time.perf_counter()
    fn()
    return time.perf_counter() - start


def test_02_free_space_walk(report):
    dx = math.sqrt(2) / 10  # 100 steps reach t = 1 with alpha = 1
    res = simulate_free(100_000, 0.0, 100, dx, seed=0)
    l1 = float(np.sum(np.abs(res.density - an.gaussian_T(res.centers, 1.0, 1.0))) * 2 * dx)
    ratio = res.positions.var() / (100 * dx * dx)
    ok = l1 <= 0.05 and abs(ratio - 1) <= 0.05
    assert report(2, ok, f"L1={l1:.4f} variance ratio={ratio:.4f}")


def test_03_fixed_boundary_heat(report):
    grid = make_grid(1.0, 0.01, 1.0, 0.4)
    times = (0.1, 0.2, 0.4)
    errs = np.empty((len(SEEDS), len(times)))
    for k, seed in enumerate(SEEDS):
        res = simulate_fixed_dirichlet(grid, 1.0, 0.0, 0.0, n=10_000, seed=seed)
        for i, t in enumerate(times):
            j = res.time_index(t)
            errs[k, i] = abs(res.temperatures[50, j] - an.fourier_T(0.5, res.t[j]))
    mean = errs.mean(axis=0)
    ok = bool(np.all(mean <= 0.05))
    assert report(3, ok, "mean |T_rw - fourier| at x=0.5: "
                  + ", ".join(f"t={t}: {m:.4f}" for t, m in zip(times, mean)))


def test_04_stefan_constant_temperature(report):
    sc = SCENARIOS["constant"]
    T_ora, s_ora = sc.oracles()
    linf, rms = [], []
    for seed in SEEDS:
        res = simulate_stefan(sc.config(10_000, 0.01, seed))
        linf.append(cross_section_error(res, T_ora, 0.5, (0.0, 0.4))[0])
        rms.append(front_error(res.t, res.front, s_ora, offset=0.01, t_range=(0.0, 0.5)))
    ok = np.mean(linf) <= 0.05 and np.mean(rms) <= 0.03
    assert report(4, ok, f"mean Linf={np.mean(linf):.4f} mean front RMS={np.mean(rms):.4f}")


def test_05_stefan_exponential_driver(report):
    dx = 0.01
    T_ora = lambda x, t: np.where(x <= t, np.expm1(t - np.asarray(x)), 0.0)
    s_end, linf = [], []
    for seed in SEEDS:
        res = simulate_stefan(stefan_cfg(Exponential(), seed, L=1.5, t_max=1.0))
        s_end.append(res.front_at(1.0))
        linf.append(cross_section_error(res, T_ora, 0.5, (0.0, 0.4))[0])
    err_s = abs(np.mean(s_end) - (dx + 1.0))
    ok = err_s <= 0.05 and np.mean(linf) <= 0.05
    assert report(5, ok, f"mean s(1)={np.mean(s_end):.4f} (target {dx + 1:.2f}) mean Linf(t=0.5)={np.mean(linf):.4f}")


def test_06_flux_driver(report):
    q0 = 0.9108
    mean_T0, diff = [], []
    for seed in SEEDS:
        flux = simulate_stefan_flux(stefan_cfg(InverseSqrtFlux(q0), seed, t_max=0.6))
        dirichlet = simulate_stefan(stefan_cfg(Constant(1.0), seed, t_max=0.6))
        window = (flux.t >= 0.1) & (flux.t <= 0.6)
        mean_T0.append(flux.temperatures[0, window].mean())
        j = flux.time_index(0.5)
        rows = flux.x <= 0.4 + 1e-12
        diff.append(np.abs(flux.temperatures[rows, j] - dirichlet.temperatures[rows, j]).max())
    ok = abs(np.mean(mean_T0) - 1.0) <= 0.1 and np.mean(diff) <= 0.1
    assert report(6, ok, f"mean T(0) over [0.1,0.6]={np.mean(mean_T0):.4f} "
                         f"mean |flux - dirichlet| at t=0.5={np.mean(diff):.4f}")


def test_07_random_walk_against_finite_differences(report):
    params = PhysicalParams.dimensionless(1.0, 2.0)
    fdm = solve_fdm_stefan(FdmConfig(dx=0.005, t_max=1.0, L=1.0, params=params, driver=Sinusoid()))
    jf = fdm.time_index(1.0)
    diffs = []
    for seed in SEEDS:
        res = simulate_stefan(stefan_cfg(Sinusoid(), seed, beta=2.0, t_max=1.0))
        j = res.time_index(1.0)
        rows = res.x <= 0.4 + 1e-12
        ref = np.interp(res.x[rows], fdm.x, fdm.temperatures[:, jf])
        diffs.append(np.abs(res.temperatures[rows, j] - ref).max())
    ok = np.mean(diffs) <= 0.05
    assert report(7, ok, f"mean max|RW - FDM| on [0,0.4] at t=1: {np.mean(diffs):.4f} "
                         f"(FDM s(1)={fdm.front[jf]:.4f})")


def test_08_convergence(report):
    by_n = run_convergence("constant", "n", (100, 1000, 10_000), SEEDS, dx=0.01)
    by_dx = run_convergence("constant", "dx", (0.02, 0.01, 0.005), SEEDS, n=10_000)
    ok = by_n.verdict and by_dx.verdict
    fmt = lambda r: ", ".join(f"{lv}: {m:.4f}" for lv, m in zip(r.levels, r.means[r.metric]))
    assert report(8, ok, f"n-sweep Linf {{{fmt(by_n)}}} -> {by_n.verdict}; "
                         f"dx-sweep front RMS {{{fmt(by_dx)}}} -> {by_dx.verdict}")


def _random_driver(rng):
    kind = rng.integers(4)
    if kind == 0:
        return Constant(float(rng.uniform(-2, 3)))
    if kind == 1:
        return Exponential()
    if kind == 2:
        return Sinusoid()
    values = rng.uniform(-3, 4, size=int(rng.integers(2, 6)))
    return SampledTemperature(times=np.linspace(0, 0.3, values.size), values=values)


def _fd_residual(f, x, t, alpha=1.0, h=1e-3):
    """u_t - alpha u_xx with fourth-order central differences."""
    c = np.array([1, -8, 0, 8, -1]) / 12.0
    d2 = np.array([-1, 16, -30, 16, -1]) / 12.0
    off = np.arange(-2, 3) * h
    u_t = sum(w * f(x, t + o) for w, o in zip(c, off)) / h
    u_xx = sum(w * f(x + o, t) for w, o in zip(d2, off)) / h**2
    return abs(u_t - alpha * u_xx)


def test_09_property_suite(report):
    rng = np.random.default_rng(2024)
    failures = []

    # bookkeeping and conservation on 100 randomized runs
    for i in range(100):
        beta = float(rng.choice([0.5, 1.0, 2.0]))
        cfg = stefan_cfg(_random_driver(rng), int(rng.integers(2**32)), beta=beta,
                         dx=float(rng.choice([0.05, 0.1])), t_max=0.3, n=int(rng.integers(20, 300)))
        res = simulate_stefan(cfg)
        led = res.ledger
        A = led["absorbed_front_pos"] + led["absorbed_front_neg"]
        s_final = res.metadata["final_front"]
        if led["injected"] != sum(v for k, v in led.items() if k != "injected"):
            failures.append(f"ledger run {i}")
        if not res.metadata["truncated"] and led["in_field"] != int(res.counts[:, -1].sum()):
            failures.append(f"in-field run {i}")
        K = round((s_final - cfg.s0) / cfg.front_step)
        if K != A or s_final != cfg.s0 + K * cfg.front_step:
            failures.append(f"front identity run {i}")

    # seed determinism and worker invariance on 10 randomized configs
    for i in range(10):
        cfg = stefan_cfg(_random_driver(rng), int(rng.integers(2**32)), dx=0.05, t_max=0.2, n=100)
        cfg = cfg.with_(partitions=int(rng.integers(2, 7)))
        a, b = simulate_stefan(cfg), simulate_stefan(cfg)
        c = simulate_stefan(cfg.with_(workers=int(rng.integers(2, 5))))
        assert_ledger_balanced(c.ledger)
        if not (np.array_equal(a.counts, b.counts) and np.array_equal(a.front, b.front)):
            failures.append(f"determinism config {i}")
        if not (np.array_equal(a.counts, c.counts) and np.array_equal(a.front, c.front)):
            failures.append(f"worker invariance config {i}")

    # monotone front for nonnegative drivers
    for i in range(10):
        drv = [Constant(float(rng.uniform(0, 3))), Exponential()][i % 2]
        res = simulate_stefan(stefan_cfg(drv, i, dx=0.05, n=200))
        if np.any(np.diff(res.front) < 0):
            failures.append(f"monotone run {i}")

    # analytic solutions satisfy the heat equation
    lam = an.solve_lambda(1.0, 1.0, tol=1e-12).lam
    worst = 0.0
    for t in (0.2, 0.5, 1.0):
        s = an.stefan_s(t, UNIT, lam)
        for x in np.linspace(0.05, 0.9, 6) * s:
            worst = max(worst, _fd_residual(lambda xx, tt: an.stefan_T(xx, tt, UNIT, 1.0, lam), x, t))
        for x in np.linspace(0.05, 0.9, 6) * t:
            worst = max(worst, _fd_residual(lambda xx, tt: math.exp(tt - xx) - 1, x, t))
        for x in np.linspace(-2, 2, 6):
            worst = max(worst, _fd_residual(lambda xx, tt: an.gaussian_T(xx, tt, 1.0), x, t))
    for x in np.linspace(0.1, 0.9, 5):
        worst = max(worst, _fd_residual(lambda xx, tt: an.fourier_T(xx, tt, K=200), x, 0.1))
    if worst > 1e-6:
        failures.append(f"PDE residual {worst:.1e}")

    ok = not failures
    assert report(9, ok, f"130 runs checked, worst PDE residual {worst:.1e}"
                         + (f"; failures: {failures}" if failures else "")), failures


def test_10_day_temperature_scenario(report):
    params = water_params()
    t_max = 62 * 3600.0
    driver = driver_from_series(load_series(bundled_series_path(), time_unit="h"), t_max)
    cfg = StefanRunConfig(grid=make_grid(params.alpha, 1.0, 100.0, t_max), params=params,
                          driver=driver, n=100, seed=0)
    res = simulate_stefan(cfg)
    first_day = res.t <= 24 * 3600.0
    retreats = int(np.sum(np.diff(res.front[first_day]) < 0))
    completed = not res.metadata["truncated"] and t_max <= res.t[-1] < t_max + cfg.grid.dt
    crosses = driver.values.min() < 0 < driver.values.max()
    ok = completed and retreats > 0 and crosses
    assert report(10, ok, f"completed={completed} t_end={res.t[-1] / 3600:.2f}h retreat steps in first 24h={retreats} "
                          f"max s={res.front.max():.1f}mm final s={res.front[-1]:.1f}mm "
                          f"runtime={res.metadata['runtime_s']:.1f}s")
