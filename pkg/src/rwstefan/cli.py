"""Command-line front end: ``rwstefan <command> [flags]``.

Every command writes its data files plus ``manifest.json`` into ``--out``.
Exit codes: 0 ok, 1 configuration error, 2 I/O error, 3 numerical
non-convergence.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from . import __version__, analytic, harness, ingest, rng
from .core import (
    ConfigError,
    Constant,
    Exponential,
    InverseSqrtFlux,
    PhysicalParams,
    Sinusoid,
    make_grid,
    water_params,
)
from .fdm import FdmConfig, solve_fdm_stefan
from .rw_solver import (
    StefanRunConfig,
    simulate_fixed_dirichlet,
    simulate_free,
    simulate_stefan,
    simulate_stefan_flux,
)

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_NUMERIC = 0, 1, 2, 3
MAX_ROWS = 2000


# --- driver mini-language ---------------------------------------------------

def _series_path(text):
    path = Path(text)
    if path.exists():
        return path
    bundled = ingest.bundled_series_path(path.name)
    if bundled.exists():
        return bundled
    if path.name.startswith("orebro"):
        return ingest.bundled_series_path()
    raise FileNotFoundError(f"no such series file: {text}")


def parse_driver(spec, t_max, time_unit="s", k_L=1.0):
    """``const:<T0>``, ``exp``, ``sin``, ``csv:<path>``, ``flux:<q0>`` or ``fluxcsv:<path>``."""
    kind, _, arg = spec.partition(":")
    if kind == "const":
        return Constant(float(arg) if arg else 1.0)
    if kind == "exp":
        return Exponential()
    if kind == "sin":
        return Sinusoid()
    if kind == "flux":
        return InverseSqrtFlux(float(arg) if arg else 0.9108, k_L=k_L)
    if kind in ("csv", "fluxcsv"):
        if not arg:
            raise ConfigError(f"driver {kind} needs a path, e.g. {kind}:data.csv")
        series = ingest.load_series(_series_path(arg), time_unit=time_unit)
        if t_max is None:
            t_max = float(series.times[-1])
        return ingest.driver_from_series(series, t_max, flux=kind == "fluxcsv")
    raise ConfigError(f"unknown driver {spec!r}")


# --- output -----------------------------------------------------------------

def _fmt(v):
    return repr(float(v))


def write_field(path, x, t, temps, fmt="csv", stride=1):
    """Rows are time levels; the header row holds x, the first column t."""
    rows = range(0, len(t), stride)
    if len(t) and (len(t) - 1) % stride:
        rows = list(rows) + [len(t) - 1]
    if fmt == "json":
        payload = {"x": [float(v) for v in x], "t": [float(t[j]) for j in rows],
                   "temperature": [[float(v) for v in temps[:, j]] for j in rows],
                   "layout": "temperature[time_index][x_index]"}
        path.write_text(json.dumps(payload))
        return
    with path.open("w") as fh:
        fh.write("t\\x," + ",".join(_fmt(v) for v in x) + "\n")
        for j in rows:
            fh.write(_fmt(t[j]) + "," + ",".join(_fmt(v) for v in temps[:, j]) + "\n")


def write_columns(path, names, columns, fmt="csv"):
    if fmt == "json":
        path.write_text(json.dumps({n: [float(v) for v in c] for n, c in zip(names, columns)}))
        return
    with path.open("w") as fh:
        fh.write(",".join(names) + "\n")
        for row in zip(*columns):
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _stride(args, n_levels):
    if args.stride:
        return args.stride
    return max(1, math.ceil(n_levels / MAX_ROWS))


# --- parameters ----------------------------------------------------------------

def _params(args):
    if args.water:
        return water_params()
    return PhysicalParams.dimensionless(args.alpha, args.beta)


def _defaults(args, **water_defaults):
    """Fill unset numeric flags from the dimensionless or water presets."""
    base = dict(dx=0.01, n=10_000, tmax=0.5, L=1.0)
    base.update({k: v for k, v in water_defaults.items() if not args.water})
    if args.water:
        base.update(dx=1.0, n=100, L=100.0, tmax=None)
    for key, value in base.items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)


def _suffix(args):
    return "json" if args.format == "json" else "csv"


# --- commands -----------------------------------------------------------------

def cmd_lambda(args, out):
    sol = analytic.solve_lambda(args.beta, args.t0, tol=args.tol, max_iter=args.max_iter)
    q0 = analytic.flux_amplitude(sol.lam)
    summary = {"lambda": sol.lam, "residual": sol.residual, "iterations": sol.iterations,
               "method": sol.method, "q0": q0}
    (out / "lambda.json").write_text(json.dumps(summary, indent=2))
    print(f"lambda={sol.lam:.10f} q0={q0:.6f} residual={sol.residual:.3e} "
          f"iterations={sol.iterations} ({sol.method})")
    return summary


def cmd_free(args, out):
    alpha = args.alpha
    dx = args.dx if args.dx is not None else math.sqrt(2) / 10
    res = simulate_free(args.walkers, 0.0, args.steps, dx, seed=args.seed,
                        partitions=args.partitions, workers=args.workers)
    t = args.steps * dx * dx / (2 * alpha)
    exact = analytic.gaussian_T(res.centers, t, alpha)
    write_columns(out / f"histogram.{_suffix(args)}", ["x", "count", "density", "gaussian"],
                  [res.centers, res.counts, res.density, exact], args.format)
    l1 = float(np.sum(np.abs(res.density - exact)) * 2 * dx)
    print(f"t={t:g} walkers={args.walkers} variance={res.positions.var():.6g} "
          f"(expected {args.steps * dx * dx:.6g}) L1={l1:.4f}")
    return {"t": t, "l1": l1, "dx": dx}


def cmd_heat(args, out):
    _defaults(args, tmax=0.4)
    grid = make_grid(args.alpha, args.dx, args.L, args.tmax)
    res = simulate_fixed_dirichlet(grid, g=args.initial, f0=0.0, fL=0.0, n=args.n, seed=args.seed,
                                   partitions=args.partitions, workers=args.workers)
    stride = _stride(args, len(res.t))
    write_field(out / f"field.{_suffix(args)}", res.x, res.t, res.temperatures, args.format, stride)
    mid = grid.N_x // 2
    t = res.t[::stride]
    fourier = args.initial * analytic.fourier_T(res.x[mid], t, grid.L, args.alpha, args.terms)
    write_columns(out / f"midpoint.{_suffix(args)}", ["t", "T_rw", "T_fourier"],
                  [t, res.temperatures[mid, ::stride], fourier], args.format)
    print(f"peak T={res.temperatures[1:-1].max():.4f} runtime={res.metadata['runtime_s']:.2f}s")
    return {"stride": stride, "grid": [grid.dx, grid.dt, grid.N_x, grid.N_t]}


def _stefan_common(args, out, flux):
    _defaults(args)
    params = _params(args)
    driver = parse_driver(args.driver, args.tmax, args.time_unit, k_L=params.k_L)
    if args.tmax is None:
        args.tmax = float(driver.times[-1]) if hasattr(driver, "times") else 0.5
    grid = make_grid(params.alpha, args.dx, args.L, args.tmax)
    cfg = StefanRunConfig(grid=grid, params=params, driver=driver, n=args.n, seed=args.seed,
                          partitions=args.partitions, workers=args.workers,
                          front_update=args.front_update)
    res = simulate_stefan_flux(cfg) if flux else simulate_stefan(cfg)
    stride = _stride(args, len(res.t))
    sfx = _suffix(args)
    write_field(out / f"field.{sfx}", res.x, res.t, res.temperatures, args.format, stride)
    idx = list(range(0, len(res.t), stride))
    if idx and idx[-1] != len(res.t) - 1:
        idx.append(len(res.t) - 1)
    write_columns(out / f"front.{sfx}", ["t", "s"], [res.t[idx], res.front[idx]], args.format)
    (out / "ledger.json").write_text(json.dumps(res.ledger, indent=2))
    meta = {k: v for k, v in res.metadata.items() if k != "runtime_s"}
    print(f"final s={res.front[-1]:.6g} peak T={res.temperatures.max():.4f} "
          f"runtime={res.metadata['runtime_s']:.2f}s"
          + (" [truncated: front reached domain end]" if res.metadata["truncated"] else ""))
    return {"stride": stride, "units": params.units, "grid": [grid.dx, grid.dt, grid.N_x, grid.N_t],
            "run": meta, "runtime_s": res.metadata["runtime_s"]}


def cmd_stefan(args, out):
    return _stefan_common(args, out, flux=False)


def cmd_stefan_flux(args, out):
    return _stefan_common(args, out, flux=True)


def cmd_fdm(args, out):
    if args.dx is None:
        args.dx = 1.0 if args.water else 0.005
    _defaults(args)
    params = _params(args)
    driver = parse_driver(args.driver, args.tmax, args.time_unit)
    if args.tmax is None:
        args.tmax = float(driver.times[-1]) if hasattr(driver, "times") else 0.5
    res = solve_fdm_stefan(FdmConfig(dx=args.dx, t_max=args.tmax, L=args.L, params=params,
                                     driver=driver, r=args.r))
    sfx = _suffix(args)
    write_field(out / f"field.{sfx}", res.x, res.t, res.temperatures, args.format, 1)
    write_columns(out / f"front.{sfx}", ["t", "s"], [res.t, res.front], args.format)
    print(f"final s={res.front[-1]:.6g} peak T={res.temperatures.max():.4f} "
          f"runtime={res.metadata['runtime_s']:.2f}s")
    return {"run": {k: v for k, v in res.metadata.items() if k != "runtime_s"}}


def cmd_converge(args, out):
    levels = [float(v) if args.sweep == "dx" else int(float(v)) for v in args.levels.split(",")]
    seeds = [args.seed + k for k in range(args.seeds)]
    rep = harness.run_convergence(args.scenario, args.sweep, levels, seeds,
                                  n=args.n or 10_000, dx=args.dx or 0.01, workers=args.workers)
    (out / "convergence.json").write_text(rep.to_json())
    (out / "convergence.csv").write_text(rep.to_csv())
    means = ", ".join(f"{lv}: {m:.4g}" for lv, m in zip(rep.levels, rep.means[rep.metric]))
    print(f"{rep.metric} means {{{means}}} monotone={rep.verdict}")
    return {"verdict": rep.verdict}


COMMANDS = {
    "lambda": cmd_lambda,
    "free": cmd_free,
    "heat": cmd_heat,
    "stefan": cmd_stefan,
    "stefan-flux": cmd_stefan_flux,
    "fdm": cmd_fdm,
    "converge": cmd_converge,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default="rwstefan-out", help="output directory")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    common.add_argument("--partitions", type=int, default=1,
                        help="random-stream partitions; results depend on this, not on --workers")
    common.add_argument("--alpha", type=float, default=1.0)
    common.add_argument("--beta", type=float, default=1.0)
    common.add_argument("--dx", type=float)
    common.add_argument("--n", type=int)
    common.add_argument("--tmax", type=float)
    common.add_argument("--L", type=float)
    common.add_argument("--driver", default="const:1")
    common.add_argument("--time-unit", choices=sorted(ingest.TIME_UNITS), default="s")
    common.add_argument("--water", action="store_true", help="water constants in mm/s/K")
    common.add_argument("--stride", type=int, default=0, help="write every k-th time level (0: auto)")

    p = argparse.ArgumentParser(prog="rwstefan", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"rwstefan {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("lambda", parents=[common], help="solve the transcendental equation for lambda")
    q.add_argument("--t0", type=float, default=1.0)
    q.add_argument("--tol", type=float, default=1e-10)
    q.add_argument("--max-iter", type=int, default=200)

    q = sub.add_parser("free", parents=[common], help="free-space walk histogram")
    q.add_argument("--walkers", type=int, default=100_000)
    q.add_argument("--steps", type=int, default=100)

    q = sub.add_parser("heat", parents=[common], help="slab with zero Dirichlet ends")
    q.add_argument("--initial", type=float, default=1.0, help="uniform initial temperature")
    q.add_argument("--terms", type=int, default=100, help="Fourier terms for the reference column")

    for name in ("stefan", "stefan-flux"):
        q = sub.add_parser(name, parents=[common], help=f"random-walk {name} run")
        q.add_argument("--front-update", choices=("immediate", "deferred"), default="immediate")

    q = sub.add_parser("fdm", parents=[common], help="finite-difference Stefan reference")
    q.add_argument("--r", type=float, default=0.4, help="alpha dt / dx^2")

    q = sub.add_parser("converge", parents=[common], help="convergence sweep over n or dx")
    q.add_argument("--scenario", choices=sorted(harness.SCENARIOS), default="constant")
    q.add_argument("--sweep", choices=("n", "dx"), default="n")
    q.add_argument("--levels", default="100,1000,10000")
    q.add_argument("--seeds", type=int, default=5)

    q = sub.add_parser("replay", help="rerun the command recorded in a manifest")
    q.add_argument("manifest")
    q.add_argument("--out", help="output directory (default: the manifest's)")
    return p


def _run(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "replay":
        manifest = json.loads(Path(args.manifest).read_text())
        replay_argv = list(manifest["argv"])
        if args.out:
            replay_argv += ["--out", args.out]
        return _run(replay_argv)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        details = COMMANDS[args.command](args, out)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    manifest = {
        "command": args.command,
        "argv": [a for a in argv if a is not None],
        "resolved": {k: v for k, v in vars(args).items() if k != "out"},
        "seed": args.seed,
        "workers": args.workers,
        "partitions": args.partitions,
        "output_dir": str(out),
        "rng": rng.ALGORITHM,
        "version": __version__,
        "details": details,
        "warnings": [str(w.message) for w in caught],
        "wall_clock_s": time.perf_counter() - start,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, default=str))
    return EXIT_OK


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        return _run(argv)
    except analytic.NonConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except harness.SweepError as exc:
        cause = exc.__cause__
        print(f"error: {exc}", file=sys.stderr)
        if isinstance(cause, analytic.NonConvergence):
            return EXIT_NUMERIC
        return EXIT_IO if isinstance(cause, OSError) else EXIT_CONFIG
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
