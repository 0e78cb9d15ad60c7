# No closed form for a sinusoidal surface temperature, so check the walk against
# the explicit front-tracking scheme on a finer grid.
import numpy as np

from rwstefan import (FdmConfig, PhysicalParams, Sinusoid, StefanRunConfig, make_grid,
                      simulate_stefan, solve_fdm_stefan)

params = PhysicalParams.dimensionless(1.0, 2.0)
fdm = solve_fdm_stefan(FdmConfig(dx=0.005, t_max=1.0, params=params, driver=Sinusoid()))
rw = simulate_stefan(StefanRunConfig(grid=make_grid(1.0, 0.01, 1.0, 1.0), params=params,
                                     driver=Sinusoid(), n=10_000, seed=5))

jf, jr = fdm.time_index(1.0), rw.time_index(1.0)
x = rw.x[rw.x <= 0.4 + 1e-12]
ref = np.interp(x, fdm.x, fdm.temperatures[:, jf])
for xi, a, b in list(zip(x, rw.temperatures[: x.size, jr], ref))[::5]:
    print(f"x={xi:.2f}  walk={a:.4f}  fdm={b:.4f}")
print("max difference", np.abs(rw.temperatures[: x.size, jr] - ref).max())
print("front at t=1: walk", rw.front_at(1.0), "fdm", fdm.front[jf])
