# Melting driven by a constant surface temperature, against the similarity solution.
import numpy as np

from rwstefan import (Constant, PhysicalParams, StefanRunConfig, analytic, make_grid,
                      simulate_stefan)

params = PhysicalParams.dimensionless(alpha=1.0, beta=1.0)
lam = analytic.solve_lambda(params.beta, 1.0, tol=1e-12).lam
print("lambda", lam)

cfg = StefanRunConfig(grid=make_grid(1.0, 0.01, 1.0, 0.5), params=params,
                      driver=Constant(1.0), n=10_000, seed=3)
res = simulate_stefan(cfg)

# the walk starts with the front one cell in, so compare against dx + s(t)
for t in (0.1, 0.25, 0.5):
    print(f"t={t}  s_rw={res.front_at(t):.4f}  exact={cfg.s0 + analytic.stefan_s(t, params, lam):.4f}")

j = res.time_index(0.5)
x = res.x[:41]
exact = analytic.stefan_T(x, 0.5, params, 1.0, lam, outside="zero")
print("max |T_rw - T| on [0, 0.4]:", np.abs(res.temperatures[:41, j] - exact).max())
print("ledger", res.ledger)
