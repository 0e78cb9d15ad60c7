# Two more drivers with closed forms: f(t) = e^t - 1 moves the front at unit speed,
# and a 1/sqrt(t) flux reproduces the unit constant-temperature case.
from rwstefan import (Constant, Exponential, InverseSqrtFlux, PhysicalParams, StefanRunConfig,
                      analytic, make_grid, simulate_stefan, simulate_stefan_flux)

unit = PhysicalParams.dimensionless(1.0, 1.0)

cfg = StefanRunConfig(grid=make_grid(1.0, 0.01, 1.5, 1.0), params=unit, driver=Exponential(),
                      n=10_000, seed=0)
res = simulate_stefan(cfg)
print("exponential driver: s(1) =", res.front_at(1.0), "expected", 1.0 + cfg.s0)

q0 = analytic.flux_amplitude(analytic.solve_lambda(1.0, 1.0, tol=1e-12).lam)
print("flux amplitude", q0)
grid = make_grid(1.0, 0.01, 1.0, 0.6)
flux = simulate_stefan_flux(StefanRunConfig(grid=grid, params=unit, driver=InverseSqrtFlux(q0),
                                            n=10_000, seed=0))
dirichlet = simulate_stefan(StefanRunConfig(grid=grid, params=unit, driver=Constant(1.0),
                                            n=10_000, seed=0))
window = (flux.t >= 0.1) & (flux.t <= 0.6)
print("mean surface temperature under the flux:", flux.temperatures[0, window].mean())
print("front, flux vs dirichlet:", flux.front[-1], dirichlet.front[-1])
