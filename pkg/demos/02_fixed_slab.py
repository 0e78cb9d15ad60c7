# A unit slab at T = 1 with both faces held at 0, compared against the Fourier series.
from rwstefan import analytic, make_grid, simulate_fixed_dirichlet

grid = make_grid(alpha=1.0, dx=0.01, L=1.0, t_max=0.4)
res = simulate_fixed_dirichlet(grid, g=1.0, f0=0.0, fL=0.0, n=10_000, seed=0)

for t in (0.05, 0.1, 0.2, 0.4):
    j = res.time_index(t)
    print(f"t={res.t[j]:.3f}  T_rw(0.5)={res.temperatures[50, j]:.4f}  "
          f"fourier={analytic.fourier_T(0.5, res.t[j]):.4f}")

# every walker is accounted for
print(res.ledger)
