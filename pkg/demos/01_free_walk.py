# Walkers released at the origin spread like the heat kernel.
import math

import numpy as np

from rwstefan import analytic, simulate_free

dx = math.sqrt(2) / 10          # dt = dx^2 / 2 = 0.01 with alpha = 1
res = simulate_free(100_000, x0=0.0, steps=100, dx=dx, seed=1)

# bins are 2 dx wide because after an even number of steps only even lattice sites are hit
exact = analytic.gaussian_T(res.centers, 1.0)
for c, d, g in zip(res.centers[45:56], res.density[45:56], exact[45:56]):
    print(f"x={c:+.3f}  walkers={d:.4f}  kernel={g:.4f}")

print("variance", res.positions.var(), "expected", 100 * dx * dx)
print("L1 distance", np.sum(np.abs(res.density - exact)) * 2 * dx)
