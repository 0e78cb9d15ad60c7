# Ice under a surface temperature that dips below freezing each night.
# The bundled hourly series is synthetic; units are mm, s and K.
import numpy as np

from rwstefan import StefanRunConfig, make_grid, simulate_stefan, water_params
from rwstefan.ingest import bundled_series_path, driver_from_series, load_series

series = load_series(bundled_series_path(), time_unit="h")
print(f"{series.times.size} samples, {series.values.min()} to {series.values.max()} C")

water = water_params()
print("alpha", water.alpha, "mm^2/s  beta", water.beta, "K")

t_max = series.times[-1]
cfg = StefanRunConfig(grid=make_grid(water.alpha, 1.0, 100.0, t_max), params=water,
                      driver=driver_from_series(series, t_max), n=100, seed=0)
res = simulate_stefan(cfg)

for h in range(0, 63, 6):
    print(f"{h:>2} h  surface={float(cfg.driver(h * 3600.0)):+5.1f} C  front={res.front_at(h * 3600.0):5.1f} mm")

day = res.t <= 24 * 3600
print("front retreats during the first day:", bool(np.any(np.diff(res.front[day]) < 0)))
print("runtime", round(res.metadata["runtime_s"], 1), "s")
