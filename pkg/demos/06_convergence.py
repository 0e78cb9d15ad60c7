# Error falls as walkers are added and as the grid is refined. Takes about half a minute.
from rwstefan.harness import run_convergence

by_n = run_convergence("constant", sweep="n", levels=(100, 1000, 10_000), seeds=range(5), dx=0.01)
for level, m, s in zip(by_n.levels, by_n.means["linf"], by_n.stds["linf"]):
    print(f"n={level:>6}  Linf={m:.4f} +- {s:.4f}")
print("decreasing:", by_n.verdict)

by_dx = run_convergence("constant", sweep="dx", levels=(0.02, 0.01, 0.005), seeds=range(5))
for level, m in zip(by_dx.levels, by_dx.means["front_rms"]):
    print(f"dx={level:<6}  front RMS={m:.4f}")
print("decreasing:", by_dx.verdict)
