"""
Sensitivity sweep
=================

A grid over embedding size d, learning rate and epoch budget.  Each
(d, learning rate, split) is trained once to the longest budget and the
test accuracy is read off at every shorter budget, so a grid with five
budgets costs one training run per cell rather than five.
"""
from graphhdc.evaluation import SplitPlan, SweepGrid, sweep
from graphhdc.synthetic import make_separable
from graphhdc.trainer import TrainConfig

table, spec = make_separable(separation=0.6)
grid = SweepGrid(d=(4, 16), lr=(1e-3, 1e-2), epochs=(10, 50, 100))
result = sweep(table, spec, grid, SplitPlan(n_repeats=4), TrainConfig(D=1000))

# %%
# Mean test accuracy per cell.
for d, lr, E, mean, std in result.rows:
    print(f"d={d:3d} lr={lr:<6g} E={E:4d}: {mean:.3f} +/- {std:.3f}")

# %%
# Best budget per (d, lr): A* is the best mean accuracy over the budgets,
# E* the shortest budget that reaches it.
for d, lr, a_star, e_star in result.best:
    print(f"d={d:3d} lr={lr:<6g}: A* = {a_star:.3f} at E* = {e_star}")
