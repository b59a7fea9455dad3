"""
Attribution and memory alignment
================================

Component memories (class-wise bundles of one parameter or one group) are
compared with the class prototypes.  A tempered softmax over those
affinities gives, per class, how much each component agrees with its own
class (attribution weights) and how far ahead of the competing classes it
is (alignment A and separation S).
"""
from dataclasses import replace

import numpy as np

from graphhdc.evaluation import SplitPlan, make_splits, run_split
from graphhdc.explain import (aggregate_attributions, distance_summary, explain_state,
                              mas_state, sample_embedding)
from graphhdc.synthetic import make_separable
from graphhdc.trainer import TrainConfig

# only the first group (columns x0-x4) keeps its link to the label
table, spec = make_separable(n_samples=60, separation=1.0, edges=[(0, 1)])
X = table.X.copy()
X[:, 5:] = np.random.default_rng(3).permutation(X[:, 5:])  # break the label link
table = replace(table, X=X)
config = TrainConfig(D=2000, epochs=100)

# %%
# Group-level attribution for one trained split.  Each row is a simplex.
split = make_splits(SplitPlan(n_repeats=1), table)[0]
_, state = run_split(table, spec, config, split, keep_state=True)
report = explain_state(state, table.X, table.labels, level="group")
for c, name in enumerate(report.classes):
    weights = ", ".join(f"{g}={w:.3f}" for g, w in report.weights(c).items())
    print(f"{name}: {weights}")

# %%
# Within one group, the weights split that group's share across its columns.
within = explain_state(state, table.X, table.labels, level="within:g0")
print("within g0, class0:", {k: round(v, 3) for k, v in within.weights(0).items()})

# %%
# Averaging over several splits smooths the split-to-split noise.
reports = []
for s in make_splits(SplitPlan(n_repeats=5), table):
    _, st = run_split(table, spec, config, s, keep_state=True)
    reports.append(explain_state(st, table.X, table.labels, level="group"))
agg = aggregate_attributions(reports)
print("mean group weights (class0):", np.round(agg.alpha[0], 3),
      "+/-", np.round(agg.alpha_std[0], 3))

# %%
# Alignment and separation before and after training.  With two classes
# S = 2A - 1, so the class summaries carry the same information twice.
for stage, initial in (("epoch 0", True), ("trained", False)):
    m = mas_state(state, table.X, table.labels, "group", initial=initial)
    print(f"{stage}: MA = {np.round(m.MA, 4)}, MS = {np.round(m.MS, 4)}")

# %%
# Sample movement: cosine distance of every sample to its own class
# prototype, before and after training.  Negative change means samples moved
# toward their prototype.
for part, idx in (("train", state.train_idx), ("test", state.test_idx)):
    y = table.labels[idx]
    before = sample_embedding(state.encode(table.X[idx], initial=True).samples,
                              state.initial_memory, y, state.initial_memory)
    after = sample_embedding(state.encode(table.X[idx]).samples, state.initial_memory, y,
                             state.memory)
    b = distance_summary(before.distances, y, 2)
    a = distance_summary(after.distances, y, 2)
    for c in range(2):
        print(f"{part} class{c}: {b[c][0]:.4f} -> {a[c][0]:.4f} ({a[c][0] - b[c][0]:+.4f})")
