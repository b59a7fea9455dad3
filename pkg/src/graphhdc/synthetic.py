"""Seeded synthetic tables for tests, demos and acceptance runs."""
from __future__ import annotations

import numpy as np

from .data import DatasetTable
from .graph import GraphSpec, Group
from .hdc import STREAM_SYNTHETIC, make_rng


def grouped_spec(n_parameters: int, n_groups: int, edges=(), names=None) -> GraphSpec:
    """Contiguous, near-equal groups named ``g0..g{K-1}``."""
    bounds = np.linspace(0, n_parameters, n_groups + 1).round().astype(int)
    groups = tuple(Group(f"g{k}", tuple(range(bounds[k], bounds[k + 1])))
                   for k in range(n_groups))
    return GraphSpec(groups, tuple(edges), names)


def make_separable(n_samples: int = 60, n_parameters: int = 20, n_groups: int = 4,
                   separation: float = 1.5, seed: int = 0, edges=(),
                   heterogeneous: bool = True) -> tuple[DatasetTable, GraphSpec]:
    """Two balanced Gaussian classes whose means differ by ``separation``
    standard deviations in every parameter.

    With ``heterogeneous`` each column gets its own random offset, scale
    (spanning several decades) and direction of the class shift.
    """
    rng = make_rng(seed, STREAM_SYNTHETIC)
    labels = np.arange(n_samples) % 2
    rng.shuffle(labels)
    direction = rng.choice([-1.0, 1.0], size=n_parameters)
    z = rng.standard_normal((n_samples, n_parameters)) + separation * labels[:, None] * direction
    if heterogeneous:
        offset = rng.uniform(-5.0, 5.0, size=n_parameters)
        spread = 10.0 ** rng.uniform(-2.0, 3.0, size=n_parameters)
        X = offset + spread * z
    else:
        X = z
    names = tuple(f"x{j}" for j in range(n_parameters))
    table = DatasetTable.from_arrays(X, labels, names, class_names=("class0", "class1"))
    return table, grouped_spec(n_parameters, n_groups, edges, names)


def make_regime_shift(n_per_regime: int = 20, regimes=(5, 10, 15), n_parameters: int = 12,
                      n_groups: int = 3, separation: float = 2.0, shift: float = 0.75,
                      seed: int = 0) -> tuple[DatasetTable, GraphSpec]:
    """Two-class table with a categorical regime column.

    Each regime moves the first half of the parameters by ``shift``
    standard deviations per regime level, so a held-out regime lies in a
    region of feature space the training rows do not cover.
    """
    rng = make_rng(seed, STREAM_SYNTHETIC)
    n = n_per_regime * len(regimes)
    regime = np.repeat(np.asarray(regimes), n_per_regime)
    labels = np.tile(np.arange(n_per_regime) % 2, len(regimes))
    direction = rng.choice([-1.0, 1.0], size=n_parameters)
    X = rng.standard_normal((n, n_parameters)) + separation * labels[:, None] * direction
    level = np.searchsorted(np.asarray(regimes), regime).astype(float)
    X[:, : n_parameters // 2] += shift * level[:, None]
    names = tuple(f"x{j}" for j in range(n_parameters))
    table = DatasetTable.from_arrays(X, labels, names, class_names=("low", "high"),
                                     regimes={"regime": regime.astype(str)})
    return table, grouped_spec(n_parameters, n_groups, (), names)
