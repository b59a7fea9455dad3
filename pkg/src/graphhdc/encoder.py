"""Trainable scalar-to-hypervector encoder.

Each scalar column is min-max scaled on the training rows to ``[-1, 1]``
(out-of-range values are clipped), multiplied into a per-parameter
embedding of length ``d`` and pushed through the fixed basis with ``tanh``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DataError, DimensionError
from .hdc import STREAM_EMBEDDINGS, RandomBasis, make_rng

DEFAULT_EPSILON = 1e-8


@dataclass(frozen=True)
class ScalerStats:
    x_min: np.ndarray
    x_max: np.ndarray
    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self):
        if np.any(self.x_min > self.x_max):
            raise DataError("scaler minimum exceeds maximum")
        if not self.epsilon > 0:
            raise DataError("epsilon must be positive")

    @property
    def n_parameters(self) -> int:
        return len(self.x_min)


def fit_scaler(X: np.ndarray, train_idx, epsilon: float = DEFAULT_EPSILON,
               names=None) -> ScalerStats:
    """Per-column extrema over the training rows only."""
    X = np.asarray(X, dtype=np.float64)
    train_idx = np.asarray(train_idx, dtype=np.intp)
    if train_idx.size == 0:
        raise DataError("cannot fit scaler on an empty training set")
    if not epsilon > 0:
        raise DataError("epsilon must be positive")
    rows = X[train_idx]
    x_min = rows.min(axis=0)
    x_max = rows.max(axis=0)
    constant = np.flatnonzero(x_min == x_max)
    if constant.size:
        labels = [names[j] for j in constant] if names is not None else constant.tolist()
        warnings.warn(f"constant training columns {labels} encode every value to -1",
                      stacklevel=2)
    return ScalerStats(x_min=x_min, x_max=x_max, epsilon=float(epsilon))


def scale(X: np.ndarray, stats: ScalerStats) -> np.ndarray:
    """Signed scaling ``2 * clip((x - min) / (max - min + eps), 0, 1) - 1``."""
    X = np.asarray(X, dtype=np.float64)
    if X.shape[-1] != stats.n_parameters:
        raise DimensionError(
            f"expected {stats.n_parameters} parameters, got {X.shape[-1]}")
    unit = (X - stats.x_min) / (stats.x_max - stats.x_min + stats.epsilon)
    return 2.0 * np.clip(unit, 0.0, 1.0) - 1.0


def scale_value(x: float, stats: ScalerStats, j: int) -> float:
    unit = (x - stats.x_min[j]) / (stats.x_max[j] - stats.x_min[j] + stats.epsilon)
    return 2.0 * min(1.0, max(0.0, unit)) - 1.0


def init_embeddings(n_parameters: int, d: int, seed: int) -> np.ndarray:
    """i.i.d. normal embeddings with standard deviation ``1/sqrt(d)``."""
    rng = make_rng(seed, STREAM_EMBEDDINGS)
    return rng.standard_normal((n_parameters, d)) / np.sqrt(d)


def encode_parameter(x_scaled: float, embedding: np.ndarray, basis: RandomBasis) -> np.ndarray:
    """Hypervector ``tanh((x * e)^T B)`` for one scaled scalar."""
    embedding = np.asarray(embedding, dtype=np.float64)
    if embedding.shape != (basis.d,):
        raise DimensionError(f"embedding shape {embedding.shape} does not match d={basis.d}")
    return np.tanh((x_scaled * embedding) @ basis.rows)


def encode_parameters(X_scaled: np.ndarray, embeddings: np.ndarray, basis: RandomBasis,
                      out: np.ndarray | None = None) -> np.ndarray:
    """All parameter hypervectors of a scaled table, shape ``(n, P, D)``.

    Uses ``(x e)^T B = x (e^T B)`` so the projection is computed once per
    parameter rather than once per cell.
    """
    X_scaled = np.asarray(X_scaled, dtype=np.float64)
    projected = embeddings @ basis.rows                       # (P, D)
    n, P = X_scaled.shape
    if out is None:
        out = np.empty((n, P, basis.D))
    _kernels.scaled_rows(np.ascontiguousarray(X_scaled), projected, out)
    np.tanh(out, out=out)
    return out
