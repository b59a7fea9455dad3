"""Class prototype memories and similarity retrieval."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, EmptyClassError
from .hdc import cosine_matrix, normalize

_UNIT_TOL = 1e-12


@dataclass(frozen=True)
class PrototypeMemory:
    """One normalized prototype per class, shape ``(C, D)``."""

    prototypes: np.ndarray
    class_counts: np.ndarray
    class_names: tuple[str, ...] | None = None

    @property
    def C(self) -> int:
        return self.prototypes.shape[0]

    @property
    def degenerate(self) -> np.ndarray:
        """Classes whose prototype is the zero vector."""
        return np.linalg.norm(self.prototypes, axis=1) == 0.0


@dataclass(frozen=True)
class Retrieval:
    label: int
    similarities: np.ndarray
    margin: float
    degenerate: bool = False


def class_sums(vectors: np.ndarray, labels: np.ndarray, n_classes: int,
               class_names=None) -> tuple[np.ndarray, np.ndarray]:
    """Per-class sums over the leading axis of ``vectors``.

    Raises :class:`EmptyClassError` for a class without rows.
    """
    labels = np.asarray(labels, dtype=np.intp)
    counts = np.bincount(labels, minlength=n_classes)
    for c in range(n_classes):
        if counts[c] == 0:
            raise EmptyClassError(c, None if class_names is None else class_names[c])
    sums = np.zeros((n_classes,) + vectors.shape[1:])
    for c in range(n_classes):
        sums[c] = vectors[labels == c].sum(axis=0)
    return sums, counts


def build_prototypes(sample_hvs: np.ndarray, labels, train_idx=None, n_classes: int | None = None,
                     class_names=None) -> PrototypeMemory:
    """Normalized bundle of the training sample hypervectors of each class."""
    sample_hvs = np.asarray(sample_hvs, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.intp)
    if train_idx is not None:
        train_idx = np.asarray(train_idx, dtype=np.intp)
        sample_hvs, labels = sample_hvs[train_idx], labels[train_idx]
    if n_classes is None:
        n_classes = len(class_names) if class_names is not None else int(labels.max()) + 1
    if n_classes < 2:
        raise DataError("prototype memory needs at least two classes")
    sums, counts = class_sums(sample_hvs, labels, n_classes, class_names)
    return PrototypeMemory(normalize(sums), counts,
                           None if class_names is None else tuple(class_names))


def similarities(queries: np.ndarray, memory: PrototypeMemory) -> np.ndarray:
    return cosine_matrix(queries, memory.prototypes)


def predict(queries: np.ndarray, memory: PrototypeMemory) -> np.ndarray:
    """Batched retrieval; ``argmax`` returns the lowest index on ties."""
    return np.argmax(similarities(queries, memory), axis=1)


def retrieve(h: np.ndarray, memory: PrototypeMemory) -> Retrieval:
    h = np.asarray(h, dtype=np.float64)
    sims = similarities(h, memory)[0]
    if not np.any(h):
        return Retrieval(0, sims, 0.0, degenerate=True)
    label = int(np.argmax(sims))
    ordered = np.sort(sims)[::-1]
    return Retrieval(label, sims, float(ordered[0] - ordered[1]))


def retrain_step(memory: PrototypeMemory, h: np.ndarray, y: int, y_hat: int,
                 eta: float) -> PrototypeMemory:
    """Perceptron-style prototype correction after a misclassification.

    Not part of the default training loop.
    """
    if not eta > 0:
        raise ValueError("eta must be positive")
    if y == y_hat:
        raise ValueError("retrain_step only applies to misclassified samples")
    protos = memory.prototypes.copy()
    h = np.asarray(h, dtype=np.float64)
    protos[y] = normalize(protos[y] + eta * h)
    protos[y_hat] = normalize(protos[y_hat] - eta * h)
    return PrototypeMemory(protos, memory.class_counts, memory.class_names)


@dataclass(frozen=True)
class ComponentMemoryBank:
    """Class-partitioned memories per parameter ``(C, P, D)`` and per group ``(C, K, D)``."""

    parameters: np.ndarray
    groups: np.ndarray

    @property
    def C(self) -> int:
        return self.parameters.shape[0]


def build_component_memories(param_hvs: np.ndarray, group_hvs: np.ndarray, labels,
                             train_idx=None, n_classes: int | None = None,
                             class_names=None) -> ComponentMemoryBank:
    """``param_hvs`` is ``(n, P, D)`` and ``group_hvs`` is ``(n, K, D)``."""
    labels = np.asarray(labels, dtype=np.intp)
    if train_idx is not None:
        train_idx = np.asarray(train_idx, dtype=np.intp)
        param_hvs, group_hvs, labels = param_hvs[train_idx], group_hvs[train_idx], labels[train_idx]
    if n_classes is None:
        n_classes = int(labels.max()) + 1
    par_sums, _ = class_sums(param_hvs, labels, n_classes, class_names)
    grp_sums, _ = class_sums(group_hvs, labels, n_classes, class_names)
    return ComponentMemoryBank(normalize(par_sums), normalize(grp_sums))
