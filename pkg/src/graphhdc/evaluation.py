"""Evaluation protocols: repeated random splits, group hold-out folds,
binary metrics and the (d, lr, epochs) sensitivity sweep.

Every split trains a fresh model whose seed is ``base_seed ^ split_index``.
Results are gathered in split order, so serial and parallel runs produce
identical reports.
"""
from __future__ import annotations

import csv
import itertools
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from joblib import Parallel, delayed

from .data import DatasetTable, _sort_key
from .errors import ConfigError, DataError, GraphHDCError
from .graph import GraphSpec
from .hdc import STREAM_SPLITS, cosine_matrix, make_rng
from .trainer import ModelState, TrainConfig, format_float, train

PROTOCOLS = ("random", "group_fold")
AVERAGING = "macro"


@dataclass(frozen=True)
class SplitPlan:
    protocol: str = "random"
    n_repeats: int = 1000
    train_fraction: float = 0.8
    fold_column: str | None = None
    base_seed: int = 0
    stratified: bool = False
    max_redraws: int = 100
    reseed: bool = True

    def __post_init__(self):
        if self.protocol not in PROTOCOLS:
            raise ConfigError(f"unknown protocol {self.protocol!r}; expected one of {PROTOCOLS}")
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError(f"train_fraction must lie in (0, 1), got {self.train_fraction}")
        if self.protocol == "random" and self.n_repeats < 1:
            raise ConfigError("n_repeats must be at least 1")
        if self.protocol == "group_fold" and not self.fold_column:
            raise ConfigError("group_fold protocol needs a fold_column")

    def split_seed(self, index: int) -> int:
        return (self.base_seed ^ index) if self.reseed else self.base_seed


@dataclass(frozen=True)
class Split:
    index: int
    train_idx: np.ndarray
    test_idx: np.ndarray
    seed: int
    fold_value: str | None = None
    redraws: int = 0


def _random_indices(rng, labels, n_train, stratified, fraction):
    n = len(labels)
    if not stratified:
        perm = rng.permutation(n)
        return perm[:n_train], perm[n_train:]
    train, test = [], []
    for c in np.unique(labels):
        members = rng.permutation(np.flatnonzero(labels == c))
        k = math.ceil(fraction * members.size)
        train.append(members[:k])
        test.append(members[k:])
    return np.sort(np.concatenate(train)), np.sort(np.concatenate(test))


def make_splits(plan: SplitPlan, table: DatasetTable) -> list[Split]:
    """Deterministic train/test index sets for ``plan``.

    Random draws that leave a class without training rows are redrawn up
    to ``plan.max_redraws`` times per split; the count is kept on the split.
    """
    labels = table.require_labels()
    n_classes = table.n_classes
    if plan.protocol == "group_fold":
        values = table.column(plan.fold_column).astype(str)
        levels = sorted(set(values.tolist()), key=_sort_key)
        if len(levels) < 2:
            raise DataError(f"fold column {plan.fold_column!r} has a single value {levels}")
        splits = []
        for i, level in enumerate(levels):
            test = np.flatnonzero(values == level)
            train = np.flatnonzero(values != level)
            splits.append(Split(i, train, test, plan.split_seed(i), level))
        return splits

    n_train = math.ceil(plan.train_fraction * table.n)
    if n_train >= table.n:
        raise DataError(f"train fraction {plan.train_fraction} leaves no test rows of {table.n}")
    rng = make_rng(plan.base_seed, STREAM_SPLITS)
    splits = []
    for i in range(plan.n_repeats):
        for redraws in range(plan.max_redraws + 1):
            train, test = _random_indices(rng, labels, n_train, plan.stratified,
                                          plan.train_fraction)
            if np.count_nonzero(np.bincount(labels[train], minlength=n_classes)) == n_classes:
                break
        else:
            raise DataError(f"split {i}: every class present in train not reached after "
                            f"{plan.max_redraws} redraws")
        splits.append(Split(i, train, test, plan.split_seed(i), None, redraws))
    return splits


# metrics

@dataclass(frozen=True)
class Scores:
    accuracy: float
    precision: float
    recall: float
    f1: float


def confusion_matrix(y_true, y_pred, n_classes: int) -> np.ndarray:
    """``cm[t, p]`` counts rows of true class ``t`` predicted as ``p``."""
    cm = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(cm, (np.asarray(y_true, dtype=np.intp), np.asarray(y_pred, dtype=np.intp)), 1)
    return cm


def per_class_scores(cm: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Precision, recall and F1 per class; 0 where a ratio is undefined."""
    tp = np.diag(cm).astype(np.float64)
    predicted = cm.sum(axis=0)
    actual = cm.sum(axis=1)
    precision = np.divide(tp, predicted, out=np.zeros_like(tp), where=predicted > 0)
    recall = np.divide(tp, actual, out=np.zeros_like(tp), where=actual > 0)
    denom = precision + recall
    f1 = np.divide(2 * precision * recall, denom, out=np.zeros_like(tp), where=denom > 0)
    return precision, recall, f1


def classification_scores(y_true, y_pred, n_classes: int = 2) -> Scores:
    """Accuracy plus precision/recall/F1 macro-averaged over all ``n_classes``."""
    y_true = np.asarray(y_true)
    if y_true.size == 0:
        raise DataError("cannot score an empty test set")
    cm = confusion_matrix(y_true, y_pred, n_classes)
    p, r, f = per_class_scores(cm)
    return Scores(float(np.trace(cm) / cm.sum()), float(p.mean()), float(r.mean()),
                  float(f.mean()))


@dataclass
class SplitRecord:
    split_id: int
    seed: int
    accuracy: float
    precision: float
    recall: float
    f1: float
    n_train: int
    n_test: int
    fold_value: str | None = None
    redraws: int = 0
    initial_loss: float = float("nan")
    final_loss: float = float("nan")
    final_rho_bar: float = float("nan")
    train_distance_initial: float = float("nan")
    train_distance_final: float = float("nan")
    test_distance_initial: float = float("nan")
    test_distance_final: float = float("nan")
    checkpoint_test_acc: dict = field(default_factory=dict)


CSV_COLUMNS = ("split_id", "seed", "accuracy", "precision", "recall", "f1")


@dataclass(frozen=True)
class Summary:
    mean: float
    std: float


@dataclass
class MetricSet:
    accuracy: Summary
    precision: Summary
    recall: Summary
    f1: Summary
    n_splits: int
    averaging: str = AVERAGING
    fold_table: list = field(default_factory=list)

    @classmethod
    def from_records(cls, records) -> "MetricSet":
        def summ(name):
            v = np.array([getattr(r, name) for r in records])
            return Summary(float(v.mean()), float(v.std()))

        folds = [(r.fold_value, r.accuracy, r.n_test) for r in records if r.fold_value is not None]
        return cls(summ("accuracy"), summ("precision"), summ("recall"), summ("f1"),
                   len(records), AVERAGING, folds)

    def to_dict(self) -> dict:
        doc = {k: asdict(getattr(self, k)) for k in ("accuracy", "precision", "recall", "f1")}
        doc.update(n_splits=self.n_splits, averaging=self.averaging, std_ddof=0)
        if self.fold_table:
            doc["folds"] = [{"fold": f, "accuracy": a, "n_test": n} for f, a, n in self.fold_table]
        return doc


@dataclass
class EvaluationResult:
    metrics: MetricSet
    records: list
    states: list | None = None


def _mean_distance(state: ModelState, X, labels, rows, initial: bool) -> float:
    if len(rows) == 0:
        return float("nan")
    samples = state.encode(X[rows], initial=initial).samples
    memory = state.initial_memory if initial else state.memory
    sims = cosine_matrix(samples, memory.prototypes)
    return float(np.mean(1.0 - sims[np.arange(len(rows)), labels[rows]]))


def run_split(table: DatasetTable, spec: GraphSpec, config: TrainConfig, split: Split,
              checkpoints=(), keep_state: bool = False):
    """Train and score one split; returns ``(record, state or None)``."""
    labels = table.labels
    cfg = config.replace(seed=split.seed)
    try:
        state = train(table.X, labels, split.train_idx, split.test_idx, spec, cfg,
                      n_classes=table.n_classes, class_names=table.class_names,
                      parameter_names=table.parameter_names, dataset_hash=None,
                      track_test=tuple(checkpoints))
    except GraphHDCError as exc:
        exc.args = (f"split {split.index}: {exc}",)
        raise
    pred = state.predict(table.X[split.test_idx])
    scores = classification_scores(labels[split.test_idx], pred, table.n_classes)
    hist = state.history
    record = SplitRecord(
        split.index, split.seed, scores.accuracy, scores.precision, scores.recall, scores.f1,
        len(split.train_idx), len(split.test_idx), split.fold_value, split.redraws,
        hist.loss[0], hist.loss[-1], hist.rho_bar[-1],
        _mean_distance(state, table.X, labels, split.train_idx, True),
        _mean_distance(state, table.X, labels, split.train_idx, False),
        _mean_distance(state, table.X, labels, split.test_idx, True),
        _mean_distance(state, table.X, labels, split.test_idx, False),
        {int(e): hist.test_acc[int(e)] for e in checkpoints})
    return record, (state if keep_state else None)


def parallel_map(fn, tasks, jobs: int = 1):
    """``[fn(*t) for t in tasks]``, optionally across ``jobs`` worker processes."""
    if jobs == 1 or len(tasks) <= 1:
        return [fn(*t) for t in tasks]
    return Parallel(n_jobs=jobs)(delayed(fn)(*t) for t in tasks)


def evaluate(table: DatasetTable, spec: GraphSpec, config: TrainConfig, plan: SplitPlan,
             jobs: int = 1, keep_states: bool = False, splits=None) -> EvaluationResult:
    """One fresh model per split, scored on its held-out rows."""
    spec.checked(table.P)
    splits = make_splits(plan, table) if splits is None else splits
    out = parallel_map(run_split, [(table, spec, config, s, (), keep_states) for s in splits], jobs)
    records = [r for r, _ in out]
    states = [s for _, s in out] if keep_states else None
    return EvaluationResult(MetricSet.from_records(records), records, states)


def write_split_csv(records, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        extra = any(r.fold_value is not None for r in records)
        writer.writerow(list(CSV_COLUMNS) + (["fold"] if extra else []))
        for r in records:
            row = [r.split_id, r.seed] + [format_float(getattr(r, c)) for c in CSV_COLUMNS[2:]]
            writer.writerow(row + ([r.fold_value] if extra else []))


def write_summary_json(result: EvaluationResult, path, plan: SplitPlan | None = None) -> None:
    doc = result.metrics.to_dict()
    if plan is not None:
        doc["plan"] = asdict(plan)
    Path(path).write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")


# sensitivity sweep

@dataclass(frozen=True)
class SweepGrid:
    d: tuple[int, ...]
    lr: tuple[float, ...]
    epochs: tuple[int, ...]

    def __post_init__(self):
        for name in ("d", "lr", "epochs"):
            values = tuple(getattr(self, name))
            if not values:
                raise ConfigError(f"sweep grid axis {name!r} is empty")
            object.__setattr__(self, name, values)

    @property
    def size(self) -> int:
        return len(self.d) * len(self.lr) * len(self.epochs)


@dataclass
class SweepResult:
    rows: list            # (d, lr, epochs, mean_acc, std_acc)
    best: list            # (d, lr, a_star, e_star)
    per_split: dict       # (d, lr) -> list[SplitRecord]


def sweep(table: DatasetTable, spec: GraphSpec, grid: SweepGrid, plan: SplitPlan,
          config: TrainConfig = TrainConfig(), jobs: int = 1) -> SweepResult:
    """Mean test accuracy for every (d, lr, epochs) cell.

    Each (d, lr, split) is trained once to ``max(epochs)``; accuracies at
    the shorter horizons are read from the training history.
    """
    spec.checked(table.P)
    splits = make_splits(plan, table)
    horizons = sorted(set(grid.epochs))
    pairs = list(itertools.product(grid.d, grid.lr))
    tasks = [(table, spec, config.replace(d=d, lr=lr, epochs=horizons[-1]), s, horizons)
             for d, lr in pairs for s in splits]
    out = parallel_map(run_split, tasks, jobs)
    per_split = {}
    rows, best = [], []
    for p, (d, lr) in enumerate(pairs):
        recs = [r for r, _ in out[p * len(splits):(p + 1) * len(splits)]]
        per_split[(d, lr)] = recs
        means = []
        for E in grid.epochs:
            acc = np.array([r.checkpoint_test_acc[E] for r in recs])
            rows.append((d, lr, E, float(acc.mean()), float(acc.std())))
            means.append(float(acc.mean()))
        k = int(np.argmax(means))
        best.append((d, lr, means[k], grid.epochs[k]))
    return SweepResult(rows, best, per_split)


def write_sweep_csv(result: SweepResult, path, best_path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["d", "lr", "epochs", "mean_acc", "std_acc"])
        for d, lr, E, m, s in result.rows:
            writer.writerow([d, format_float(lr), E, format_float(m), format_float(s)])
    with open(best_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["d", "lr", "a_star", "e_star"])
        for d, lr, a, E in result.best:
            writer.writerow([d, format_float(lr), format_float(a), E])
