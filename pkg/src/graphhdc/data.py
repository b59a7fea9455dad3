"""Dataset tables, CSV ingestion and target preparation.

Raw targets may contain right-censored readings (``inf``/``∞``), which
are always treated as the high class. Thresholds come from the widest gap
between consecutive finite values on a log scale.
"""
from __future__ import annotations

import csv
import hashlib
import io
import math
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import DataError

CENSORED_TOKENS = {"inf", "+inf", "infinity", "∞"}
BINARY_CLASSES = ("low", "high")


def _canonical(v: float) -> str:
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return repr(float(v))


@dataclass(frozen=True)
class DatasetTable:
    """``n x P`` parameter matrix plus labels, raw target and regime columns."""

    parameter_names: tuple[str, ...]
    X: np.ndarray
    labels: np.ndarray | None = None
    class_names: tuple[str, ...] | None = None
    target_name: str | None = None
    target: np.ndarray | None = None
    censored: np.ndarray | None = None
    regimes: dict = field(default_factory=dict)
    label_name: str = "label"
    source: str | None = None

    @classmethod
    def from_arrays(cls, X, labels=None, parameter_names=None, class_names=None,
                    regimes=None, **kw) -> "DatasetTable":
        X = np.asarray(X, dtype=np.float64)
        if parameter_names is None:
            parameter_names = tuple(f"x{j}" for j in range(X.shape[1]))
        if labels is not None:
            labels = np.asarray(labels, dtype=np.intp)
            if class_names is None:
                class_names = tuple(str(c) for c in range(int(labels.max()) + 1))
        regimes = {k: np.asarray(v).astype(str) for k, v in (regimes or {}).items()}
        return cls(tuple(parameter_names), X, labels,
                   None if class_names is None else tuple(class_names), regimes=regimes, **kw)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def P(self) -> int:
        return self.X.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.class_names) if self.class_names is not None else 0

    def require_labels(self) -> np.ndarray:
        if self.labels is None:
            raise DataError("dataset has no class labels; threshold the target first")
        counts = np.bincount(self.labels, minlength=self.n_classes)
        if np.count_nonzero(counts) < 2:
            raise DataError(f"dataset labels contain a single class: counts={counts.tolist()}")
        return self.labels

    def with_labels(self, labels, class_names=BINARY_CLASSES) -> "DatasetTable":
        return replace(self, labels=np.asarray(labels, dtype=np.intp),
                       class_names=tuple(class_names))

    def select_parameters(self, names) -> "DatasetTable":
        names = list(names)
        missing = [n for n in names if n not in self.parameter_names]
        if missing:
            raise DataError(f"unknown parameter columns: {missing}")
        idx = [self.parameter_names.index(n) for n in names]
        return replace(self, parameter_names=tuple(names), X=self.X[:, idx])

    def drop_rows(self, rows) -> "DatasetTable":
        """Remove rows by 0-based position (e.g. quality-control exclusions)."""
        rows = sorted(set(int(r) for r in rows))
        bad = [r for r in rows if not 0 <= r < self.n]
        if bad:
            raise DataError(f"exclusion rows out of range: {bad}")
        keep = np.setdiff1d(np.arange(self.n), rows)
        return self.take(keep)

    def take(self, rows) -> "DatasetTable":
        rows = np.asarray(rows, dtype=np.intp)

        def sub(a):
            return None if a is None else a[rows]

        return replace(self, X=self.X[rows], labels=sub(self.labels), target=sub(self.target),
                       censored=sub(self.censored),
                       regimes={k: v[rows] for k, v in self.regimes.items()})

    def column(self, name) -> np.ndarray:
        if name in self.regimes:
            return self.regimes[name]
        if name in self.parameter_names:
            return self.X[:, self.parameter_names.index(name)]
        if name == self.target_name and self.target is not None:
            return self.target
        if name == self.label_name and self.labels is not None:
            return np.asarray(self.class_names)[self.labels]
        raise DataError(f"unknown column {name!r}")

    # serialization

    def header(self) -> list[str]:
        cols = list(self.parameter_names)
        if self.target_name is not None:
            cols.append(self.target_name)
        if self.labels is not None:
            cols.append(self.label_name)
        cols.extend(self.regimes)
        return cols

    def rows(self):
        names = np.asarray(self.class_names) if self.labels is not None else None
        for i in range(self.n):
            row = [_canonical(v) for v in self.X[i]]
            if self.target_name is not None:
                row.append(_canonical(self.target[i]))
            if self.labels is not None:
                row.append(str(names[self.labels[i]]))
            row.extend(str(v[i]) for v in self.regimes.values())
            yield row

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.header())
        writer.writerows(self.rows())
        return buf.getvalue()

    @property
    def content_hash(self) -> str:
        return hashlib.sha256(self.to_csv_text().encode("utf-8")).hexdigest()


def write_csv(table: DatasetTable, path) -> None:
    Path(path).write_text(table.to_csv_text(), encoding="utf-8")


def _parse_float(cell: str, row: int, col: str, allow_censored=False) -> tuple[float, bool]:
    text = cell.strip()
    if allow_censored and text.lower() in CENSORED_TOKENS:
        return math.inf, True
    if text == "":
        raise DataError(f"missing value at row {row}, column {col!r}")
    try:
        value = float(text)
    except ValueError:
        raise DataError(f"non-numeric value {cell!r} at row {row}, column {col!r}") from None
    if not math.isfinite(value):
        raise DataError(f"non-finite value {cell!r} at row {row}, column {col!r}")
    return value, False


def _sort_key(value: str):
    try:
        return (0, float(value), value)
    except ValueError:
        return (1, 0.0, value)


def load_csv(path, parameters, target: str | None = None, label: str | None = None,
             regimes=(), class_names=None) -> DatasetTable:
    """Load a UTF-8 CSV with a header row.

    ``parameters`` names the numeric model inputs, ``target`` an optional raw
    target column whose ``inf``/``∞`` cells are flagged as censored,
    ``label`` an optional class column and ``regimes`` categorical columns
    kept as strings. Row numbers in errors are 1-based data rows.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"dataset file not found: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path} is empty") from None
        records = [r for r in reader if any(c.strip() for c in r)]

    dupes = sorted({h for h in header if header.count(h) > 1})
    if dupes:
        raise DataError(f"duplicate header columns: {dupes}")
    parameters = list(parameters)
    wanted = parameters + [c for c in (target, label) if c] + list(regimes)
    missing = [c for c in wanted if c not in header]
    if missing:
        raise DataError(f"columns not found in {path.name}: {missing}")
    pos = {h: i for i, h in enumerate(header)}

    n = len(records)
    X = np.empty((n, len(parameters)))
    raw = np.empty(n) if target else None
    censored = np.zeros(n, dtype=bool) if target else None
    label_cells = []
    regime_cells = {r: [] for r in regimes}
    for i, rec in enumerate(records, start=1):
        if len(rec) != len(header):
            raise DataError(f"row {i} has {len(rec)} cells, expected {len(header)}")
        for j, name in enumerate(parameters):
            X[i - 1, j], _ = _parse_float(rec[pos[name]], i, name)
        if target:
            raw[i - 1], censored[i - 1] = _parse_float(rec[pos[target]], i, target, True)
        if label:
            cell = rec[pos[label]].strip()
            if cell == "":
                raise DataError(f"missing label at row {i}")
            label_cells.append(cell)
        for r in regimes:
            regime_cells[r].append(rec[pos[r]].strip())

    labels = None
    if label:
        if class_names is None:
            class_names = sorted(set(label_cells), key=_sort_key)
        class_names = tuple(str(c) for c in class_names)
        unknown = sorted(set(label_cells) - set(class_names))
        if unknown:
            raise DataError(f"labels {unknown} are not among classes {list(class_names)}")
        index = {c: k for k, c in enumerate(class_names)}
        labels = np.array([index[c] for c in label_cells], dtype=np.intp)
    return DatasetTable(
        parameter_names=tuple(parameters), X=X, labels=labels,
        class_names=class_names if label else None, target_name=target, target=raw,
        censored=censored, regimes={r: np.array(v, dtype=str) for r, v in regime_cells.items()},
        label_name=label or "label", source=str(path))


def clip_censored_values(values, groups) -> np.ndarray:
    """``min(value, max finite value of its group)`` for every entry."""
    values = np.asarray(values, dtype=np.float64)
    groups = np.asarray(groups)
    out = values.copy()
    for g in _ordered_unique(groups):
        mask = groups == g
        finite = values[mask][np.isfinite(values[mask])]
        if finite.size == 0:
            raise DataError(f"group {g!r} has no finite values to clip to")
        out[mask] = np.minimum(values[mask], finite.max())
    return out


def _ordered_unique(a):
    return sorted(set(a.tolist()), key=lambda v: _sort_key(str(v)))


def clip_censored(table: DatasetTable, group_column: str) -> DatasetTable:
    """Replace censored targets with the group-wise maximum finite value.

    Censoring flags are kept, so labels still treat those rows as high.
    """
    if table.target is None:
        raise DataError("table has no raw target column")
    groups = table.column(group_column)
    return replace(table, target=clip_censored_values(table.target, groups))


@dataclass(frozen=True)
class GapThreshold:
    threshold: float
    lower: float
    upper: float
    log_gap: float
    n_below: int
    n_above: int


def gap_threshold(values, tie_tol: float = 1e-12) -> GapThreshold:
    """Geometric midpoint of the widest gap between sorted distinct values
    on a log10 scale.

    Gaps within ``tie_tol`` of the widest count as ties and the lowest pair
    wins. ``n_below``/``n_above`` count the input values on either side
    (values equal to the threshold count as above).
    """
    values = np.asarray(values, dtype=np.float64)
    values = values[np.isfinite(values)]
    if np.any(values <= 0):
        raise DataError("gap threshold needs strictly positive values")
    distinct = np.unique(values)
    if distinct.size < 2:
        raise DataError("gap threshold needs at least two distinct finite values")
    gaps = np.diff(np.log10(distinct))
    best = int(np.flatnonzero(gaps >= gaps.max() - tie_tol)[0])
    lo, hi = float(distinct[best]), float(distinct[best + 1])
    thr = math.sqrt(lo * hi)
    return GapThreshold(thr, lo, hi, float(gaps[best]), int(np.sum(values < thr)),
                        int(np.sum(values >= thr)))


def binarize(values, threshold: float, censored=None) -> np.ndarray:
    """0 (low) below ``threshold``, 1 (high) at or above it or when censored."""
    if not threshold > 0:
        raise DataError("threshold must be positive")
    values = np.asarray(values, dtype=np.float64)
    high = values >= threshold
    if censored is not None:
        high |= np.asarray(censored, dtype=bool)
    labels = high.astype(np.intp)
    if labels.size and (labels.min() == labels.max()):
        warnings.warn(f"threshold {threshold} puts every sample in one class", stacklevel=2)
    return labels


def binarize_table(table: DatasetTable, threshold: float) -> DatasetTable:
    if table.target is None:
        raise DataError("table has no raw target column")
    return table.with_labels(binarize(table.target, threshold, table.censored), BINARY_CLASSES)


def aed(power_mw, speed_um_s, hatch_um):
    """Areal energy density ``P / (v h)`` in mJ/µm²."""
    speed = np.asarray(speed_um_s, dtype=np.float64)
    hatch = np.asarray(hatch_um, dtype=np.float64)
    if np.any(speed <= 0) or np.any(hatch <= 0):
        raise DataError("scan speed and hatch spacing must be positive")
    out = np.asarray(power_mw, dtype=np.float64) / (speed * hatch)
    return float(out) if out.ndim == 0 else out
