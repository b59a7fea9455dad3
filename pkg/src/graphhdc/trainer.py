"""End-to-end training of the parameter embeddings.

Every epoch recomputes the class prototypes from the current embeddings,
scores each training sample against all prototypes with cosine
similarity, and minimizes the softmax cross-entropy of those scores with
full-batch Adam. Gradients flow through prototype construction as well,
so a training sample is differentiated both as a query and as a member of
its class prototype. The random basis never changes.
"""
from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from . import __version__
from . import _kernels
from .encoder import ScalerStats, encode_parameters, fit_scaler, init_embeddings, scale
from .errors import ConfigError, DataError, NumericalError
from .graph import Composition, GraphSpec, compose, graph_spec_from_dict
from .hdc import RandomBasis, cosine_sim
from .memory import PrototypeMemory, class_sums

CHECKPOINT_FORMAT = "graphhdc-checkpoint"
CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class TrainConfig:
    D: int = 5000
    d: int = 32
    lr: float = 1e-3
    epochs: int = 300
    seed: int = 0
    epsilon: float = 1e-8
    beta: float = 1.0
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8

    def __post_init__(self):
        if not (self.D >= self.d >= 1):
            raise ConfigError(f"need D >= d >= 1, got D={self.D}, d={self.d}")
        if not self.lr >= 0:
            # lr == 0 is accepted so frozen-embedding runs can be expressed
            raise ConfigError(f"learning rate must be non-negative, got {self.lr}")
        if self.epochs < 0:
            raise ConfigError(f"epochs must be >= 0, got {self.epochs}")
        if not self.epsilon > 0:
            raise ConfigError("epsilon must be positive")
        if not self.beta > 0:
            raise ConfigError("attribution temperature beta must be positive")

    def replace(self, **changes) -> "TrainConfig":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> "TrainConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown training options: {sorted(unknown)}")
        types = {f.name: f.type for f in fields(cls)}
        return cls(**{k: (int(v) if types[k] == "int" else float(v)) for k, v in doc.items()})


class Adam:
    """Adam with bias correction, updating arrays in place."""

    def __init__(self, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = None
        self.v = None
        self.t = 0

    def step(self, param: np.ndarray, grad: np.ndarray) -> None:
        if self.m is None:
            self.m = np.zeros_like(param)
            self.v = np.zeros_like(param)
        self.t += 1
        self.m = self.beta1 * self.m + (1.0 - self.beta1) * grad
        self.v = self.beta2 * self.v + (1.0 - self.beta2) * grad * grad
        m_hat = self.m / (1.0 - self.beta1 ** self.t)
        v_hat = self.v / (1.0 - self.beta2 ** self.t)
        param -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


@dataclass
class Encoded:
    param_hvs: np.ndarray
    composition: Composition

    @property
    def samples(self) -> np.ndarray:
        return self.composition.samples

    @property
    def groups(self) -> np.ndarray:
        return self.composition.groups


def encode(X_scaled: np.ndarray, embeddings: np.ndarray, basis: RandomBasis, spec: GraphSpec,
           out: np.ndarray | None = None) -> Encoded:
    """Scaled rows -> parameter, group and sample hypervectors."""
    H = encode_parameters(X_scaled, embeddings, basis, out=out)
    sums = np.empty((H.shape[0], spec.K, basis.D))
    _kernels.group_sums(H, spec.group_of(), spec.K, sums)
    return Encoded(H, compose(H, spec, group_sums=sums))


def _unit_rows(v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    norms = np.linalg.norm(v, axis=-1)
    safe = np.where(norms > 0.0, norms, 1.0)
    out = v / safe[..., None]
    out[norms == 0.0] = 0.0
    return out, norms


def _normalize_backward(unit: np.ndarray, norms: np.ndarray, grad: np.ndarray) -> np.ndarray:
    """Vector-Jacobian product of ``v -> v/||v||``; zero where ``||v|| = 0``."""
    radial = np.sum(unit * grad, axis=-1, keepdims=True)
    safe = np.where(norms > 0.0, norms, 1.0)[..., None]
    out = (grad - unit * radial) / safe
    out[norms == 0.0] = 0.0
    return out


def log_softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


@dataclass(frozen=True)
class _Layout:
    group_of: np.ndarray
    pred_ptr: np.ndarray
    pred_idx: np.ndarray

    @classmethod
    def of(cls, spec: GraphSpec) -> "_Layout":
        preds = [spec.predecessors(k) for k in range(spec.K)]
        ptr = np.zeros(spec.K + 1, dtype=np.intp)
        ptr[1:] = np.cumsum([len(p) for p in preds])
        idx = np.array([u for p in preds for u in p], dtype=np.intp)
        return cls(spec.group_of(), ptr, idx)


@dataclass
class ForwardResult:
    """Training-row intermediates needed by :func:`backward`."""

    X_scaled: np.ndarray
    labels: np.ndarray
    param_hvs: np.ndarray
    groups: np.ndarray
    group_norms: np.ndarray
    samples: np.ndarray
    sample_norms: np.ndarray
    prototypes: np.ndarray
    prototype_norms: np.ndarray
    logits: np.ndarray
    probabilities: np.ndarray
    loss: float

    @property
    def n_degenerate(self) -> int:
        return int(np.count_nonzero(self.group_norms == 0.0)
                   + np.count_nonzero(self.sample_norms == 0.0)
                   + np.count_nonzero(self.prototype_norms == 0.0))

    @property
    def predictions(self) -> np.ndarray:
        return np.argmax(self.logits, axis=1)


def _encode_fast(X_scaled, embeddings, basis, layout, K, out=None):
    H = encode_parameters(X_scaled, embeddings, basis, out=out)
    n = H.shape[0]
    groups = np.empty((n, K, basis.D))
    group_norms = np.empty((n, K))
    samples = np.empty((n, basis.D))
    sample_norms = np.empty(n)
    _kernels.compose_forward(H, layout.group_of, layout.pred_ptr, layout.pred_idx,
                             groups, group_norms, samples, sample_norms)
    return H, groups, group_norms, samples, sample_norms


def forward(X_scaled: np.ndarray, labels: np.ndarray, embeddings: np.ndarray,
            basis: RandomBasis, spec: GraphSpec, n_classes: int,
            out: np.ndarray | None = None, layout: _Layout | None = None) -> ForwardResult:
    """Loss on the training rows ``X_scaled`` (already scaled).

    Logits are cosine similarities between each sample and every class
    prototype, so they lie in ``[-1, 1]``.
    """
    labels = np.asarray(labels, dtype=np.intp)
    layout = layout or _Layout.of(spec)
    X_scaled = np.ascontiguousarray(X_scaled, dtype=np.float64)
    H, groups, group_norms, samples, sample_norms = _encode_fast(
        X_scaled, embeddings, basis, layout, spec.K, out)
    sums, _ = class_sums(samples, labels, n_classes)
    prototypes, proto_norms = _unit_rows(sums)
    logits = samples @ prototypes.T
    logp = log_softmax(logits)
    loss = -float(np.mean(logp[np.arange(len(labels)), labels]))
    return ForwardResult(X_scaled, labels, H, groups, group_norms, samples, sample_norms,
                         prototypes, proto_norms, logits, np.exp(logp), loss)


def backward(fwd: ForwardResult, basis: RandomBasis, spec: GraphSpec,
             layout: _Layout | None = None) -> np.ndarray:
    """Exact gradient of the loss w.r.t. the embeddings, shape ``(P, d)``."""
    layout = layout or _Layout.of(spec)
    n = len(fwd.labels)
    g_logits = fwd.probabilities.copy()
    g_logits[np.arange(n), fwd.labels] -= 1.0
    g_logits /= n

    # samples enter both as queries and as members of their class prototype
    g_samples = g_logits @ fwd.prototypes
    g_protos = g_logits.T @ fwd.samples
    g_samples += _normalize_backward(fwd.prototypes, fwd.prototype_norms, g_protos)[fwd.labels]
    g_sample_sums = _normalize_backward(fwd.samples, fwd.sample_norms, g_samples)
    g_group_sums = _kernels.compose_backward(g_sample_sums, fwd.groups, fwd.group_norms,
                                             layout.pred_ptr, layout.pred_idx)
    g_proj = _kernels.projection_grad(fwd.param_hvs, fwd.X_scaled, g_group_sums,
                                      layout.group_of)
    return g_proj @ basis.rows.T


def prototype_stability(prototype_sequence) -> np.ndarray:
    """Mean per-class cosine similarity between consecutive prototype sets.

    ``prototype_sequence`` is ``(T, C, D)``; the result has length ``T - 1``.
    """
    seq = np.asarray(prototype_sequence, dtype=np.float64)
    if seq.shape[0] < 2:
        raise ValueError("need prototypes from at least two epochs")
    return np.array([_rho(seq[t], seq[t - 1]) for t in range(1, seq.shape[0])])


def _rho(current: np.ndarray, previous: np.ndarray) -> float:
    return float(np.mean([cosine_sim(a, b) for a, b in zip(current, previous)]))


@dataclass
class TrainingHistory:
    """Row ``t`` describes the model after ``t`` Adam updates (row 0 = initialization)."""

    epoch: list = field(default_factory=list)
    loss: list = field(default_factory=list)
    train_acc: list = field(default_factory=list)
    test_acc: list = field(default_factory=list)
    rho_bar: list = field(default_factory=list)
    n_degenerate: list = field(default_factory=list)

    COLUMNS = ("epoch", "loss", "train_acc", "test_acc", "rho_bar")

    def append(self, epoch, loss, train_acc, test_acc, rho_bar, n_degenerate):
        self.epoch.append(epoch)
        self.loss.append(loss)
        self.train_acc.append(train_acc)
        self.test_acc.append(test_acc)
        self.rho_bar.append(rho_bar)
        self.n_degenerate.append(n_degenerate)

    def __len__(self):
        return len(self.epoch)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(self.COLUMNS)
            for row in zip(*(getattr(self, c) for c in self.COLUMNS)):
                writer.writerow([row[0]] + [format_float(v) for v in row[1:]])

    @classmethod
    def from_csv(cls, path) -> "TrainingHistory":
        hist = cls()
        with open(path, newline="", encoding="utf-8") as fh:
            for row in csv.DictReader(fh):
                hist.append(int(row["epoch"]), float(row["loss"]), float(row["train_acc"]),
                            float(row["test_acc"]), float(row["rho_bar"]), 0)
        return hist


def format_float(v) -> str:
    """Canonical shortest round-trip decimal."""
    return repr(float(v))


@dataclass
class ModelState:
    config: TrainConfig
    spec: GraphSpec
    scaler: ScalerStats
    basis: RandomBasis
    embeddings: np.ndarray
    initial_embeddings: np.ndarray
    memory: PrototypeMemory
    initial_memory: PrototypeMemory
    train_idx: np.ndarray
    test_idx: np.ndarray
    epoch: int
    history: TrainingHistory
    parameter_names: tuple[str, ...] | None = None
    class_names: tuple[str, ...] | None = None
    dataset_hash: str | None = None
    prototype_trace: np.ndarray | None = None

    @property
    def n_classes(self) -> int:
        return self.memory.C

    def encode(self, X: np.ndarray, initial: bool = False) -> Encoded:
        """Encode raw (unscaled) rows with the current or initial embeddings."""
        emb = self.initial_embeddings if initial else self.embeddings
        return encode(scale(X, self.scaler), emb, self.basis, self.spec)

    def logits(self, X: np.ndarray) -> np.ndarray:
        return self.encode(X).samples @ self.memory.prototypes.T

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.argmax(self.logits(X), axis=1)


def _accuracy(logits: np.ndarray, labels: np.ndarray) -> float:
    if len(labels) == 0:
        return float("nan")
    return float(np.mean(np.argmax(logits, axis=1) == labels))


def train(X: np.ndarray, labels, train_idx, test_idx, spec: GraphSpec,
          config: TrainConfig = TrainConfig(), *, n_classes: int | None = None,
          class_names=None, parameter_names=None, dataset_hash: str | None = None,
          keep_prototypes: bool = False, track_test: bool = True) -> ModelState:
    """Train embeddings for ``config.epochs`` full-batch Adam steps.

    Test rows are used for reporting only. ``track_test=False`` skips the
    per-epoch test evaluation (the final test accuracy is still recorded);
    a collection of epoch numbers evaluates only at those epochs.
    """
    X = np.asarray(X, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.intp)
    train_idx = np.asarray(train_idx, dtype=np.intp)
    test_idx = np.asarray(test_idx if test_idx is not None else [], dtype=np.intp)
    if np.intersect1d(train_idx, test_idx).size:
        raise DataError("train and test rows overlap")
    if n_classes is None:
        n_classes = len(class_names) if class_names is not None else int(labels.max()) + 1
    spec.checked(X.shape[1])

    scaler = fit_scaler(X, train_idx, config.epsilon, names=parameter_names)
    X_scaled = scale(X, scaler)
    X_train, y_train = np.ascontiguousarray(X_scaled[train_idx]), labels[train_idx]
    X_test, y_test = np.ascontiguousarray(X_scaled[test_idx]), labels[test_idx]

    basis = RandomBasis.generate(config.seed, config.d, config.D)
    embeddings = init_embeddings(X.shape[1], config.d, config.seed)
    initial_embeddings = embeddings.copy()
    optimizer = Adam(config.lr, config.adam_beta1, config.adam_beta2, config.adam_eps)

    train_buf = np.empty((len(train_idx), X.shape[1], config.D))
    test_buf = np.empty((len(test_idx), X.shape[1], config.D)) if len(test_idx) else None
    history = TrainingHistory()
    trace = [] if keep_prototypes else None
    previous = initial_protos = None

    if isinstance(track_test, bool):
        test_epochs = range(config.epochs + 1) if track_test else ()
    else:
        test_epochs = track_test
    test_epochs = set(int(e) for e in test_epochs) | {config.epochs}

    layout = _Layout.of(spec)
    for epoch in range(config.epochs + 1):
        fwd = forward(X_train, y_train, embeddings, basis, spec, n_classes, out=train_buf,
                      layout=layout)
        if not np.isfinite(fwd.loss) or not np.all(np.isfinite(embeddings)):
            raise NumericalError(
                f"non-finite loss at epoch {epoch}: loss={fwd.loss}, "
                f"embedding norms={np.linalg.norm(embeddings, axis=1).tolist()}, "
                f"degenerate vectors={fwd.n_degenerate}")
        protos = fwd.prototypes
        if initial_protos is None:
            initial_protos = protos.copy()
        test_acc = float("nan")
        if test_buf is not None and epoch in test_epochs:
            test_samples = _encode_fast(X_test, embeddings, basis, layout, spec.K, test_buf)[3]
            test_acc = _accuracy(test_samples @ protos.T, y_test)
        rho = float("nan") if previous is None else _rho(protos, previous)
        history.append(epoch, fwd.loss, _accuracy(fwd.logits, y_train), test_acc, rho,
                       fwd.n_degenerate)
        if trace is not None:
            trace.append(protos.copy())
        previous = protos.copy()
        if epoch == config.epochs:
            break
        grad = backward(fwd, basis, spec, layout)
        optimizer.step(embeddings, grad)

    counts = np.bincount(y_train, minlength=n_classes)
    names = None if class_names is None else tuple(class_names)
    return ModelState(
        config=config, spec=spec, scaler=scaler, basis=basis, embeddings=embeddings,
        initial_embeddings=initial_embeddings,
        memory=PrototypeMemory(previous, counts, names),
        initial_memory=PrototypeMemory(initial_protos, counts, names),
        train_idx=train_idx, test_idx=test_idx, epoch=config.epochs, history=history,
        parameter_names=None if parameter_names is None else tuple(parameter_names),
        class_names=names, dataset_hash=dataset_hash,
        prototype_trace=None if trace is None else np.stack(trace))


# checkpoints

def _hex(a: np.ndarray):
    a = np.asarray(a, dtype=np.float64)
    if a.ndim == 1:
        return [float(v).hex() for v in a]
    return [_hex(row) for row in a]


def _unhex(rows) -> np.ndarray:
    if rows and isinstance(rows[0], list):
        return np.array([[float.fromhex(v) for v in row] for row in rows], dtype=np.float64)
    return np.array([float.fromhex(v) for v in rows], dtype=np.float64)


def checkpoint_dict(state: ModelState, initial: bool = False) -> dict:
    """Serializable view of ``state``; ``initial=True`` describes epoch 0."""
    emb = state.initial_embeddings if initial else state.embeddings
    mem = state.initial_memory if initial else state.memory
    return {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "tool_version": __version__,
        "config": state.config.to_dict(),
        "seed": state.config.seed,
        "epoch": 0 if initial else state.epoch,
        "basis": state.basis.describe(),
        "parameters": list(state.parameter_names) if state.parameter_names else None,
        "classes": list(state.class_names) if state.class_names else None,
        "graph": state.spec.to_dict(),
        "scaler": {"x_min": _hex(state.scaler.x_min), "x_max": _hex(state.scaler.x_max),
                   "epsilon": state.scaler.epsilon},
        "embeddings": _hex(emb),
        "initial_embeddings": _hex(state.initial_embeddings),
        "prototypes": _hex(mem.prototypes),
        "initial_prototypes": _hex(state.initial_memory.prototypes),
        "class_counts": [int(c) for c in mem.class_counts],
        "train_idx": [int(i) for i in state.train_idx],
        "test_idx": [int(i) for i in state.test_idx],
        "dataset_hash": state.dataset_hash,
    }


def save_checkpoint(state: ModelState, path, initial: bool = False) -> None:
    Path(path).write_text(json.dumps(checkpoint_dict(state, initial), indent=1) + "\n",
                          encoding="utf-8")


def load_checkpoint(path, history: TrainingHistory | None = None) -> ModelState:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("format") != CHECKPOINT_FORMAT:
        raise DataError(f"{path} is not a model checkpoint")
    if doc.get("version") != CHECKPOINT_VERSION:
        raise DataError(f"unsupported checkpoint version {doc.get('version')}")
    config = TrainConfig.from_dict(doc["config"])
    basis = RandomBasis.generate(doc["basis"]["seed"], doc["basis"]["d"], doc["basis"]["D"])
    if basis.fingerprint() != doc["basis"]["sha256"]:
        raise DataError("regenerated basis does not match the checkpoint fingerprint")
    params = doc["parameters"]
    columns = params if params is not None else list(range(len(doc["scaler"]["x_min"])))
    spec = graph_spec_from_dict(doc["graph"], columns)
    scaler = ScalerStats(_unhex(doc["scaler"]["x_min"]), _unhex(doc["scaler"]["x_max"]),
                         doc["scaler"]["epsilon"])
    classes = tuple(doc["classes"]) if doc["classes"] else None
    counts = np.array(doc["class_counts"])
    return ModelState(
        config=config, spec=spec, scaler=scaler, basis=basis,
        embeddings=_unhex(doc["embeddings"]),
        initial_embeddings=_unhex(doc["initial_embeddings"]),
        memory=PrototypeMemory(_unhex(doc["prototypes"]), counts, classes),
        initial_memory=PrototypeMemory(_unhex(doc["initial_prototypes"]), counts, classes),
        train_idx=np.array(doc["train_idx"], dtype=np.intp),
        test_idx=np.array(doc["test_idx"], dtype=np.intp),
        epoch=int(doc["epoch"]), history=history or TrainingHistory(),
        parameter_names=None if params is None else tuple(params),
        class_names=classes, dataset_hash=doc.get("dataset_hash"))
