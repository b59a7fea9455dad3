"""Intrinsic attribution and memory-alignment diagnostics.

Every component (a parameter, a group, or a parameter inside one group)
gets a class-partitioned memory. Its cosine affinities to the class
prototypes are turned into a distribution over classes with a tempered
softmax; the mass that lands on the component's own class is both its
alignment score and, after normalization over components, its
attribution weight.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, DataError, DimensionError
from .graph import GraphSpec
from .hdc import cosine_matrix
from .memory import ComponentMemoryBank, PrototypeMemory, build_component_memories

LEVELS = ("parameter", "group", "within")


@dataclass(frozen=True)
class Affinities:
    """``values[c, g, l]``: similarity of component ``g``'s class-``c`` memory to target ``l``."""

    values: np.ndarray
    degenerate: np.ndarray   # (C, G) zero-norm component memories

    @property
    def shape(self):
        return self.values.shape


def _prototype_array(memory) -> np.ndarray:
    if isinstance(memory, PrototypeMemory):
        return memory.prototypes
    return np.asarray(memory, dtype=np.float64)


def component_affinity(components: np.ndarray, memory) -> Affinities:
    """Affinities of component memories ``(C, G, D)`` to prototypes ``(L, D)``."""
    components = np.asarray(components, dtype=np.float64)
    protos = _prototype_array(memory)
    if components.ndim != 3:
        raise DimensionError(f"component memories must be (C, G, D), got {components.shape}")
    C, G, D = components.shape
    a = cosine_matrix(components.reshape(C * G, D), protos).reshape(C, G, protos.shape[0])
    return Affinities(a, np.linalg.norm(components, axis=-1) == 0.0)


def _affinity_values(affinities) -> np.ndarray:
    if isinstance(affinities, Affinities):
        return affinities.values
    return np.asarray(affinities, dtype=np.float64)


def tempered_softmax(a: np.ndarray, beta: float) -> np.ndarray:
    """``softmax(beta * a)`` over the last axis."""
    if not beta > 0:
        raise ConfigError(f"temperature beta must be positive, got {beta}")
    z = beta * np.asarray(a, dtype=np.float64)
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def _own_class_mass(pi: np.ndarray) -> np.ndarray:
    C = pi.shape[0]
    if pi.shape[2] != C:
        raise DimensionError(f"{C} component classes but {pi.shape[2]} targets")
    return pi[np.arange(C), :, np.arange(C)]


@dataclass(frozen=True)
class AttributionReport:
    level: str
    beta: float
    affinities: np.ndarray   # (C, G, C)
    pi: np.ndarray           # (C, G, C)
    q: np.ndarray            # (C, G)
    alpha: np.ndarray        # (C, G)
    components: tuple[str, ...]
    classes: tuple[str, ...]

    def weights(self, c) -> dict:
        c = self.classes.index(c) if isinstance(c, str) else c
        return dict(zip(self.components, self.alpha[c].tolist()))


def _names(names, n, prefix):
    return tuple(str(v) for v in names) if names is not None else tuple(
        f"{prefix}{i}" for i in range(n))


def attribution(affinities, beta: float = 1.0, level: str = "parameter",
                components=None, classes=None) -> AttributionReport:
    """Attribution weights from affinities ``(C, G, C)``.

    ``q[c, g]`` is the own-class softmax mass and ``alpha`` normalizes it
    over the components of each class.
    """
    a = _affinity_values(affinities)
    pi = tempered_softmax(a, beta)
    q = _own_class_mass(pi)
    alpha = q / q.sum(axis=1, keepdims=True)
    C, G = q.shape
    return AttributionReport(level, float(beta), a, pi, q, alpha,
                             _names(components, G, "g"), _names(classes, C, "class"))


def within_group_affinity(bank: ComponentMemoryBank, spec: GraphSpec, k) -> Affinities:
    """Parameter memories of group ``k`` against the class memories of group ``k``."""
    k = spec.group_index(k)
    members = list(spec.groups[k].parameters)
    return component_affinity(bank.parameters[:, members], bank.groups[:, k])


def within_group_attribution(bank: ComponentMemoryBank, spec: GraphSpec, k, beta: float = 1.0,
                             parameter_names=None, classes=None) -> AttributionReport:
    k = spec.group_index(k)
    members = list(spec.groups[k].parameters)
    names = None
    if parameter_names is not None:
        names = [parameter_names[j] for j in members]
    return attribution(within_group_affinity(bank, spec, k), beta,
                       f"within:{spec.groups[k].name}", names or [f"x{j}" for j in members],
                       classes)


@dataclass(frozen=True)
class MasReport:
    granularity: str
    beta: float
    A: np.ndarray    # (C, G)
    S: np.ndarray    # (C, G)
    components: tuple[str, ...]
    classes: tuple[str, ...]

    @property
    def MA(self) -> np.ndarray:
        return self.A.mean(axis=1)

    @property
    def MS(self) -> np.ndarray:
        return self.S.mean(axis=1)


def mas(affinities, beta: float = 1.0, granularity: str = "group", components=None,
        classes=None) -> MasReport:
    """Alignment ``A`` (own-class mass) and separation ``S`` (``A`` minus the
    strongest competing class) for every component."""
    pi = tempered_softmax(_affinity_values(affinities), beta)
    A = _own_class_mass(pi)
    C, G = A.shape
    rivals = pi.copy()
    rivals[np.arange(C), :, np.arange(C)] = -np.inf
    S = A - rivals.max(axis=2)
    return MasReport(granularity, float(beta), A, S, _names(components, G, "g"),
                     _names(classes, C, "class"))


@dataclass(frozen=True)
class AggregatedAttribution:
    level: str
    beta: float
    alpha: np.ndarray
    alpha_std: np.ndarray
    n_reports: int
    components: tuple[str, ...]
    classes: tuple[str, ...]


def aggregate_attributions(reports) -> AggregatedAttribution:
    """Mean attribution weights over splits, renormalized per class."""
    reports = list(reports)
    if not reports:
        raise DataError("no attribution reports to aggregate")
    first = reports[0]
    for r in reports[1:]:
        if r.alpha.shape != first.alpha.shape or r.components != first.components:
            raise DimensionError(
                f"cannot aggregate reports of shapes {first.alpha.shape} and {r.alpha.shape}")
    stack = np.stack([r.alpha for r in reports])
    mean = stack.mean(axis=0)
    mean /= mean.sum(axis=1, keepdims=True)
    return AggregatedAttribution(first.level, first.beta, mean, stack.std(axis=0),
                                 len(reports), first.components, first.classes)


# sample movement in prototype coordinates

@dataclass(frozen=True)
class SampleEmbedding:
    coordinates: np.ndarray   # (n, 2) similarity to each reference prototype
    distances: np.ndarray     # (n,) 1 - sim(h, m_y)
    labels: np.ndarray


def sample_embedding(samples: np.ndarray, reference_prototypes, labels,
                     prototypes=None) -> SampleEmbedding:
    """Two-class coordinates against fixed reference prototypes.

    Coordinates always use ``reference_prototypes`` (typically those of
    epoch 0) so embeddings from different epochs share axes. Distances are
    taken to ``prototypes`` if given, else to the references.
    """
    ref = _prototype_array(reference_prototypes)
    if ref.shape[0] != 2:
        raise DataError(f"sample embedding needs exactly two prototypes, got {ref.shape[0]}")
    labels = np.asarray(labels, dtype=np.intp)
    coords = cosine_matrix(samples, ref)
    own = ref if prototypes is None else _prototype_array(prototypes)
    sims = cosine_matrix(samples, own)
    dist = 1.0 - sims[np.arange(len(labels)), labels]
    return SampleEmbedding(coords, dist, labels)


def distance_summary(distances, labels, n_classes: int) -> list[tuple[float, float, int]]:
    """``(mean, std, count)`` of distances per class; nan for an absent class."""
    distances = np.asarray(distances, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.intp)
    out = []
    for c in range(n_classes):
        d = distances[labels == c]
        out.append((float(d.mean()), float(d.std()), int(d.size)) if d.size
                   else (float("nan"), float("nan"), 0))
    return out


# convenience wrappers over a trained state

def state_components(state, X: np.ndarray, labels, initial: bool = False):
    """Encoded training rows, their component bank and the matching prototypes."""
    labels = np.asarray(labels, dtype=np.intp)
    enc = state.encode(np.asarray(X, dtype=np.float64)[state.train_idx], initial=initial)
    bank = build_component_memories(enc.param_hvs, enc.groups, labels[state.train_idx],
                                    n_classes=state.n_classes, class_names=state.class_names)
    memory = state.initial_memory if initial else state.memory
    return enc, bank, memory


def parse_level(level: str, spec: GraphSpec):
    """``'param'``/``'parameter'``, ``'group'`` or ``'within:<group name or index>'``."""
    if level in ("param", "parameter"):
        return "parameter", None
    if level == "group":
        return "group", None
    if level.startswith("within:"):
        return "within", spec.group_index(level.split(":", 1)[1])
    raise ConfigError(f"unknown attribution level {level!r}")


def explain_state(state, X, labels, level: str = "group", beta: float | None = None,
                  initial: bool = False) -> AttributionReport:
    beta = state.config.beta if beta is None else beta
    kind, k = parse_level(level, state.spec)
    _, bank, memory = state_components(state, X, labels, initial)
    classes = state.class_names
    pnames = state.parameter_names or [f"x{j}" for j in range(state.spec.n_parameters)]
    if kind == "parameter":
        return attribution(component_affinity(bank.parameters, memory), beta, "parameter",
                           pnames, classes)
    if kind == "group":
        return attribution(component_affinity(bank.groups, memory), beta, "group",
                           state.spec.group_names, classes)
    return within_group_attribution(bank, state.spec, k, beta, pnames, classes)


def mas_state(state, X, labels, granularity: str = "group", beta: float | None = None,
              initial: bool = False) -> MasReport:
    beta = state.config.beta if beta is None else beta
    kind, _ = parse_level(granularity, state.spec)
    _, bank, memory = state_components(state, X, labels, initial)
    if kind == "parameter":
        comps = bank.parameters
        names = state.parameter_names or [f"x{j}" for j in range(state.spec.n_parameters)]
    elif kind == "group":
        comps, names = bank.groups, state.spec.group_names
    else:
        raise ConfigError("MAS granularity must be 'param' or 'group'")
    return mas(component_affinity(comps, memory), beta, kind, names, state.class_names)


# exporters

def attribution_rows(report) -> list[list]:
    """Long-format rows ``level, class, component, weight``."""
    return [[report.level, cls, comp, float(report.alpha[c, g])]
            for c, cls in enumerate(report.classes)
            for g, comp in enumerate(report.components)]


def _write_rows(path, header, rows) -> None:
    from .trainer import format_float

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_float(v) if isinstance(v, float) else v for v in row])


def write_attribution_csv(reports, path) -> None:
    if isinstance(reports, (AttributionReport, AggregatedAttribution)):
        reports = [reports]
    _write_rows(path, ["level", "class", "component", "weight"],
                [row for r in reports for row in attribution_rows(r)])


def attribution_to_dict(report) -> dict:
    doc = {"level": report.level, "beta": report.beta, "classes": list(report.classes),
           "components": list(report.components), "alpha": report.alpha.tolist()}
    if isinstance(report, AttributionReport):
        doc.update(affinities=report.affinities.tolist(), pi=report.pi.tolist(),
                   q=report.q.tolist())
    else:
        doc.update(alpha_std=report.alpha_std.tolist(), n_reports=report.n_reports)
    return doc


def write_attribution_json(reports, path) -> None:
    if isinstance(reports, (AttributionReport, AggregatedAttribution)):
        reports = [reports]
    Path(path).write_text(json.dumps([attribution_to_dict(r) for r in reports], indent=1)
                          + "\n", encoding="utf-8")


def mas_component_rows(report: MasReport, stage: str = "", split: int | str = "") -> list[list]:
    """Per-component ``A``/``S`` rows, suitable for histograms across splits."""
    return [[stage, split, report.granularity, cls, comp, float(report.A[c, g]),
             float(report.S[c, g])]
            for c, cls in enumerate(report.classes)
            for g, comp in enumerate(report.components)]


MAS_COMPONENT_HEADER = ["stage", "split", "granularity", "class", "component", "A", "S"]
MAS_SUMMARY_HEADER = ["stage", "granularity", "class", "MA", "MS"]


def mas_summary_rows(report: MasReport, stage: str = "") -> list[list]:
    return [[stage, report.granularity, cls, float(report.MA[c]), float(report.MS[c])]
            for c, cls in enumerate(report.classes)]


def write_mas_csv(reports: dict, component_path, summary_path) -> None:
    """``reports`` maps a stage label (e.g. ``"epoch0"``) to a :class:`MasReport`."""
    _write_rows(component_path, MAS_COMPONENT_HEADER,
                [row for stage, r in reports.items() for row in mas_component_rows(r, stage)])
    _write_rows(summary_path, MAS_SUMMARY_HEADER,
                [row for stage, r in reports.items() for row in mas_summary_rows(r, stage)])
