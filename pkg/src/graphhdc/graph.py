"""Directed group graph: parameter grouping, predecessor binding and
sample-hypervector composition.

A sample's parameter hypervectors are bundled (and normalized) per group,
each group vector is bound with the group vectors of its *direct*
predecessors, and the bound group vectors are bundled into the sample
hypervector. Interaction terms therefore exist only along edges.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from .errors import GraphSpecError
from .hdc import normalize


@dataclass(frozen=True)
class Group:
    name: str
    parameters: tuple[int, ...]


@dataclass(frozen=True)
class GraphSpec:
    groups: tuple[Group, ...]
    edges: tuple[tuple[int, int], ...] = ()
    parameter_names: tuple[str, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "groups", tuple(
            Group(g.name, tuple(int(p) for p in g.parameters)) for g in self.groups))
        object.__setattr__(self, "edges", tuple((int(u), int(k)) for u, k in self.edges))
        if self.parameter_names is not None:
            object.__setattr__(self, "parameter_names", tuple(self.parameter_names))

    @property
    def K(self) -> int:
        return len(self.groups)

    @property
    def n_parameters(self) -> int:
        return sum(len(g.parameters) for g in self.groups)

    @property
    def group_names(self) -> list[str]:
        return [g.name for g in self.groups]

    def group_index(self, key) -> int:
        if isinstance(key, (int, np.integer)):
            if not 0 <= key < self.K:
                raise GraphSpecError(f"group index {key} out of range")
            return int(key)
        names = self.group_names
        if key in names:
            return names.index(key)
        if isinstance(key, str) and key.lstrip("-").isdigit():
            return self.group_index(int(key))
        raise GraphSpecError(f"unknown group {key!r}")

    def predecessors(self, k: int) -> list[int]:
        """Direct predecessors of group ``k`` in ascending order."""
        return sorted({u for u, v in self.edges if v == k})

    def group_of(self) -> np.ndarray:
        owner = np.full(self.n_parameters, -1, dtype=np.intp)
        for k, g in enumerate(self.groups):
            owner[list(g.parameters)] = k
        return owner

    def has_cycle(self) -> bool:
        succ = {k: [] for k in range(self.K)}
        for u, v in self.edges:
            if u in succ and 0 <= v < self.K:
                succ[u].append(v)
        state = dict.fromkeys(succ, 0)

        def visit(node):
            state[node] = 1
            for nxt in succ[node]:
                if state[nxt] == 1 or (state[nxt] == 0 and visit(nxt)):
                    return True
            state[node] = 2
            return False

        return any(state[k] == 0 and visit(k) for k in succ)

    def checked(self, n_parameters: int | None = None, strict: bool = False) -> "GraphSpec":
        problems = validate(self, n_parameters, strict=strict)
        if problems:
            raise GraphSpecError(problems)
        return self

    def to_dict(self) -> dict:
        names = self.parameter_names

        def label(j):
            return names[j] if names is not None else j

        return {
            "groups": [{"name": g.name, "parameters": [label(j) for j in g.parameters]}
                       for g in self.groups],
            "edges": [[self.groups[u].name, self.groups[k].name] for u, k in self.edges],
        }


def validate(spec: GraphSpec, n_parameters: int | None = None, strict: bool = False) -> list[str]:
    """Every invariant violation of ``spec``; an empty list means valid.

    Cycles are reported as a warning unless ``strict`` is set.
    """
    problems: list[str] = []
    P = spec.n_parameters if n_parameters is None else n_parameters
    names = spec.parameter_names

    def label(j):
        if names is not None and 0 <= j < len(names):
            return names[j]
        return j

    seen_names = set()
    for g in spec.groups:
        if g.name in seen_names:
            problems.append(f"duplicate group name {g.name!r}")
        seen_names.add(g.name)
        if not g.parameters:
            problems.append(f"group {g.name!r} is empty")

    owner: dict[int, str] = {}
    for g in spec.groups:
        for j in g.parameters:
            if not 0 <= j < P:
                problems.append(f"unknown parameter index {j} in group {g.name!r}")
                continue
            if j in owner:
                problems.append(f"parameter {label(j)} in two groups "
                                f"({owner[j]!r} and {g.name!r})")
            else:
                owner[j] = g.name
    missing = [label(j) for j in range(P) if j not in owner]
    if missing:
        problems.append(f"parameters not assigned to any group: {missing}")

    seen_edges = set()
    for u, k in spec.edges:
        if not (0 <= u < spec.K and 0 <= k < spec.K):
            problems.append(f"edge ({u}, {k}) references an unknown group")
            continue
        if u == k:
            problems.append(f"self-loop on group {spec.groups[u].name!r}")
        if (u, k) in seen_edges:
            problems.append(f"duplicate edge ({spec.groups[u].name!r}, {spec.groups[k].name!r})")
        seen_edges.add((u, k))

    if not problems and spec.has_cycle():
        if strict:
            problems.append("graph contains a directed cycle")
        else:
            warnings.warn("graph contains a directed cycle", stacklevel=2)
    return problems


def graph_spec_from_dict(doc: dict, columns) -> GraphSpec:
    """Resolve a name-based document against dataset column names."""
    columns = list(columns)
    if not isinstance(doc, dict) or "groups" not in doc:
        raise GraphSpecError("graph spec document needs a 'groups' list")
    index = {name: j for j, name in enumerate(columns)}
    problems = []
    groups = []
    for entry in doc["groups"]:
        params = []
        for name in entry.get("parameters", []):
            if name not in index:
                problems.append(f"group {entry.get('name')!r} names unknown column {name!r}")
            else:
                params.append(index[name])
        groups.append(Group(str(entry["name"]), tuple(params)))
    group_index = {g.name: k for k, g in enumerate(groups)}
    edges = []
    for edge in doc.get("edges", []) or []:
        if len(edge) != 2:
            problems.append(f"edge {edge!r} must be a [from, to] pair")
            continue
        src, dst = edge
        if src not in group_index or dst not in group_index:
            problems.append(f"edge {edge!r} names an unknown group")
            continue
        edges.append((group_index[src], group_index[dst]))
    if problems:
        raise GraphSpecError(problems)
    return GraphSpec(tuple(groups), tuple(edges), tuple(columns))


def load_graph_spec(path, columns=None) -> GraphSpec:
    """Read a YAML/JSON graph spec.

    ``columns`` defaults to the parameter names in group order, which
    makes the file self-describing.
    """
    text = Path(path).read_text(encoding="utf-8")
    doc = yaml.safe_load(text)
    if columns is None:
        columns = [name for entry in doc.get("groups", []) for name in entry.get("parameters", [])]
    return graph_spec_from_dict(doc, columns)


def dump_graph_spec(spec: GraphSpec, path) -> None:
    Path(path).write_text(json.dumps(spec.to_dict(), indent=2) + "\n", encoding="utf-8")


# single-sample composition

def group_hv(param_hvs: np.ndarray, spec: GraphSpec, k: int) -> np.ndarray:
    """Normalized bundle of the parameter hypervectors of group ``k``."""
    members = list(spec.groups[k].parameters)
    return normalize(np.asarray(param_hvs, dtype=np.float64)[members].sum(axis=0))


def graph_bind(group_hvs: np.ndarray, spec: GraphSpec) -> np.ndarray:
    """Bind every group vector with the vectors of its direct predecessors."""
    group_hvs = np.asarray(group_hvs, dtype=np.float64)
    bound = group_hvs.copy()
    for k in range(spec.K):
        for u in spec.predecessors(k):
            bound[k] = bound[k] * group_hvs[u]
    return bound


def sample_hv(bound_group_hvs: np.ndarray) -> np.ndarray:
    return normalize(np.asarray(bound_group_hvs, dtype=np.float64).sum(axis=0))


def compose_sample(param_hvs: np.ndarray, spec: GraphSpec) -> np.ndarray:
    groups = np.stack([group_hv(param_hvs, spec, k) for k in range(spec.K)])
    return sample_hv(graph_bind(groups, spec))


# batched composition with intermediates

@dataclass
class Composition:
    """Intermediates of composing a batch of samples.

    ``group_sums`` (n, K, D), ``group_norms`` (n, K), ``groups`` (n, K, D)
    normalized, ``bound`` (n, K, D), ``sample_sums`` (n, D),
    ``sample_norms`` (n,), ``samples`` (n, D) normalized.
    """

    group_sums: np.ndarray
    group_norms: np.ndarray
    groups: np.ndarray
    bound: np.ndarray
    sample_sums: np.ndarray
    sample_norms: np.ndarray
    samples: np.ndarray

    @property
    def n_degenerate(self) -> int:
        return int(np.count_nonzero(self.group_norms == 0.0)
                   + np.count_nonzero(self.sample_norms == 0.0))


def _normalize_with_norms(v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    norms = np.linalg.norm(v, axis=-1)
    safe = np.where(norms > 0.0, norms, 1.0)
    out = v / safe[..., None]
    out[norms == 0.0] = 0.0
    return out, norms


def compose(param_hvs: np.ndarray, spec: GraphSpec, group_sums: np.ndarray | None = None
            ) -> Composition:
    """Compose parameter hypervectors ``(n, P, D)`` into sample hypervectors.

    ``group_sums`` may be supplied when the caller already has them.
    """
    if group_sums is None:
        n, _, D = param_hvs.shape
        group_sums = np.empty((n, spec.K, D))
        for k, g in enumerate(spec.groups):
            param_hvs[:, list(g.parameters)].sum(axis=1, out=group_sums[:, k])
    groups, group_norms = _normalize_with_norms(group_sums)
    bound = groups.copy()
    for k in range(spec.K):
        for u in spec.predecessors(k):
            bound[:, k] *= groups[:, u]
    sample_sums = bound.sum(axis=1)
    samples, sample_norms = _normalize_with_norms(sample_sums)
    return Composition(group_sums, group_norms, groups, bound, sample_sums,
                       sample_norms, samples)
