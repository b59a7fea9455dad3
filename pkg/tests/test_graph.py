import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from graphhdc.errors import GraphSpecError
from graphhdc.graph import (GraphSpec, Group, compose, compose_sample, graph_bind, group_hv,
                            load_graph_spec, sample_hv, validate)
from graphhdc.hdc import nbundle, normalize
from graphhdc.synthetic import grouped_spec

import oracles


def two_groups(edges=()):
    return GraphSpec((Group("a", range(4)), Group("b", range(4, 8))), edges)


def test_validate_ok_and_errors():
    assert validate(two_groups([(0, 1)]), 8) == []
    bad = GraphSpec((Group("a", range(4)), Group("b", range(3, 8))), [(1, 1)])
    problems = validate(bad, 8)
    assert any("parameter 3 in two groups" in p for p in problems)
    assert any("self-loop" in p for p in problems)
    missing = GraphSpec((Group("a", [0, 1]),))
    assert any("not assigned" in p for p in validate(missing, 3))
    dup = GraphSpec((Group("a", [0]), Group("a", [1])), [(0, 1), (0, 1)])
    problems = validate(dup, 2)
    assert any("duplicate group name" in p for p in problems)
    assert any("duplicate edge" in p for p in problems)
    with pytest.raises(GraphSpecError):
        missing.checked(3)


def test_cycles_warn_or_fail():
    cyc = two_groups([(0, 1), (1, 0)])
    with pytest.warns(UserWarning, match="cycle"):
        assert validate(cyc, 8) == []
    assert validate(cyc, 8, strict=True)


def test_group_hv_cases(rng):
    H = rng.standard_normal((6, 5))
    spec = GraphSpec((Group("one", [0]), Group("three", [1, 2, 3]), Group("pair", [4, 5])))
    np.testing.assert_allclose(group_hv(H, spec, 0), normalize(H[0]), atol=1e-15)
    ref = oracles.unit(H[1] + H[2] + H[3])
    np.testing.assert_allclose(group_hv(H, spec, 1), ref, atol=1e-12)
    H[5] = -H[4]
    np.testing.assert_array_equal(group_hv(H, spec, 2), np.zeros(5))


def test_bind_one_hop_only():
    spec = GraphSpec(tuple(Group(f"g{k}", [k]) for k in range(3)), [(0, 1), (1, 2)])
    n = np.array([[1.0, 2.0, 3.0, 4.0], [2.0, 1.0, 0.5, -1.0], [3.0, -1.0, 2.0, 1.0]])
    bound = graph_bind(n, spec)
    np.testing.assert_array_equal(bound[0], n[0])
    np.testing.assert_array_equal(bound[1], n[1] * n[0])
    np.testing.assert_array_equal(bound[2], n[2] * n[1])  # not n2*n1*n0


def test_bind_identity_and_edgeless(rng):
    n = rng.standard_normal((2, 8))
    n[0] = 1.0
    np.testing.assert_array_equal(graph_bind(n, two_groups([(0, 1)]))[1], n[1])
    np.testing.assert_array_equal(graph_bind(n, two_groups()), n)


def test_sample_hv_cases(rng):
    u = normalize(rng.standard_normal(9))
    np.testing.assert_allclose(sample_hv(u[None]), u, atol=1e-15)
    np.testing.assert_array_equal(sample_hv(np.stack([u, -u])), np.zeros(9))
    groups = rng.standard_normal((4, 9))
    np.testing.assert_allclose(sample_hv(groups), oracles.unit(groups.sum(axis=0)), atol=1e-12)


@st.composite
def graph_case(draw):
    K = draw(st.integers(1, 4))
    sizes = [draw(st.integers(1, 3)) for _ in range(K)]
    pairs = [(u, k) for u in range(K) for k in range(K) if u != k]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=3)) if pairs else []
    seed = draw(st.integers(0, 2 ** 31))
    P = sum(sizes)
    bounds = np.cumsum([0] + sizes)
    spec = GraphSpec(tuple(Group(f"g{k}", range(bounds[k], bounds[k + 1])) for k in range(K)),
                     edges)
    H = np.random.default_rng(seed).standard_normal((3, P, 16))
    return spec, H


@given(graph_case())
def test_batched_compose_matches_oracle(case):
    spec, H = case
    comp = compose(H, spec)
    groups = [list(g.parameters) for g in spec.groups]
    ref, G = oracles.compose_params(H, groups, list(spec.edges))
    np.testing.assert_allclose(comp.groups, G, atol=1e-12)
    np.testing.assert_allclose(comp.samples, ref, atol=1e-12)
    for i in range(H.shape[0]):
        np.testing.assert_allclose(comp.samples[i], compose_sample(H[i], spec), atol=1e-12)


@given(graph_case(), st.integers(0, 2 ** 31))
def test_permutation_within_group(case, seed):
    spec, H = case
    perm_spec = GraphSpec(tuple(Group(g.name, np.random.default_rng(seed).permutation(
        list(g.parameters))) for g in spec.groups), spec.edges)
    for k in range(spec.K):
        np.testing.assert_allclose(group_hv(H[0], perm_spec, k), group_hv(H[0], spec, k),
                                   atol=1e-12)


def test_locality_and_edge_gating(rng):
    spec = grouped_spec(9, 3, [(0, 1)])
    H = rng.standard_normal((9, 12))
    comp = compose(H[None], spec)
    H2 = H.copy()
    H2[8] += 1.0  # group 2 is isolated
    comp2 = compose(H2[None], spec)
    np.testing.assert_array_equal(comp.bound[0, :2], comp2.bound[0, :2])
    assert not np.allclose(comp.bound[0, 2], comp2.bound[0, 2])
    H3 = H.copy()
    H3[1], H3[2] = -H3[0], 0.0  # group 0 sums to exactly zero
    comp3 = compose(H3[None], spec)
    np.testing.assert_array_equal(comp3.bound[0, 1], np.zeros(12))


def test_edgeless_equals_nbundle(rng):
    spec = grouped_spec(8, 4)
    H = rng.standard_normal((8, 10))
    groups = np.stack([group_hv(H, spec, k) for k in range(4)])
    np.testing.assert_allclose(compose_sample(H, spec), nbundle(groups), atol=1e-15)


def test_spec_file_roundtrip(tmp_path):
    doc = {"groups": [{"name": "process", "parameters": ["p", "v"]},
                      {"name": "structure", "parameters": ["pore"]}],
           "edges": [["process", "structure"]]}
    path = tmp_path / "g.json"
    path.write_text(json.dumps(doc))
    spec = load_graph_spec(path, columns=["pore", "p", "v"])
    assert spec.groups[0].parameters == (1, 2)
    assert spec.edges == ((0, 1),)
    assert spec.to_dict() == doc
    with pytest.raises(GraphSpecError, match="unknown column"):
        load_graph_spec(path, columns=["p", "v"])
