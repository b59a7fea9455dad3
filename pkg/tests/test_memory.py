import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from graphhdc.errors import DataError, EmptyClassError
from graphhdc.graph import GraphSpec, Group
from graphhdc.hdc import normalize
from graphhdc.memory import (PrototypeMemory, build_component_memories, build_prototypes,
                             predict, retrain_step, retrieve)

import oracles


def test_one_sample_per_class(rng):
    H = rng.standard_normal((2, 10))
    mem = build_prototypes(H, [0, 1])
    np.testing.assert_allclose(mem.prototypes, normalize(H), atol=1e-15)


def test_cancelling_class_is_degenerate(rng):
    u = rng.standard_normal(10)
    mem = build_prototypes(np.stack([u, -u, u]), [0, 0, 1])
    assert mem.degenerate.tolist() == [True, False]


def test_empty_class_names_the_class(rng):
    with pytest.raises(EmptyClassError, match="'beta'"):
        build_prototypes(rng.standard_normal((3, 4)), [0, 0, 0], n_classes=2,
                         class_names=("alpha", "beta"))
    with pytest.raises(DataError):
        build_prototypes(rng.standard_normal((3, 4)), [0, 0, 0], n_classes=1)


def test_six_sample_oracle_and_train_idx(rng):
    H = rng.standard_normal((6, 8))
    y = np.array([0, 1, 0, 1, 1, 0])
    mem = build_prototypes(H, y)
    for c in range(2):
        np.testing.assert_allclose(mem.prototypes[c], oracles.unit(H[y == c].sum(axis=0)),
                                   atol=1e-12)
    sub = build_prototypes(H, y, train_idx=[0, 1, 2, 3])
    np.testing.assert_allclose(sub.prototypes[1], oracles.unit(H[1] + H[3]), atol=1e-12)


def test_retrieve_cases(rng):
    m = normalize(rng.standard_normal((2, 16)))
    mem = PrototypeMemory(m, np.array([1, 1]))
    r = retrieve(m[0], mem)
    assert r.label == 0 and r.similarities[0] == pytest.approx(1.0, abs=1e-12)
    e = np.eye(4)
    tie = retrieve(e[0] + e[1], PrototypeMemory(e[:2], np.array([1, 1])))
    assert tie.label == 0 and tie.margin == 0.0
    zero = retrieve(np.zeros(16), mem)
    assert zero.degenerate and zero.label == 0 and zero.margin == 0.0


@given(st.integers(0, 2 ** 31), st.floats(1e-3, 1e3))
def test_retrieve_scale_invariant_and_matches_oracle(seed, alpha):
    g = np.random.default_rng(seed)
    mem = PrototypeMemory(normalize(g.standard_normal((3, 12))), np.ones(3))
    h = g.standard_normal(12)
    r1, r2 = retrieve(h, mem), retrieve(alpha * h, mem)
    assert r1.label == r2.label
    assert r1.margin == pytest.approx(r2.margin, abs=1e-12)
    sims = [oracles.cosine(h.tolist(), m.tolist()) for m in mem.prototypes]
    assert r1.label == oracles.argmax_lowest(sims)


def test_two_class_margin_sign(rng):
    mem = PrototypeMemory(normalize(rng.standard_normal((2, 20))), np.ones(2))
    h = normalize(rng.standard_normal(20))
    r = retrieve(h, mem)
    diff = h @ mem.prototypes[0] - h @ mem.prototypes[1]
    assert abs(r.margin) == pytest.approx(abs(diff), abs=1e-12)
    assert r.label == (0 if diff >= 0 else 1)


@given(st.integers(0, 2 ** 31))
def test_prototypes_permutation_invariant(seed):
    g = np.random.default_rng(seed)
    H = g.standard_normal((9, 7))
    y = np.array([0, 1, 2] * 3)
    perm = g.permutation(9)
    a = build_prototypes(H, y).prototypes
    b = build_prototypes(H[perm], y[perm]).prototypes
    np.testing.assert_allclose(a, b, atol=1e-12)


def test_retrain_step(rng):
    e = np.eye(4)
    mem = PrototypeMemory(e[:2].copy(), np.ones(2))
    out = retrain_step(mem, e[2], 0, 1, 1.0)
    np.testing.assert_allclose(out.prototypes[0], (e[0] + e[2]) / np.sqrt(2), atol=1e-15)
    with pytest.raises(ValueError):
        retrain_step(mem, e[2], 0, 1, 0.0)
    h = normalize(rng.standard_normal(4))
    sims = []
    for _ in range(200):
        mem = retrain_step(mem, h, 0, 1, 0.5)
        sims.append(mem.prototypes[0] @ h)
    sims = np.array(sims)
    reached = int(np.argmax(sims >= 1 - 1e-9))
    assert sims[reached] >= 1 - 1e-9
    assert np.all(np.diff(sims[:reached + 1]) > 0)


def test_component_memories(rng):
    P_hv = rng.standard_normal((5, 3, 8))
    G_hv = rng.standard_normal((5, 1, 8))
    y = np.array([0, 1, 0, 1, 1])
    bank = build_component_memories(P_hv, G_hv, y)
    assert bank.parameters.shape == (2, 3, 8) and bank.groups.shape == (2, 1, 8)
    for c in range(2):
        for j in range(3):
            np.testing.assert_allclose(bank.parameters[c, j],
                                       oracles.unit(P_hv[y == c, j].sum(axis=0)), atol=1e-12)


def test_single_group_memories_equal_prototypes(rng):
    from graphhdc.graph import compose

    spec = GraphSpec((Group("all", range(4)),))
    H = rng.standard_normal((6, 4, 10))
    y = np.array([0, 0, 0, 1, 1, 1])
    comp = compose(H, spec)
    bank = build_component_memories(H, comp.groups, y)
    np.testing.assert_allclose(bank.groups[:, 0], build_prototypes(comp.samples, y).prototypes,
                               atol=1e-12)
    assert predict(comp.samples, build_prototypes(comp.samples, y)).shape == (6,)


@pytest.mark.parametrize("D", [7, 256, 5001])
def test_duplicated_prototypes_tie_to_lowest_index(D):
    rng = np.random.default_rng(D)
    protos = normalize(rng.standard_normal((2, D)))
    stack = protos[[1, 0, 1, 0, 0]]
    memory = PrototypeMemory(stack, np.ones(5, dtype=int))
    for _ in range(20):
        r = retrieve(rng.standard_normal(D), memory)
        assert r.label in (0, 1)
        assert r.similarities[0] == r.similarities[2]
        assert r.similarities[1] == r.similarities[3] == r.similarities[4]
