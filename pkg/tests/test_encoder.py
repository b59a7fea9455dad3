import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from graphhdc.encoder import (encode_parameter, encode_parameters, fit_scaler, init_embeddings,
                              scale, scale_value)
from graphhdc.errors import DataError
from graphhdc.hdc import RandomBasis

import oracles

column = arrays(np.float64, st.integers(2, 12),
                elements=st.floats(-1e4, 1e4, allow_nan=False, allow_infinity=False))


def test_fit_scaler_train_rows_only():
    X = np.array([[1.0], [5.0], [3.0], [100.0]])
    stats = fit_scaler(X, [0, 1, 2])
    assert (stats.x_min[0], stats.x_max[0]) == (1.0, 5.0)
    single = fit_scaler(X, [2])
    assert single.x_min[0] == single.x_max[0] == 3.0


def test_fit_scaler_errors():
    with pytest.raises(DataError):
        fit_scaler(np.ones((3, 2)), [])
    with pytest.raises(DataError):
        fit_scaler(np.ones((3, 2)), [0], epsilon=0.0)


def test_constant_column_warns_and_maps_to_minus_one():
    X = np.full((3, 1), 7.0)
    with pytest.warns(UserWarning, match="constant"):
        stats = fit_scaler(X, [0, 1, 2])
    assert scale(X, stats)[0, 0] == -1.0


def test_scale_boundaries():
    stats = fit_scaler(np.array([[0.0], [10.0]]), [0, 1])
    assert scale_value(0.0, stats, 0) == -1.0
    assert scale_value(1e9, stats, 0) == 1.0
    assert scale_value(-1e9, stats, 0) == -1.0
    assert abs(scale_value(5.0, stats, 0)) <= 1.0001 * 1e-8 / 10
    # +1 is not reachable inside the range because of epsilon
    assert scale_value(10.0, stats, 0) < 1.0


@given(column, st.floats(-2e4, 2e4), st.floats(-2e4, 2e4))
def test_scale_monotone_and_matches_oracle(col, a, b):
    stats = fit_scaler(col[:, None], np.arange(len(col)))
    lo, hi = sorted((a, b))
    assert scale_value(lo, stats, 0) <= scale_value(hi, stats, 0)
    ref = oracles.scaled(a, stats.x_min[0], stats.x_max[0])
    assert scale_value(a, stats, 0) == pytest.approx(ref, abs=1e-12)


def test_leakage_guard():
    X = np.array([[0.0], [1.0], [2.0], [10.0]])
    train, test = [0, 1, 2], [3]
    honest = scale(X, fit_scaler(X, train))
    leaky = scale(X, fit_scaler(X, train + test))
    assert honest[3, 0] == 1.0
    assert not np.allclose(honest[train], leaky[train])


def test_encode_parameter_zero_and_odd():
    basis = RandomBasis.generate(0, 6, 40)
    e = init_embeddings(1, 6, 0)[0]
    np.testing.assert_array_equal(encode_parameter(0.0, e, basis), np.zeros(40))
    for t in (0.1, 0.5, 1.0):
        assert np.array_equal(encode_parameter(-t, e, basis), -encode_parameter(t, e, basis))


def test_encode_parameter_fixture():
    rows = np.zeros((2, 4))
    rows[0, 0] = rows[1, 1] = 1.0
    basis = RandomBasis(rows=rows, seed=0, d=2, D=4)
    out = encode_parameter(1.0, np.array([1.0, 0.0]), basis)
    np.testing.assert_allclose(out, [np.tanh(1.0), 0, 0, 0], atol=1e-15)


def test_saturation_outside_train_range():
    X = np.array([[0.0], [4.0], [9.0], [-3.0]])
    stats = fit_scaler(X, [0, 1])
    basis = RandomBasis.generate(1, 3, 16)
    emb = init_embeddings(1, 3, 1)
    H = encode_parameters(scale(X, stats), emb, basis)
    # 9 saturates to the +1 clip, -3 to the same vector as the minimum
    np.testing.assert_array_equal(H[2, 0], encode_parameter(1.0, emb[0], basis))
    np.testing.assert_array_equal(H[3], H[0])


def test_batched_encoding_matches_per_cell(rng):
    basis = RandomBasis.generate(2, 5, 33)
    emb = init_embeddings(4, 5, 2)
    Xs = rng.uniform(-1, 1, (3, 4))
    H = encode_parameters(Xs, emb, basis)
    ref = np.tanh(np.einsum("ij,jk,kD->ijD", Xs, emb, basis.rows))
    np.testing.assert_allclose(H, ref, atol=1e-14)
    for i in range(3):
        for j in range(4):
            np.testing.assert_allclose(H[i, j], encode_parameter(Xs[i, j], emb[j], basis),
                                       atol=1e-14)


def test_embedding_init_scale_and_seed():
    a = init_embeddings(200, 32, 5)
    assert a.shape == (200, 32)
    assert np.array_equal(a, init_embeddings(200, 32, 5))
    assert abs(a.std() - 1 / np.sqrt(32)) < 0.01
