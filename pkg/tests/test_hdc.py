import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from graphhdc.errors import DimensionError, EmptyAggregateError
from graphhdc.hdc import (RandomBasis, bind, bundle, cosine_matrix, cosine_sim,
                          cosine_sim_flagged, make_rng, nbundle, normalize,
                          random_bipolar, random_projection_encode)

import oracles

finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


def vectors(n=16):
    return arrays(np.float64, (n,), elements=finite)


def test_normalize_zero_branch():
    z = np.zeros(10)
    out = normalize(z)
    assert np.array_equal(out, z)


def test_normalize_pythagorean():
    v = np.zeros(6)
    v[:2] = [3.0, 4.0]
    np.testing.assert_allclose(normalize(v)[:2], [0.6, 0.8], atol=1e-15)


@given(vectors())
def test_normalize_idempotent_and_unit(v):
    once = normalize(v)
    n = np.linalg.norm(once)
    assert n == 0.0 or abs(n - 1.0) < 1e-12
    np.testing.assert_allclose(normalize(once), once, atol=1e-12)


def test_bind_definition_and_identity():
    np.testing.assert_array_equal(bind(np.array([1.0, 2.0]), np.array([3.0, -4.0])), [3.0, -8.0])
    a = random_bipolar(make_rng(1), 32)
    np.testing.assert_array_equal(bind(a, a), np.ones(32))
    np.testing.assert_array_equal(bind(a, np.ones(32)), a)


def test_bind_length_mismatch():
    with pytest.raises(DimensionError):
        bind(np.ones(3), np.ones(4))


@given(vectors(8), vectors(8), vectors(8))
def test_bind_commutes_and_associates(a, b, c):
    assert np.array_equal(bind(a, b), bind(b, a))
    lhs, rhs = bind(bind(a, b), c), bind(a, bind(b, c))
    np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-300)


def test_bundle_cases():
    u = np.arange(1.0, 6.0)
    np.testing.assert_array_equal(bundle([u, -u]), np.zeros(5))
    np.testing.assert_array_equal(nbundle([u, -u]), np.zeros(5))
    np.testing.assert_array_equal(bundle([u]), u)
    e1, e2 = np.eye(4)[0], np.eye(4)[1]
    np.testing.assert_allclose(nbundle([e1, e2]), [2 ** -0.5, 2 ** -0.5, 0, 0], atol=1e-15)
    with pytest.raises(EmptyAggregateError):
        bundle([])


def test_cosine_sim_basics(rng):
    h = rng.standard_normal(50)
    assert cosine_sim(h, h) == pytest.approx(1.0, abs=1e-15)
    assert cosine_sim(h, -h) == pytest.approx(-1.0, abs=1e-15)
    assert cosine_sim_flagged(h, np.zeros(50)) == (0.0, True)
    assert cosine_sim_flagged(h, h)[1] is False


@given(vectors(12), vectors(12))
def test_cosine_matches_oracle_and_bounds(a, b):
    s = cosine_sim(a, b)
    assert -1.0 <= s <= 1.0
    ref = oracles.cosine(a.tolist(), b.tolist())
    assert s == pytest.approx(max(-1.0, min(1.0, ref)), abs=1e-9)


@given(vectors(12), vectors(12))
def test_unit_distance_identity(a, b):
    ua, ub = normalize(a), normalize(b)
    if not ua.any() or not ub.any():
        return
    lhs = np.sum((ua - ub) ** 2)
    assert lhs == pytest.approx(2 * (1 - cosine_sim(ua, ub)), abs=1e-9)


def test_cosine_matrix_zero_rows(rng):
    a = rng.standard_normal((3, 7))
    a[1] = 0
    m = cosine_matrix(a, rng.standard_normal((2, 7)))
    assert np.all(m[1] == 0)


def test_bipolar_quasi_orthogonality_probability():
    # Monte Carlo over 1e4 seeded pairs put P(|sim| < 0.1) at 1.0 (std 0.01413)
    rng = make_rng(7, 5)
    sims = np.array([cosine_sim(random_bipolar(rng, 5000), random_bipolar(rng, 5000))
                     for _ in range(2000)])
    assert np.mean(np.abs(sims) < 0.1) > 0.999


def test_basis_rows_unit_and_deterministic():
    b1 = RandomBasis.generate(11, 6, 300)
    b2 = RandomBasis.generate(11, 6, 300)
    np.testing.assert_allclose(np.linalg.norm(b1.rows, axis=1), 1.0, atol=1e-12)
    assert b1.rows.tobytes() == b2.rows.tobytes()
    assert b1.fingerprint() == b2.fingerprint()
    assert RandomBasis.generate(12, 6, 300).fingerprint() != b1.fingerprint()
    assert not b1.rows.flags.writeable


def test_projection_encode_cases():
    basis = RandomBasis.generate(3, 4, 64)
    np.testing.assert_array_equal(random_projection_encode(np.zeros(4), basis), np.zeros(64))
    huge = random_projection_encode(np.array([0, 1e6, 0, 0]), basis)
    np.testing.assert_array_equal(huge, np.sign(basis.rows[1]))
    with pytest.raises(DimensionError):
        random_projection_encode(np.zeros(3), basis)


def test_projection_encode_frozen_values():
    # per-element math.tanh of the seed-0, d=4, D=8 basis row 0
    expected = [0.047951802164334, -0.48880100697741824, 0.3796227084740387,
                0.3478143470528627, -0.011779656266933985, -0.15521307435963558,
                -0.3233522816227205, -0.48723847144396115]
    basis = RandomBasis.generate(0, 4, 8)
    out = random_projection_encode(np.array([1.0, 0, 0, 0]), basis)
    np.testing.assert_allclose(out, expected, rtol=0, atol=1e-15)
    np.testing.assert_allclose(out, [math.tanh(v) for v in basis.rows[0]], atol=1e-15)
