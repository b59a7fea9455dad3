"""Real-valued hypervector algebra.

Hypervectors are plain float64 numpy arrays. Functions that take a single
hypervector also accept stacks (``(..., D)``) where that is natural; the
last axis is always the hypervector axis.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DimensionError, EmptyAggregateError

#: RNG algorithm recorded in configs and checkpoints.
RNG_NAME = "philox4x64-10"

# Philox key word used to separate independent random streams of one seed.
STREAM_BASIS = 0
STREAM_EMBEDDINGS = 1
STREAM_SPLITS = 2
STREAM_SYNTHETIC = 3


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator keyed by ``(seed, stream)``.

    The Philox key is the pair itself (no seed hashing), so the raw bit
    stream is reproducible by any Philox4x64-10 implementation.
    """
    key = np.array([int(seed) & 0xFFFFFFFFFFFFFFFF, int(stream) & 0xFFFFFFFFFFFFFFFF],
                   dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def normalize(v: np.ndarray) -> np.ndarray:
    """``v / ||v||`` along the last axis; zero vectors stay zero."""
    v = np.asarray(v, dtype=np.float64)
    norm = np.linalg.norm(v, axis=-1, keepdims=True)
    safe = np.where(norm > 0.0, norm, 1.0)
    return np.where(norm > 0.0, v / safe, 0.0)


def _check_same_length(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape[-1] != b.shape[-1]:
        raise DimensionError(
            f"hypervector length mismatch: {a.shape[-1]} vs {b.shape[-1]}")


def bind(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Hadamard product."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    _check_same_length(a, b)
    return a * b


def bundle(vectors) -> np.ndarray:
    """Elementwise sum of a nonempty collection of hypervectors."""
    stack = _as_stack(vectors)
    return stack.sum(axis=0)


def nbundle(vectors) -> np.ndarray:
    return normalize(bundle(vectors))


def _as_stack(vectors) -> np.ndarray:
    if isinstance(vectors, np.ndarray):
        stack = np.asarray(vectors, dtype=np.float64)
        if stack.ndim == 1:
            raise DimensionError("expected a stack of hypervectors, got one vector")
    else:
        vectors = list(vectors)
        if not vectors:
            raise EmptyAggregateError("cannot bundle an empty set of hypervectors")
        lengths = {np.shape(v)[-1] for v in vectors}
        if len(lengths) != 1:
            raise DimensionError(f"hypervector lengths differ: {sorted(lengths)}")
        stack = np.stack([np.asarray(v, dtype=np.float64) for v in vectors])
    if stack.shape[0] == 0:
        raise EmptyAggregateError("cannot bundle an empty set of hypervectors")
    return stack


def cosine_sim_flagged(h1: np.ndarray, h2: np.ndarray) -> tuple[float, bool]:
    """Cosine similarity plus a degeneracy flag.

    Returns ``(0.0, True)`` when either argument is the zero vector.
    """
    h1 = np.asarray(h1, dtype=np.float64)
    h2 = np.asarray(h2, dtype=np.float64)
    _check_same_length(h1, h2)
    n1 = np.linalg.norm(h1)
    n2 = np.linalg.norm(h2)
    if n1 == 0.0 or n2 == 0.0:
        return 0.0, True
    value = float(h1 @ h2) / (n1 * n2)
    # rounding can push |value| a hair past 1
    return min(1.0, max(-1.0, value)), False


def cosine_sim(h1: np.ndarray, h2: np.ndarray) -> float:
    return cosine_sim_flagged(h1, h2)[0]


def cosine_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise cosine similarities between rows of ``a`` and rows of ``b``.

    Zero rows produce zero similarities. Equal rows give bitwise-equal
    similarities, which keeps lowest-index tie-breaking exact.
    """
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    b = np.atleast_2d(np.asarray(b, dtype=np.float64))
    _check_same_length(a, b)
    sims = _kernels.row_dots(np.ascontiguousarray(normalize(a)),
                             np.ascontiguousarray(normalize(b)))
    return np.clip(sims, -1.0, 1.0)


@dataclass(frozen=True)
class RandomBasis:
    """Fixed ``d x D`` matrix of unit-norm random base hypervectors."""

    rows: np.ndarray = field(repr=False)
    seed: int
    d: int
    D: int

    @classmethod
    def generate(cls, seed: int, d: int, D: int) -> "RandomBasis":
        if d < 1 or D < 1:
            raise DimensionError(f"basis needs d >= 1 and D >= 1, got d={d}, D={D}")
        rng = make_rng(seed, STREAM_BASIS)
        rows = rng.standard_normal((d, D))
        rows /= np.linalg.norm(rows, axis=1, keepdims=True)
        rows.setflags(write=False)
        return cls(rows=rows, seed=int(seed), d=int(d), D=int(D))

    def fingerprint(self) -> str:
        return hashlib.sha256(np.ascontiguousarray(self.rows).tobytes()).hexdigest()

    def describe(self) -> dict:
        return {"seed": self.seed, "d": self.d, "D": self.D, "rng": RNG_NAME,
                "sha256": self.fingerprint()}


def random_projection_encode(z: np.ndarray, basis: RandomBasis | np.ndarray) -> np.ndarray:
    """Non-adaptive encoder ``tanh(z^T B)``."""
    rows = basis.rows if isinstance(basis, RandomBasis) else np.asarray(basis, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    if z.shape[-1] != rows.shape[0]:
        raise DimensionError(
            f"input has {z.shape[-1]} components but the basis has {rows.shape[0]} rows")
    return np.tanh(z @ rows)


def random_bipolar(rng: np.random.Generator, size) -> np.ndarray:
    return rng.choice(np.array([-1.0, 1.0]), size=size)
