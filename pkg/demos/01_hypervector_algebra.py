"""
Hypervector algebra
===================

Binding, bundling and similarity on dense real hypervectors, plus the
fixed random basis and the trainable scalar encoder built on top of it.
"""
import numpy as np

from graphhdc.encoder import encode_parameter, fit_scaler, init_embeddings, scale
from graphhdc.hdc import (RandomBasis, bind, cosine_sim, make_rng, nbundle, normalize,
                          random_bipolar)

rng = make_rng(0)
D = 5000

# %%
# Random hypervectors are nearly orthogonal: the cosine between two
# independent bipolar vectors concentrates around 0 with spread 1/sqrt(D).
sims = np.array([cosine_sim(random_bipolar(rng, D), random_bipolar(rng, D)) for _ in range(1000)])
print(f"mean |cos| = {np.abs(sims).mean():.4f}, std = {sims.std():.4f}, "
      f"1/sqrt(D) = {1 / np.sqrt(D):.4f}")

# %%
# Bundling keeps the members recognizable; binding produces a vector that
# resembles neither factor.
a, b, c = (random_bipolar(rng, D) for _ in range(3))
bundle = nbundle([a, b])
bound = bind(a, b)
print(f"cos(a+b, a) = {cosine_sim(bundle, a):.3f}   cos(a+b, c) = {cosine_sim(bundle, c):+.3f}")
print(f"cos(a*b, a) = {cosine_sim(bound, a):+.3f}   cos(a*b, b) = {cosine_sim(bound, b):+.3f}")
# a bipolar vector is its own inverse under binding
print("unbinding recovers b exactly:", np.array_equal(bind(bound, a), b))

# %%
# For unit vectors the squared distance is a function of the cosine alone.
u, v = normalize(a), normalize(c)
print(f"|u-v|^2 = {np.sum((u - v) ** 2):.6f},  2(1-cos) = {2 * (1 - cosine_sim(u, v)):.6f}")

# %%
# The scalar encoder: a column is min-max scaled to [-1, 1] with statistics
# from the training rows only, then x * e_j is projected through a fixed
# basis and squashed with tanh.  The encoding is odd in the scaled value,
# so the midpoint of the training range maps to the zero vector.
basis = RandomBasis.generate(seed=0, d=8, D=D)
emb = init_embeddings(n_parameters=1, d=8, seed=0)
train_column = np.array([[2.0], [4.0], [6.0], [10.0]])
stats = fit_scaler(train_column, np.arange(4))
for x in (2.0, 6.0, 10.0, 25.0):
    xs = scale(np.array([[x]]), stats)[0, 0]
    h = encode_parameter(xs, emb[0], basis)
    print(f"x = {x:5.1f} -> scaled {xs:+.3f}, |h| = {np.linalg.norm(h):7.3f}")
# 25 lies outside the training range and saturates to the same vector as 10
