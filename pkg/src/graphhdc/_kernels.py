"""Compiled loops for the training hot path.

They mirror :func:`graphhdc.graph.compose` and its reverse pass but avoid
materializing intermediates; the numpy versions stay the reference.
Predecessor lists are passed in CSR form (``pred_ptr``, ``pred_idx``).
"""
import math

import numba
import numpy as np


@numba.njit(cache=True)
def row_dots(a, b):
    """``a @ b.T`` with each dot product summed strictly left to right.

    Unlike BLAS, the result for a pair of rows does not depend on where the
    rows sit in their matrices, so identical rows give bitwise-equal values.
    """
    n, D = a.shape
    m = b.shape[0]
    out = np.empty((n, m))
    for i in range(n):
        for k in range(m):
            acc = 0.0
            for t in range(D):
                acc += a[i, t] * b[k, t]
            out[i, k] = acc
    return out


@numba.njit(cache=True)
def scaled_rows(X, W, out):
    """``out[i, j] = X[i, j] * W[j]``; faster than the broadcast multiply."""
    n, P = X.shape
    D = W.shape[1]
    for i in range(n):
        for j in range(P):
            a = X[i, j]
            for t in range(D):
                out[i, j, t] = a * W[j, t]
    return out


@numba.njit(cache=True)
def group_sums(H, group_of, K, out):
    n, P, D = H.shape
    out[:] = 0.0
    for i in range(n):
        for j in range(P):
            k = group_of[j]
            for t in range(D):
                out[i, k, t] += H[i, j, t]
    return out


@numba.njit(cache=True)
def compose_forward(H, group_of, pred_ptr, pred_idx, groups, group_norms, samples,
                    sample_norms):
    """Fill normalized groups ``(n, K, D)`` and samples ``(n, D)``."""
    n, P, D = H.shape
    K = groups.shape[1]
    bound = np.empty(D)
    for i in range(n):
        groups[i] = 0.0
        for j in range(P):
            k = group_of[j]
            for t in range(D):
                groups[i, k, t] += H[i, j, t]
        for k in range(K):
            acc = 0.0
            for t in range(D):
                acc += groups[i, k, t] * groups[i, k, t]
            norm = math.sqrt(acc)
            group_norms[i, k] = norm
            if norm > 0.0:
                for t in range(D):
                    groups[i, k, t] /= norm
        samples[i] = 0.0
        for k in range(K):
            for t in range(D):
                bound[t] = groups[i, k, t]
            for p in range(pred_ptr[k], pred_ptr[k + 1]):
                u = pred_idx[p]
                for t in range(D):
                    bound[t] *= groups[i, u, t]
            for t in range(D):
                samples[i, t] += bound[t]
        acc = 0.0
        for t in range(D):
            acc += samples[i, t] * samples[i, t]
        norm = math.sqrt(acc)
        sample_norms[i] = norm
        if norm > 0.0:
            for t in range(D):
                samples[i, t] /= norm


@numba.njit(cache=True)
def compose_backward(grad_sums, groups, group_norms, pred_ptr, pred_idx):
    """Gradient w.r.t. the raw group sums given the gradient w.r.t. the
    unnormalized sample sums ``grad_sums`` ``(n, D)``."""
    n, K, D = groups.shape
    out = np.zeros((n, K, D))
    partial = np.empty(D)
    for i in range(n):
        for k in range(K):
            n_factors = 1 + pred_ptr[k + 1] - pred_ptr[k]
            for a in range(n_factors):
                f = k if a == 0 else pred_idx[pred_ptr[k] + a - 1]
                for t in range(D):
                    partial[t] = grad_sums[i, t]
                for b in range(n_factors):
                    if b == a:
                        continue
                    g = k if b == 0 else pred_idx[pred_ptr[k] + b - 1]
                    for t in range(D):
                        partial[t] *= groups[i, g, t]
                for t in range(D):
                    out[i, f, t] += partial[t]
        for k in range(K):
            norm = group_norms[i, k]
            if norm == 0.0:
                for t in range(D):
                    out[i, k, t] = 0.0
                continue
            radial = 0.0
            for t in range(D):
                radial += groups[i, k, t] * out[i, k, t]
            for t in range(D):
                out[i, k, t] = (out[i, k, t] - groups[i, k, t] * radial) / norm
    return out


@numba.njit(cache=True)
def projection_grad(H, X_scaled, grad_groups, group_of):
    """Gradient w.r.t. the projected embeddings ``e_j^T B``, shape ``(P, D)``.

    ``sum_i x_ij * (1 - H_ij^2) * grad_groups[i, group(j)]``
    """
    n, P, D = H.shape
    out = np.zeros((P, D))
    for i in range(n):
        for j in range(P):
            a = X_scaled[i, j]
            if a == 0.0:
                continue
            k = group_of[j]
            for t in range(D):
                h = H[i, j, t]
                out[j, t] += a * (1.0 - h * h) * grad_groups[i, k, t]
    return out
