"""Unbiased squared-MMD estimation, from raw vectors or a pooled Gram matrix.

The estimator is the standard three-term U-statistic: within-group means
exclude the diagonal, the cross term uses all m*n pairs. It can be
negative in finite samples; negative values are returned untouched
(clamping, if any, is a rendering concern).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernels import KernelMatrix, KernelSpec, gram_matrix, resolve_sigma

__all__ = ["MmdEstimate", "mmd_squared_unbiased", "mmd_from_gram", "mmd_from_gram_value"]


@dataclass(frozen=True)
class MmdEstimate:
    value: float
    m: int
    n: int
    spec: KernelSpec
    sigma: float | None = None


def mmd_squared_unbiased(x, y, spec: KernelSpec, sigma: float | None = None) -> MmdEstimate:
    """Unbiased squared MMD between samples x (m >= 2) and y (n >= 2)."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if y.ndim == 1:
        y = y[:, None]
    m, n = x.shape[0], y.shape[0]
    if m < 2 or n < 2:
        raise ValueError(f"need m,n >= 2, got m={m}, n={n}")
    if x.shape[1] != y.shape[1]:
        raise ValueError(f"dimension mismatch: {x.shape[1]} vs {y.shape[1]}")
    # canonical argument order makes MMD^2_u(X, Y) == MMD^2_u(Y, X) bit-exact:
    # the estimator is symmetric, but BLAS results depend on operand layout
    a, b, ma = x, y, m
    if (y.shape, y.tobytes()) < (x.shape, x.tobytes()):
        a, b, ma = y, x, n
    pooled = np.vstack([a, b])
    if spec.family == "rbf" and sigma is None:
        sigma = resolve_sigma(spec, pooled)
    k = gram_matrix(spec, pooled, sigma)
    value = mmd_from_gram_value(k, np.arange(ma), np.arange(ma, m + n))
    return MmdEstimate(value=value, m=m, n=n, spec=spec, sigma=sigma)


def mmd_from_gram_value(k: np.ndarray, idx_x, idx_y) -> float:
    """Unbiased squared MMD read off a precomputed Gram matrix."""
    idx_x = np.asarray(idx_x)
    idx_y = np.asarray(idx_y)
    m, n = len(idx_x), len(idx_y)
    kxx = k[np.ix_(idx_x, idx_x)]
    kyy = k[np.ix_(idx_y, idx_y)]
    kxy = k[np.ix_(idx_x, idx_y)]
    term_x = (kxx.sum() - np.trace(kxx)) / (m * (m - 1))
    term_y = (kyy.sum() - np.trace(kyy)) / (n * (n - 1))
    term_xy = 2.0 * kxy.sum() / (m * n)
    return float(term_x + term_y - term_xy)


def mmd_from_gram(g: KernelMatrix, idx_x, idx_y) -> MmdEstimate:
    """Gram-backed estimate; identical to mmd_squared_unbiased on the
    corresponding vectors."""
    idx_x = np.asarray(idx_x)
    idx_y = np.asarray(idx_y)
    m, n = len(idx_x), len(idx_y)
    if m < 2 or n < 2:
        raise ValueError(f"need m,n >= 2, got m={m}, n={n}")
    size = g.values.shape[0]
    all_idx = np.concatenate([idx_x, idx_y])
    if all_idx.min(initial=0) < 0 or all_idx.max(initial=-1) >= size:
        raise IndexError(f"index out of range for {size}x{size} Gram matrix")
    if len(np.intersect1d(idx_x, idx_y)) > 0:
        raise ValueError("idx_x and idx_y overlap")
    value = mmd_from_gram_value(g.values, idx_x, idx_y)
    return MmdEstimate(value=value, m=m, n=n, spec=g.spec, sigma=g.sigma)
