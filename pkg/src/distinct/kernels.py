"""Kernel functions, bandwidth selection, and pooled Gram precomputation.

All kernel arithmetic runs in float64 regardless of input precision;
O(n^2) accumulations in float32 lose too many digits to be trusted in
a forensic report.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateBandwidthError, GramBudgetExceeded

__all__ = [
    "KernelSpec",
    "KernelMatrix",
    "median_heuristic_sigma",
    "kernel_value",
    "gram_matrix",
    "precompute_gram",
    "resolve_sigma",
]

GRAM_BUDGET_ENV = "DISTINCT_GRAM_BUDGET_MB"
_DEFAULT_BUDGET_MB = 1024.0


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family plus bandwidth policy.

    family: "rbf" or "linear". bandwidth_rule: "median_heuristic" (sigma
    re-estimated from the pooled sample per comparison), "fixed" (use
    bandwidth_sigma as-is), or "scaled_median" (median heuristic times
    scale_multiplier). Linear kernels ignore the bandwidth entirely.
    """

    family: str = "rbf"
    bandwidth_sigma: float | None = None
    bandwidth_rule: str = "median_heuristic"
    scale_multiplier: float = 1.0

    def __post_init__(self):
        if self.family not in ("rbf", "linear"):
            raise ValueError(f"unknown kernel family {self.family!r}")
        if self.bandwidth_rule not in ("median_heuristic", "fixed", "scaled_median"):
            raise ValueError(f"unknown bandwidth rule {self.bandwidth_rule!r}")
        if self.family == "rbf" and self.bandwidth_rule == "fixed":
            if self.bandwidth_sigma is None or self.bandwidth_sigma <= 0:
                raise ValueError("fixed rbf bandwidth requires bandwidth_sigma > 0")
        if self.bandwidth_rule == "scaled_median":
            if not (np.isfinite(self.scale_multiplier) and self.scale_multiplier > 0):
                raise ValueError("scaled_median multiplier must be finite and positive")


@dataclass(frozen=True)
class KernelMatrix:
    """Precomputed symmetric Gram matrix over a pooled (m + n)-sample."""

    values: np.ndarray
    sizes: tuple
    spec: KernelSpec
    sigma: float | None = None


def median_heuristic_sigma(pooled) -> float:
    """Median of all pairwise Euclidean distances over unordered pairs.

    Even pair counts average the two middle order statistics. A zero
    median (all points identical) is a hard error: silently substituting
    a bandwidth would make results irreproducible.
    """
    pts = np.asarray(pooled, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    n = pts.shape[0]
    if n < 2:
        raise ValueError("median heuristic needs at least 2 vectors")
    dists = []
    # exact coordinate differences, chunked; the norm-expansion shortcut
    # cancels catastrophically for near-identical points
    chunk = max(1, int(4e6 // max(1, n * pts.shape[1])))
    for start in range(0, n, chunk):
        block = pts[start : start + chunk, None, :] - pts[None, :, :]
        sq_block = np.einsum("ijk,ijk->ij", block, block)
        for row_offset, row in enumerate(sq_block):
            i = start + row_offset
            if i + 1 < n:
                dists.append(np.sqrt(row[i + 1 :]))
    sigma = float(np.median(np.concatenate(dists)))
    if sigma <= 0.0:
        raise DegenerateBandwidthError("median pairwise distance is zero")
    return sigma


def resolve_sigma(spec: KernelSpec, pooled) -> float | None:
    """Concrete sigma for a comparison, or None for linear kernels."""
    if spec.family == "linear":
        return None
    if spec.bandwidth_rule == "fixed":
        return float(spec.bandwidth_sigma)
    sigma = median_heuristic_sigma(pooled)
    if spec.bandwidth_rule == "scaled_median":
        sigma *= spec.scale_multiplier
    return sigma


def kernel_value(spec: KernelSpec, x, y, sigma: float | None = None) -> float:
    """Pointwise kernel evaluation (rbf needs a resolved sigma)."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")
    if spec.family == "linear":
        return float(x @ y)
    sigma = _required_sigma(spec, sigma)
    d2 = float(np.sum((x - y) ** 2))
    return float(np.exp(-d2 / (2.0 * sigma * sigma)))


def gram_matrix(spec: KernelSpec, pooled, sigma: float | None = None) -> np.ndarray:
    """Dense Gram matrix, float64, exactly symmetric."""
    pts = np.asarray(pooled, dtype=np.float64)
    if spec.family == "linear":
        k = pts @ pts.T
    else:
        sigma = _required_sigma(spec, sigma)
        sq = _pairwise_sqdist(pts)
        k = np.exp(-sq / (2.0 * sigma * sigma))
    # squared-distance shortcut can leave ~1ulp asymmetry; force exact symmetry
    return np.triu(k) + np.triu(k, k=1).T


def precompute_gram(spec: KernelSpec, pooled, sizes, sigma: float | None = None,
                    budget_mb: float | None = None) -> KernelMatrix:
    """Full pooled Gram matrix, or GramBudgetExceeded telling the caller
    to fall back to on-the-fly evaluation."""
    pts = np.asarray(pooled, dtype=np.float64)
    m, n = sizes
    if pts.shape[0] != m + n:
        raise ValueError(f"pooled length {pts.shape[0]} != m+n = {m + n}")
    if budget_mb is None:
        budget_mb = float(os.environ.get(GRAM_BUDGET_ENV, _DEFAULT_BUDGET_MB))
    needed_mb = (m + n) ** 2 * 8 / 1e6
    if needed_mb > budget_mb:
        raise GramBudgetExceeded(needed_mb, budget_mb)
    if spec.family == "rbf":
        sigma = _required_sigma(spec, sigma)
    return KernelMatrix(values=gram_matrix(spec, pts, sigma), sizes=(m, n),
                        spec=spec, sigma=sigma)


def _required_sigma(spec: KernelSpec, sigma: float | None) -> float:
    if sigma is None:
        if spec.bandwidth_rule == "fixed":
            return float(spec.bandwidth_sigma)
        raise ValueError("rbf kernel needs a resolved sigma; call resolve_sigma first")
    if sigma <= 0:
        raise DegenerateBandwidthError(f"sigma={sigma} is not positive")
    return float(sigma)


def _pairwise_sqdist(pts: np.ndarray) -> np.ndarray:
    """Squared Euclidean distances, clipped at 0 against cancellation."""
    norms = np.einsum("ij,ij->i", pts, pts)
    sq = norms[:, None] + norms[None, :] - 2.0 * (pts @ pts.T)
    np.maximum(sq, 0.0, out=sq)
    np.fill_diagonal(sq, 0.0)
    return sq
