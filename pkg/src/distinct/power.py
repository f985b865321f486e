"""Monte-Carlo power estimation, pairwise MMD matrices, and bootstrap CIs.

Every trial is a fresh subsample plus a full permutation test, with its
own RNG stream keyed by (seed, pair, n, trial), so trials parallelize
without changing any number. Same-group comparisons always use disjoint
draws (negative controls); diagonal cells of the pairwise matrix are
split-half tests.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ._util import derive_subseed, parallel_map
from .kernels import KernelSpec, resolve_sigma, gram_matrix
from .mmd import mmd_from_gram_value, mmd_squared_unbiased
from .permutation import TestConfig, TestResult, permutation_test
from .rng import derive_rng
from .store import GroupedDataset, split_half, subsample

__all__ = [
    "PowerCurve",
    "MmdMatrix",
    "BootstrapCi",
    "rejection_rate_curve",
    "mmd_matrix",
    "threshold_sample_size",
    "bootstrap_ci",
]


@dataclass(frozen=True)
class PowerCurve:
    pair: tuple
    sample_sizes: list
    rates: list
    trials: int
    alpha: float
    seed: int


@dataclass(frozen=True)
class MmdMatrix:
    labels: list
    values: np.ndarray
    p_values: np.ndarray
    significant: np.ndarray
    alpha: float
    diagonal_mode: str = "split_half"


@dataclass(frozen=True)
class BootstrapCi:
    point: float
    lower: float
    upper: float
    level: float
    iterations: int
    median_replicate: float


def _trial_indices(ds: GroupedDataset, a: str, b: str, n: int, trial_seed: int):
    """Index draws for one trial; a == b means one disjoint 2n draw, split."""
    if a == b:
        if 2 * n > ds.group_size(a):
            raise ValueError(
                f"group {a!r} has {ds.group_size(a)} items; "
                f"disjoint same-group draws need 2n = {2 * n}"
            )
        both = subsample(ds, a, 2 * n, trial_seed)
        return both[:n], both[n:]
    return (
        subsample(ds, a, n, trial_seed),
        subsample(ds, b, n, derive_subseed(trial_seed, "second-group")),
    )


def rejection_rate_curve(
    ds: GroupedDataset,
    a: str,
    b: str,
    sizes,
    trials: int,
    spec: KernelSpec,
    cfg: TestConfig,
    workers: int = 1,
) -> PowerCurve:
    """Empirical power (rejection proportion) per sample size."""
    sizes = [int(n) for n in sizes]
    for n in sizes:
        if n < 2:
            raise ValueError("every sample size must be >= 2")

    def run_trial(args) -> bool:
        n, t = args
        trial_seed = derive_subseed(cfg.seed, "power", a, b, n, t)
        idx_a, idx_b = _trial_indices(ds, a, b, n, trial_seed)
        result = permutation_test(
            ds.table.vectors[idx_a],
            ds.table.vectors[idx_b],
            spec,
            replace(cfg, seed=trial_seed),
        )
        return result.reject

    rates = []
    for n in sizes:
        outcomes = parallel_map(run_trial, [(n, t) for t in range(trials)], workers)
        rates.append(sum(outcomes) / trials)
    return PowerCurve(
        pair=(a, b), sample_sizes=sizes, rates=rates,
        trials=trials, alpha=cfg.alpha, seed=cfg.seed,
    )


def _cell_test(ds: GroupedDataset, a: str, b: str, cap: int,
               spec: KernelSpec, cfg: TestConfig) -> TestResult:
    cell_seed = derive_subseed(cfg.seed, "matrix", a, b)
    if a == b:
        first, second = split_half(ds, a, cell_seed)
        first, second = first[:cap], second[:cap]
    else:
        k_a = min(cap, ds.group_size(a))
        k_b = min(cap, ds.group_size(b))
        first = subsample(ds, a, k_a, cell_seed)
        second = subsample(ds, b, k_b, derive_subseed(cell_seed, "second-group"))
    return permutation_test(
        ds.table.vectors[first],
        ds.table.vectors[second],
        spec,
        replace(cfg, seed=cell_seed),
    )


def mmd_matrix(ds: GroupedDataset, cap: int, spec: KernelSpec, cfg: TestConfig,
               workers: int = 1) -> MmdMatrix:
    """All-pairs MMD tests with split-half negative controls on the diagonal.

    Upper triangle is computed and mirrored, so the matrix is exactly
    symmetric.
    """
    if cap < 2:
        raise ValueError("cap must be >= 2")
    labels = sorted(ds.groups)
    for lab in labels:
        if ds.group_size(lab) < 4:
            raise ValueError(f"group {lab!r} too small for split-half diagonal")
    g = len(labels)
    cells = [(i, j) for i in range(g) for j in range(i, g)]
    results = parallel_map(
        lambda ij: _cell_test(ds, labels[ij[0]], labels[ij[1]], cap, spec, cfg),
        cells,
        workers,
    )
    values = np.zeros((g, g))
    p_values = np.zeros((g, g))
    for (i, j), res in zip(cells, results):
        values[i, j] = values[j, i] = res.observed
        p_values[i, j] = p_values[j, i] = res.p_value
    return MmdMatrix(
        labels=labels, values=values, p_values=p_values,
        significant=p_values < cfg.alpha, alpha=cfg.alpha,
    )


def threshold_sample_size(curve: PowerCurve, target: float):
    """Smallest sample size whose rejection rate reaches target, else None."""
    if not 0.0 < target < 1.0:
        raise ValueError("target must be in (0, 1)")
    for n, rate in zip(curve.sample_sizes, curve.rates):
        if rate >= target:
            return n
    return None


def bootstrap_ci(x, y, spec: KernelSpec, iterations: int = 1000,
                 level: float = 0.95, seed: int = 0) -> BootstrapCi:
    """Percentile bootstrap CI for the squared MMD.

    Resamples X and Y independently with replacement at their original
    sizes. The kernel bandwidth is resolved once from the original pooled
    sample and held fixed across replicates.
    """
    if iterations < 100:
        raise ValueError("iterations must be >= 100")
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if y.ndim == 1:
        y = y[:, None]
    m, n = x.shape[0], y.shape[0]
    point = mmd_squared_unbiased(x, y, spec)
    pooled = np.vstack([x, y])
    k = gram_matrix(spec, pooled, resolve_sigma(spec, pooled))
    rng = derive_rng(seed, "bootstrap-ci")
    reps = np.empty(iterations)
    for i in range(iterations):
        idx_x = rng.integers(0, m, size=m)
        idx_y = m + rng.integers(0, n, size=n)
        reps[i] = mmd_from_gram_value(k, idx_x, idx_y)
    lo = (1.0 - level) / 2.0
    return BootstrapCi(
        point=point.value,
        lower=float(np.quantile(reps, lo)),
        upper=float(np.quantile(reps, 1.0 - lo)),
        level=level,
        iterations=iterations,
        median_replicate=float(np.median(reps)),
    )
