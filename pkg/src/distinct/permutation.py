"""Permutation-based significance testing for the squared-MMD statistic.

The null distribution is built by shuffling the pooled sample and
re-splitting into first-m / last-n. The p-value counts permuted
statistics >= the observed one, with the observed statistic itself added
to both numerator and denominator; ties count toward the null (the
conservative choice). The decision authority is p < alpha; the empirical
critical value is reported for exposition only, since the two rules can
disagree only on quantile ties.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import GramBudgetExceeded
from .kernels import KernelSpec, precompute_gram, resolve_sigma
from .mmd import mmd_from_gram_value, mmd_squared_unbiased
from .rng import derive_rng

__all__ = ["TestConfig", "TestResult", "permutation_test", "quantile"]

# below this many total permutations the null is enumerated exactly
_EXHAUSTIVE_LIMIT = 10_000


@dataclass(frozen=True)
class TestConfig:
    R: int = 199
    alpha: float = 0.05
    seed: int = 0
    gram_mode: str = "precompute"

    def __post_init__(self):
        if self.R < 1:
            raise ValueError("R must be >= 1")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must be in (0, 1)")
        if self.gram_mode not in ("precompute", "on_the_fly"):
            raise ValueError(f"unknown gram_mode {self.gram_mode!r}")
        if 1.0 / (self.R + 1) > self.alpha:
            warnings.warn(
                f"minimum attainable p-value 1/{self.R + 1} exceeds alpha="
                f"{self.alpha}; the test can never reject",
                stacklevel=3,
            )


@dataclass(frozen=True)
class TestResult:
    observed: float
    p_value: float
    critical_value: float
    reject: bool
    permutation_stats: np.ndarray
    config: TestConfig
    sigma_used: float | None = None
    exhaustive: bool = False
    m: int = 0
    n: int = 0

    def recount_p_value(self) -> float:
        """Recompute p from the stored permutation statistics (exactness check)."""
        r = int(np.sum(self.permutation_stats >= self.observed))
        return (1 + r) / (len(self.permutation_stats) + 1)


def quantile(values, level: float) -> float:
    """Empirical quantile with linear interpolation between order statistics."""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise ValueError("quantile of empty list")
    if not 0.0 < level < 1.0:
        raise ValueError("level must be in (0, 1)")
    return float(np.quantile(values, level, method="linear"))


def permutation_test(x, y, spec: KernelSpec, cfg: TestConfig) -> TestResult:
    """Algorithmic core: observed statistic, shuffled null, p-value, decision.

    Permutations are independent uniform shuffles keyed by (seed, r), so
    the result is identical under any parallel schedule. When the total
    number of distinct orderings is small enough the null is enumerated
    exhaustively instead of sampled.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if y.ndim == 1:
        y = y[:, None]
    m, n = x.shape[0], y.shape[0]
    if m < 2 or n < 2:
        raise ValueError(f"need m,n >= 2, got m={m}, n={n}")
    pooled = np.vstack([x, y])
    sigma = resolve_sigma(spec, pooled)

    gram = None
    if cfg.gram_mode == "precompute":
        try:
            gram = precompute_gram(spec, pooled, (m, n), sigma=sigma)
        except GramBudgetExceeded:
            gram = None  # fall back to on-the-fly evaluation

    def stat(idx_x: np.ndarray, idx_y: np.ndarray) -> float:
        if gram is not None:
            return mmd_from_gram_value(gram.values, idx_x, idx_y)
        return mmd_squared_unbiased(pooled[idx_x], pooled[idx_y], spec, sigma=sigma).value

    observed = stat(np.arange(m), np.arange(m, m + n))

    total = m + n
    exhaustive = math.factorial(total) <= _EXHAUSTIVE_LIMIT
    if exhaustive:
        perms = [np.asarray(p) for p in itertools.permutations(range(total))]
    else:
        perms = None

    count = len(perms) if perms is not None else cfg.R
    stats = np.empty(count, dtype=np.float64)
    for r in range(count):
        if perms is not None:
            perm = perms[r]
        else:
            perm = derive_rng(cfg.seed, "permutation-test", r).permutation(total)
        stats[r] = stat(perm[:m], perm[m:])

    p_value = (1 + int(np.sum(stats >= observed))) / (count + 1)
    critical = quantile(stats, 1.0 - cfg.alpha)
    return TestResult(
        observed=observed,
        p_value=p_value,
        critical_value=critical,
        reject=p_value < cfg.alpha,
        permutation_stats=stats,
        config=cfg,
        sigma_used=sigma,
        exhaustive=exhaustive,
        m=m,
        n=n,
    )
