"""Robustness and ablation apparatus.

Covers four concerns: a deterministic PCA reducer (stand-in for any
stochastic dimension reduction done upstream), deviation analysis of the
statistic between full and reduced spaces, an entrywise kernel
perturbation bound audit (|delta MMD^2| <= 4 * max entry error), and
paired perturbation testing where the same vectors serve as both clean
baseline and perturbation source.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ._util import derive_subseed, parallel_map
from .kernels import KernelMatrix, KernelSpec, resolve_sigma
from .mmd import mmd_from_gram_value, mmd_squared_unbiased
from .permutation import TestConfig, TestResult, permutation_test
from .power import PowerCurve, rejection_rate_curve
from .rng import derive_rng
from .store import GroupedDataset

__all__ = [
    "ReducerSpec",
    "PerturbationSpec",
    "StabilityReport",
    "AblationReport",
    "reduce",
    "stability_analysis",
    "check_perturbation_bound",
    "perturb",
    "paired_perturbation_test",
    "ablation_report",
]


@dataclass(frozen=True)
class ReducerSpec:
    method: str = "pca"
    target_dim: int = 2

    def __post_init__(self):
        if self.method not in ("pca", "external"):
            raise ValueError(f"unknown reducer method {self.method!r}")
        if self.target_dim < 1:
            raise ValueError("target_dim must be >= 1")


@dataclass(frozen=True)
class PerturbationSpec:
    kind: str
    ratio: float
    grid_period: int = 4
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("gaussian_noise", "grid_watermark"):
            raise ValueError(f"unknown perturbation kind {self.kind!r}")
        if self.ratio <= 0:
            raise ValueError("ratio must be positive")
        if self.kind == "grid_watermark" and self.grid_period < 2:
            raise ValueError("grid_period must be >= 2")


@dataclass(frozen=True)
class StabilityReport:
    dims: list
    mean_abs_dev: list
    std_abs_dev: list
    trials: int


@dataclass(frozen=True)
class AblationReport:
    mode: str
    settings: list
    curves: list


def reduce(pooled, spec: ReducerSpec, seed: int = 0) -> np.ndarray:
    """Project pooled vectors onto their top principal directions.

    Deterministic: component signs are fixed by making each direction's
    largest-magnitude loading positive. method="external" is the identity
    (the vectors were reduced upstream).
    """
    pts = np.asarray(pooled, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    if spec.method == "external":
        return pts
    n, d = pts.shape
    if spec.target_dim > d:
        raise ValueError(f"target_dim {spec.target_dim} exceeds input dim {d}")
    if spec.target_dim >= n:
        raise ValueError(f"target_dim {spec.target_dim} must be < sample count {n}")
    centered = pts - pts.mean(axis=0)
    # SVD of the centered data; right singular vectors are the directions
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    components = vt[: spec.target_dim]
    flips = np.sign(components[np.arange(len(components)),
                               np.argmax(np.abs(components), axis=1)])
    flips[flips == 0] = 1.0
    components = components * flips[:, None]
    return centered @ components.T


def stability_analysis(x, y, dims, trials: int, sample_size: int,
                       spec: KernelSpec, seed: int = 0,
                       workers: int = 1) -> StabilityReport:
    """Mean/std of |MMD^2_full - MMD^2_reduced| over paired Monte-Carlo trials.

    Each trial draws one fixed pair of samples and evaluates the statistic
    on the same observations in the full space and in each reduced space;
    the bandwidth is re-resolved per space.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    dims = [int(d) for d in dims]
    for d in dims:
        if d > x.shape[1]:
            raise ValueError(f"dim {d} exceeds embedding dim {x.shape[1]}")
        if d >= 2 * sample_size:
            raise ValueError(f"dim {d} too large for pooled sample {2 * sample_size}")

    def run_trial(t: int) -> list:
        rng = derive_rng(seed, "stability", t)
        xi = rng.choice(len(x), size=sample_size, replace=False)
        yi = rng.choice(len(y), size=sample_size, replace=False)
        xs, ys = x[xi], y[yi]
        full = mmd_squared_unbiased(xs, ys, spec).value
        devs = []
        for d in dims:
            pooled = reduce(np.vstack([xs, ys]), ReducerSpec("pca", d), seed)
            red = mmd_squared_unbiased(pooled[:sample_size], pooled[sample_size:], spec).value
            devs.append(abs(full - red))
        return devs

    all_devs = np.asarray(parallel_map(run_trial, range(trials), workers))
    return StabilityReport(
        dims=dims,
        mean_abs_dev=[float(v) for v in all_devs.mean(axis=0)],
        std_abs_dev=[float(v) for v in all_devs.std(axis=0)],
        trials=trials,
    )


def check_perturbation_bound(g_ideal: KernelMatrix, g_approx: KernelMatrix,
                             idx_x, idx_y):
    """Audit the kernel-perturbation stability bound on one dataset.

    Returns (epsilon, delta_mmd, bound_ok) where epsilon is the max
    entrywise kernel difference and the bound is delta_mmd <= 4*epsilon.
    """
    if g_ideal.values.shape != g_approx.values.shape:
        raise ValueError("Gram matrices differ in shape")
    epsilon = float(np.max(np.abs(g_approx.values - g_ideal.values)))
    delta = abs(
        mmd_from_gram_value(g_approx.values, idx_x, idx_y)
        - mmd_from_gram_value(g_ideal.values, idx_x, idx_y)
    )
    return epsilon, delta, delta <= 4.0 * epsilon + 1e-12


def signal_std(vectors) -> float:
    """Dataset-level signal scale: std of all coordinates about the grand mean."""
    pts = np.asarray(vectors, dtype=np.float64)
    return float(pts.std())


def perturb(vectors, spec: PerturbationSpec) -> np.ndarray:
    """Additive perturbation at a given signal-to-perturbation amplitude ratio.

    gaussian_noise adds i.i.d. noise with std sigma_signal/ratio, drawn
    from a per-record stream so batching cannot change any record's draw.
    grid_watermark adds one fixed pattern (amplitude sigma_signal/ratio on
    every grid_period-th coordinate) to every record.
    """
    pts = np.asarray(vectors, dtype=np.float64)
    if pts.size == 0:
        raise ValueError("empty input")
    if pts.ndim == 1:
        pts = pts[:, None]
    amplitude = signal_std(pts) / spec.ratio
    if spec.kind == "grid_watermark":
        mask = np.zeros(pts.shape[1])
        mask[:: spec.grid_period] = amplitude
        return pts + mask[None, :]
    noise = np.vstack([
        derive_rng(spec.seed, "gaussian-noise", i).normal(0.0, amplitude, size=pts.shape[1])
        for i in range(pts.shape[0])
    ])
    return pts + noise


def paired_perturbation_test(clean, spec_p: PerturbationSpec, k_spec: KernelSpec,
                             cfg: TestConfig, reducer: ReducerSpec | None = None) -> TestResult:
    """Test the clean sample against its own perturbed copy.

    If a reducer is given it is fit on the pooled clean + perturbed
    vectors before the split, so both sides live in one projection.
    """
    clean = np.asarray(clean, dtype=np.float64)
    if clean.ndim == 1:
        clean = clean[:, None]
    if clean.shape[0] < 4:
        raise ValueError("need at least 4 clean vectors")
    perturbed = perturb(clean, spec_p)
    if reducer is not None and reducer.method != "external":
        pooled = reduce(np.vstack([clean, perturbed]), reducer, spec_p.seed)
        clean, perturbed = pooled[: len(clean)], pooled[len(clean):]
    return permutation_test(clean, perturbed, k_spec, cfg)


def ablation_report(ds: GroupedDataset, a: str, b: str, mode: str, settings,
                    sizes, trials: int, spec: KernelSpec, cfg: TestConfig,
                    workers: int = 1) -> AblationReport:
    """Power curves across kernel / bandwidth / dimensionality settings.

    All settings share the same seed-derived subsamples, so differences
    between curves are attributable to the setting alone.
    """
    if mode not in ("kernel", "bandwidth", "dimensionality"):
        raise ValueError(f"unknown ablation mode {mode!r}")
    curves = []
    for setting in settings:
        if mode == "kernel":
            setting_spec = replace(spec, family=str(setting))
            data = ds
        elif mode == "bandwidth":
            setting_spec = replace(spec, bandwidth_rule="scaled_median",
                                   scale_multiplier=float(setting))
            data = ds
        else:
            setting_spec = spec
            reduced = reduce(ds.table.vectors,
                             ReducerSpec("pca", int(setting)),
                             derive_subseed(cfg.seed, "ablate-reduce", setting))
            data = GroupedDataset(table=_with_vectors(ds.table, reduced),
                                  groups=ds.groups)
        curves.append(rejection_rate_curve(data, a, b, sizes, trials,
                                           setting_spec, cfg, workers))
    return AblationReport(mode=mode, settings=list(settings), curves=curves)


def _with_vectors(table, vectors):
    from .store import EmbeddingTable

    return EmbeddingTable(table.ids, table.labels, vectors, source_tag=table.source_tag)
