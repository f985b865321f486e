"""Item-level nearest-neighbor memorization audit.

Calibrates a per-stratum similarity threshold from leave-one-out nearest
neighbors within the reference corpus, then flags candidate items whose
best same-stratum reference match meets that threshold. Brute-force
cosine search throughout: corpora at audit scale fit in memory and exact
search is exactly testable.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .store import GroupedDataset

__all__ = ["AuditConfig", "AuditReport", "nn_similarity", "calibrate_threshold", "audit"]


@dataclass(frozen=True)
class AuditConfig:
    threshold_percentile: float = 99.0
    metric: str = "cosine"

    def __post_init__(self):
        if not 0.0 < self.threshold_percentile < 100.0:
            raise ValueError("threshold_percentile must be in (0, 100)")
        if self.metric != "cosine":
            raise ValueError("only the cosine metric is supported")


@dataclass(frozen=True)
class AuditReport:
    baseline_threshold: dict
    candidate_nn: list  # (candidate id, best reference id, similarity)
    flagged: list
    exceedance_rate: float
    expected_fp_rate: float
    per_stratum_exceedance: dict = field(default_factory=dict)
    skipped_strata: list = field(default_factory=list)


def _unit_rows(matrix: np.ndarray) -> np.ndarray:
    pts = np.asarray(matrix, dtype=np.float64)
    norms = np.linalg.norm(pts, axis=1)
    if np.any(norms == 0.0):
        raise ValueError("zero-norm vector; cosine similarity undefined")
    return pts / norms[:, None]


def nn_similarity(query, corpus, metric: str = "cosine"):
    """Index and similarity of the best cosine match; ties go to the lowest index."""
    if metric != "cosine":
        raise ValueError("only the cosine metric is supported")
    corpus = np.asarray(corpus, dtype=np.float64)
    if corpus.ndim == 1:
        corpus = corpus[None, :]
    if corpus.shape[0] == 0:
        raise ValueError("empty corpus")
    q = np.asarray(query, dtype=np.float64)
    qn = np.linalg.norm(q)
    if qn == 0.0:
        raise ValueError("zero-norm query vector")
    sims = _unit_rows(corpus) @ (q / qn)
    best = int(np.argmax(sims))  # argmax returns the first (lowest) maximizer
    return best, float(sims[best])


def calibrate_threshold(reference: GroupedDataset, cfg: AuditConfig):
    """Per-stratum thresholds from leave-one-out NN similarities.

    Strata with fewer than 3 reference items are skipped with a warning
    (leave-one-out needs at least 2 other items).

    Returns (thresholds: label -> threshold, skipped: label list).
    """
    thresholds: dict[str, float] = {}
    skipped: list[str] = []
    for label in sorted(reference.groups):
        vecs = reference.group_vectors(label)
        if len(vecs) < 3:
            warnings.warn(f"stratum {label!r} has {len(vecs)} reference items; skipped")
            skipped.append(label)
            continue
        unit = _unit_rows(vecs)
        sims = unit @ unit.T
        np.fill_diagonal(sims, -np.inf)  # leave-one-out: never match self
        nn = sims.max(axis=1)
        thresholds[label] = float(np.percentile(nn, cfg.threshold_percentile))
    return thresholds, skipped


def audit(candidates: GroupedDataset, reference: GroupedDataset,
          cfg: AuditConfig) -> AuditReport:
    """Flag candidate items whose same-stratum reference NN similarity
    meets the calibrated threshold."""
    thresholds, skipped = calibrate_threshold(reference, cfg)
    for label in candidates.groups:
        if label not in reference.groups:
            raise ValueError(f"candidate stratum {label!r} absent from reference")
    candidate_nn = []
    flagged = []
    per_stratum: dict[str, float] = {}
    total = 0
    for label in sorted(candidates.groups):
        if label in skipped:
            continue
        ref_idx = reference.groups[label]
        ref_unit = _unit_rows(reference.table.vectors[ref_idx])
        cand_idx = candidates.groups[label]
        cand_unit = _unit_rows(candidates.table.vectors[cand_idx])
        sims = cand_unit @ ref_unit.T
        best = np.argmax(sims, axis=1)
        best_sims = sims[np.arange(len(cand_idx)), best]
        stratum_flags = 0
        for row, (b, s) in enumerate(zip(best, best_sims)):
            cid = candidates.table.ids[cand_idx[row]]
            rid = reference.table.ids[ref_idx[b]]
            candidate_nn.append((cid, rid, float(s)))
            if s >= thresholds[label]:
                flagged.append(cid)
                stratum_flags += 1
        per_stratum[label] = stratum_flags / len(cand_idx)
        total += len(cand_idx)
    rate = len(flagged) / total if total else 0.0
    return AuditReport(
        baseline_threshold=thresholds,
        candidate_nn=candidate_nn,
        flagged=flagged,
        exceedance_rate=rate,
        expected_fp_rate=1.0 - cfg.threshold_percentile / 100.0,
        per_stratum_exceedance=per_stratum,
        skipped_strata=skipped,
    )
