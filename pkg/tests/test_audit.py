import numpy as np
import pytest

from distinct.audit import AuditConfig, audit, calibrate_threshold, nn_similarity
from distinct.store import EmbeddingTable, GroupedDataset

from conftest import make_dataset


def brute_force_nn(query, corpus):
    """Exhaustive double-loop cosine search, the oracle for nn_similarity."""
    best_idx, best_sim = -1, -np.inf
    q = np.asarray(query, dtype=float)
    for i, row in enumerate(np.asarray(corpus, dtype=float)):
        sim = float(q @ row / (np.linalg.norm(q) * np.linalg.norm(row)))
        if sim > best_sim:
            best_idx, best_sim = i, sim
    return best_idx, best_sim


def test_verbatim_self_match(rng):
    corpus = rng.normal(size=(10, 4))
    idx, sim = nn_similarity(corpus[3], corpus)
    assert idx == 3
    assert sim == pytest.approx(1.0, abs=1e-12)


def test_orthogonal_similarity_zero():
    idx, sim = nn_similarity([1.0, 0.0], [[0.0, 1.0]])
    assert idx == 0
    assert sim == pytest.approx(0.0, abs=1e-12)


def test_zero_norm_rejected():
    with pytest.raises(ValueError, match="zero-norm"):
        nn_similarity([0.0, 0.0], [[1.0, 0.0]])
    with pytest.raises(ValueError, match="zero-norm"):
        nn_similarity([1.0, 0.0], [[0.0, 0.0], [1.0, 1.0]])


def test_tie_broken_by_lowest_index():
    corpus = [[2.0, 0.0], [1.0, 0.0]]  # same direction, same cosine
    idx, _ = nn_similarity([1.0, 0.0], corpus)
    assert idx == 0


def test_matches_brute_force_oracle(rng):
    corpus = rng.normal(size=(200, 8))
    for _ in range(100):
        q = rng.normal(size=8)
        fast = nn_similarity(q, corpus)
        slow = brute_force_nn(q, corpus)
        assert fast[0] == slow[0]
        assert fast[1] == pytest.approx(slow[1], abs=1e-12)


def test_calibrate_identical_vectors_threshold_one():
    table = EmbeddingTable(
        [f"r{i}" for i in range(5)], ["s"] * 5, np.ones((5, 3))
    )
    thresholds, skipped = calibrate_threshold(
        GroupedDataset.from_table(table), AuditConfig(threshold_percentile=99)
    )
    assert thresholds["s"] == pytest.approx(1.0, abs=1e-12)
    assert skipped == []


def test_calibrate_median_matches_oracle(rng):
    vecs = rng.normal(size=(40, 6))
    table = EmbeddingTable([f"r{i}" for i in range(40)], ["s"] * 40, vecs)
    thresholds, _ = calibrate_threshold(
        GroupedDataset.from_table(table), AuditConfig(threshold_percentile=50)
    )
    # leave-one-out oracle: per item, best cosine among the 39 others
    nn_sims = []
    vecs = table.vectors.astype(float)
    for i in range(40):
        others = np.delete(vecs, i, axis=0)
        nn_sims.append(brute_force_nn(vecs[i], others)[1])
    assert thresholds["s"] == pytest.approx(np.percentile(nn_sims, 50), abs=1e-12)


def test_calibrate_small_stratum_skipped():
    table = EmbeddingTable(
        ["a", "b", "c", "d", "e"],
        ["big", "big", "big", "tiny", "tiny"],
        np.arange(25, dtype=float).reshape(5, 5) + 1,
    )
    with pytest.warns(UserWarning, match="tiny"):
        thresholds, skipped = calibrate_threshold(
            GroupedDataset.from_table(table), AuditConfig()
        )
    assert skipped == ["tiny"]
    assert "big" in thresholds


def test_audit_verbatim_copies_full_exceedance(rng):
    vecs = rng.normal(size=(30, 5))
    ref = GroupedDataset.from_table(
        EmbeddingTable([f"h{i}" for i in range(30)], ["s"] * 30, vecs)
    )
    cands = GroupedDataset.from_table(
        EmbeddingTable([f"c{i}" for i in range(30)], ["s"] * 30, vecs)
    )
    report = audit(cands, ref, AuditConfig(threshold_percentile=99))
    assert report.baseline_threshold["s"] < 1.0
    assert report.exceedance_rate == 1.0
    assert len(report.flagged) == 30


def test_audit_missing_stratum_rejected(rng):
    ref = GroupedDataset.from_table(
        EmbeddingTable(["a", "b", "c"], ["s"] * 3, rng.normal(size=(3, 4)))
    )
    cands = GroupedDataset.from_table(
        EmbeddingTable(["x"], ["other"], rng.normal(size=(1, 4)))
    )
    with pytest.raises(ValueError, match="absent from reference"):
        audit(cands, ref, AuditConfig())


def test_audit_null_calibration():
    # i.i.d. candidates from the reference distribution: exceedance near 1%
    rates = []
    for seed in range(10):
        ref = make_dataset({"s": (300, 0.0)}, dim=8, seed=seed)
        cands = make_dataset({"s": (300, 0.0)}, dim=8, seed=1000 + seed)
        report = audit(cands, ref, AuditConfig(threshold_percentile=99))
        rates.append(report.exceedance_rate)
    assert 0.0 <= np.mean(rates) <= 0.03


def test_audit_scale_invariance(rng):
    vecs_ref = rng.normal(size=(20, 4))
    vecs_cand = rng.normal(size=(15, 4))
    ref = GroupedDataset.from_table(
        EmbeddingTable([f"h{i}" for i in range(20)], ["s"] * 20, vecs_ref)
    )
    cands = GroupedDataset.from_table(
        EmbeddingTable([f"c{i}" for i in range(15)], ["s"] * 15, vecs_cand)
    )
    scaled_cands = GroupedDataset.from_table(
        EmbeddingTable([f"c{i}" for i in range(15)], ["s"] * 15, vecs_cand * 7.5)
    )
    a = audit(cands, ref, AuditConfig())
    b = audit(scaled_cands, ref, AuditConfig())
    assert a.flagged == b.flagged
    assert a.exceedance_rate == b.exceedance_rate


def test_audit_expected_fp_rate_field():
    ref = make_dataset({"s": (10, 0.0)}, dim=3, seed=0)
    report = audit(ref, ref, AuditConfig(threshold_percentile=95))
    assert report.expected_fp_rate == pytest.approx(0.05)


def test_config_validation():
    with pytest.raises(ValueError):
        AuditConfig(threshold_percentile=100.0)
    with pytest.raises(ValueError):
        AuditConfig(metric="euclidean")
