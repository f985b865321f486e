"""UMAP reduction: graceful absence and, when installed, shape/determinism."""

import numpy as np
import pytest

from distinct_extract import read_binary, reduce_umap, write_table


def make_table(tmp_path, n=30, d=16, seed=0):
    rng = np.random.default_rng(seed)
    path = tmp_path / "in.mmde"
    write_table(
        [f"r{i}" for i in range(n)],
        ["a" if i < n // 2 else "b" for i in range(n)],
        rng.normal(size=(n, d)).astype(np.float32),
        path,
    )
    return path


def test_target_dim_must_be_below_count(tmp_path):
    path = make_table(tmp_path, n=5)
    with pytest.raises(ValueError):
        reduce_umap(path, tmp_path / "out.mmde", 5)


def test_missing_backend_raises_runtime_error(tmp_path):
    try:
        import umap  # noqa: F401
    except ImportError:
        pass
    else:
        pytest.skip("umap-learn installed; absence path not reachable")
    path = make_table(tmp_path)
    with pytest.raises(RuntimeError, match="umap-learn"):
        reduce_umap(path, tmp_path / "out.mmde", 2)


def test_reduction_shape_and_labels(tmp_path):
    pytest.importorskip("umap")
    path = make_table(tmp_path)
    out = tmp_path / "out.mmde"
    count, dim = reduce_umap(path, out, 2, seed=11)
    assert (count, dim) == (30, 2)
    ids, labels, vectors = read_binary(out)
    assert len(ids) == 30
    assert vectors.shape == (30, 2)
    in_ids, in_labels, _ = read_binary(path)
    assert ids == in_ids and labels == in_labels


def test_reduction_seed_determinism(tmp_path):
    pytest.importorskip("umap")
    path = make_table(tmp_path)
    out_a, out_b = tmp_path / "a.mmde", tmp_path / "b.mmde"
    reduce_umap(path, out_a, 2, seed=11)
    reduce_umap(path, out_b, 2, seed=11)
    _, _, va = read_binary(out_a)
    _, _, vb = read_binary(out_b)
    np.testing.assert_array_equal(va, vb)
