import numpy as np
import pytest

from distinct.errors import TableFormatError
from distinct.store import (
    EmbeddingTable,
    GroupedDataset,
    load_table,
    save_table,
    split_half,
    subsample,
)

from conftest import make_dataset


def test_csv_parse_basic(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("id,label,d0,d1,d2\na,g,1.0,2.0,3.0\nb,g,4.0,5.0,6.0\n")
    table = load_table(path, format="csv")
    assert table.dim == 3
    assert len(table) == 2
    assert table.ids == ["a", "b"]
    np.testing.assert_array_equal(table.vectors[0], np.float32([1, 2, 3]))


def test_csv_nan_rejected_with_row(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("id,label,d0\na,g,1.0\nb,g,NaN\n")
    with pytest.raises(TableFormatError, match=":3"):
        load_table(path, format="csv")


def test_csv_ragged_row_rejected(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("id,label,d0,d1\na,g,1.0,2.0\nb,g,1.0\n")
    with pytest.raises(TableFormatError, match="expected 4 fields"):
        load_table(path, format="csv")


def test_csv_bad_header_rejected(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("identifier,label,d0\na,g,1.0\n")
    with pytest.raises(TableFormatError, match="header"):
        load_table(path, format="csv")


def test_duplicate_id_rejected():
    with pytest.raises(TableFormatError, match="duplicate id"):
        EmbeddingTable(["a", "a"], ["g", "g"], np.zeros((2, 2)))


def test_duplicate_vectors_allowed():
    table = EmbeddingTable(["a", "b"], ["g", "g"], np.ones((2, 2)))
    assert len(table) == 2


def test_empty_label_rejected():
    with pytest.raises(TableFormatError, match="empty group label"):
        EmbeddingTable(["a"], [""], np.zeros((1, 2)))


def test_binary_round_trip_bit_exact(tmp_path, rng):
    vectors = rng.normal(size=(1000, 64)).astype(np.float32)
    ids = [f"r{i}" for i in range(1000)]
    labels = [f"g{i % 7}" for i in range(1000)]
    table = EmbeddingTable(ids, labels, vectors, source_tag="orig")
    path = tmp_path / "t.bin"
    save_table(table, path, format="binary")
    back = load_table(path, format="binary")
    assert back.ids == table.ids
    assert back.labels == table.labels
    assert np.array_equal(back.vectors, table.vectors)


def test_binary_corrupt_magic(tmp_path):
    path = tmp_path / "t.bin"
    path.write_bytes(b"XXXX" + b"\x00" * 16)
    with pytest.raises(TableFormatError, match="magic"):
        load_table(path, format="binary")


def test_binary_truncated(tmp_path, rng):
    table = EmbeddingTable(["a", "b"], ["g", "g"], rng.normal(size=(2, 4)))
    path = tmp_path / "t.bin"
    save_table(table, path, format="binary")
    path.write_bytes(path.read_bytes()[:-3])
    with pytest.raises(TableFormatError, match="truncated"):
        load_table(path, format="binary")


def test_csv_round_trip_within_tolerance(tmp_path, rng):
    table = EmbeddingTable(
        [f"r{i}" for i in range(50)],
        ["g"] * 50,
        rng.normal(size=(50, 8)),
    )
    path = tmp_path / "t.csv"
    save_table(table, path, format="csv")
    back = load_table(path, format="csv")
    np.testing.assert_allclose(back.vectors, table.vectors, rtol=1e-12)


def test_csv_label_with_comma_quoted(tmp_path):
    table = EmbeddingTable(["a", "b"], ["x,y", "x,y"], np.ones((2, 2)))
    path = tmp_path / "t.csv"
    save_table(table, path, format="csv")
    back = load_table(path, format="csv")
    assert back.labels == ["x,y", "x,y"]


def test_subsample_full_group_is_permutation():
    ds = make_dataset({"g": (10, 0.0)}, dim=2)
    idx = subsample(ds, "g", 10, seed=5)
    assert sorted(idx) == sorted(ds.groups["g"])


def test_subsample_deterministic():
    ds = make_dataset({"g": (20, 0.0)}, dim=2)
    a = subsample(ds, "g", 7, seed=42)
    b = subsample(ds, "g", 7, seed=42)
    np.testing.assert_array_equal(a, b)
    assert len(set(a.tolist())) == 7


def test_subsample_k_too_large():
    ds = make_dataset({"g": (5, 0.0)}, dim=2)
    with pytest.raises(ValueError, match="exceeds group"):
        subsample(ds, "g", 6, seed=0)


def test_subsample_uniformity_binomial_oracle():
    # each of 4 indices should appear ~2500 times in 10000 single draws;
    # binomial sd = sqrt(10000 * 0.25 * 0.75) ~ 43.3
    ds = make_dataset({"g": (4, 0.0)}, dim=2)
    counts = {int(i): 0 for i in ds.groups["g"]}
    for s in range(10_000):
        counts[int(subsample(ds, "g", 1, seed=s)[0])] += 1
    sd = np.sqrt(10_000 * 0.25 * 0.75)
    for c in counts.values():
        assert abs(c - 2500) <= 3 * sd


def test_split_half_even():
    ds = make_dataset({"g": (10, 0.0)}, dim=2)
    first, second = split_half(ds, "g", seed=1)
    assert len(first) == 5 and len(second) == 5
    assert set(first.tolist()).isdisjoint(second.tolist())
    assert sorted(np.concatenate([first, second])) == sorted(ds.groups["g"])


def test_split_half_odd_sizes():
    ds = make_dataset({"g": (7, 0.0)}, dim=2)
    first, second = split_half(ds, "g", seed=1)
    assert len(first) == 4 and len(second) == 3
    assert set(first.tolist()).isdisjoint(second.tolist())


def test_split_half_deterministic():
    ds = make_dataset({"g": (8, 0.0)}, dim=2)
    a = split_half(ds, "g", seed=9)
    b = split_half(ds, "g", seed=9)
    np.testing.assert_array_equal(a[0], b[0])
    np.testing.assert_array_equal(a[1], b[1])


def test_split_half_too_small():
    ds = make_dataset({"g": (3, 0.0)}, dim=2)
    with pytest.raises(ValueError, match="split-half"):
        split_half(ds, "g", seed=0)


def test_grouped_dataset_partition():
    ds = make_dataset({"a": (5, 0.0), "b": (7, 1.0)}, dim=3)
    all_idx = np.concatenate(list(ds.groups.values()))
    assert sorted(all_idx.tolist()) == list(range(12))
