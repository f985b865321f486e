import numpy as np
import pytest

from distinct.store import EmbeddingTable, GroupedDataset


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def make_table(groups: dict, dim: int, seed: int = 0, scale: float = 1.0) -> EmbeddingTable:
    """Synthetic table: groups maps label -> (count, mean vector or scalar)."""
    gen = np.random.default_rng(seed)
    ids, labels, rows = [], [], []
    for label, (count, loc) in groups.items():
        mean = np.full(dim, loc) if np.isscalar(loc) else np.asarray(loc)
        for i in range(count):
            ids.append(f"{label}-{i}")
            labels.append(label)
            rows.append(gen.normal(mean, scale))
    return EmbeddingTable(ids, labels, np.asarray(rows))


def make_dataset(groups: dict, dim: int, seed: int = 0, scale: float = 1.0) -> GroupedDataset:
    return GroupedDataset.from_table(make_table(groups, dim, seed, scale))
