"""Deterministic, labeled random number streams.

Every piece of randomness in the engine is derived from one top-level
integer seed plus a sequence of string/int labels naming the consumer
(module, purpose, trial index, ...). Streams for distinct labels are
statistically independent, and the derivation is independent of thread
scheduling or platform, so any analysis is reproducible from its seed
alone.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["derive_rng", "derive_seed_sequence"]


def _label_words(labels: tuple) -> list[int]:
    """Hash a label tuple into a list of uint32 words for SeedSequence."""
    h = hashlib.sha256()
    for label in labels:
        part = str(label).encode("utf-8")
        h.update(len(part).to_bytes(4, "little"))
        h.update(part)
    digest = h.digest()
    return [int.from_bytes(digest[i : i + 4], "little") for i in range(0, 32, 4)]


def derive_seed_sequence(seed: int, *labels) -> np.random.SeedSequence:
    """SeedSequence for (seed, labels); distinct labels give independent streams."""
    return np.random.SeedSequence([seed & 0xFFFFFFFF, seed >> 32 & 0xFFFFFFFF] + _label_words(labels))


def derive_rng(seed: int, *labels) -> np.random.Generator:
    """A PCG64 generator keyed by (seed, labels)."""
    return np.random.Generator(np.random.PCG64(derive_seed_sequence(seed, *labels)))
