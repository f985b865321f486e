"""Labeled embedding tables: load, validate, persist, subsample, split.

The on-disk formats (CSV and binary) are defined byte-for-byte in the CLI
documentation; this module is the single reader/writer for both. Vectors
are stored as float32; downstream statistics accumulate in float64.
"""

from __future__ import annotations

import csv
import math
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import TableFormatError
from .rng import derive_rng

__all__ = [
    "EmbeddingRecord",
    "EmbeddingTable",
    "GroupedDataset",
    "load_table",
    "save_table",
    "subsample",
    "split_half",
]

_MAGIC = b"MMDE"
_VERSION = 1


@dataclass(frozen=True)
class EmbeddingRecord:
    """One embedded item: unique id, group label, and its vector."""

    id: str
    group_label: str
    vector: np.ndarray

    def __post_init__(self):
        if not self.group_label:
            raise TableFormatError(f"record {self.id!r}: empty group label")


class EmbeddingTable:
    """Immutable ordered collection of embedding records with a common dim.

    Internally backed by an (n, dim) float32 matrix; `vectors[i]` is the
    vector of `records[i]`.
    """

    def __init__(self, ids, labels, vectors, source_tag: str = ""):
        ids = list(ids)
        labels = list(labels)
        matrix = np.asarray(vectors, dtype=np.float32)
        if matrix.ndim != 2:
            raise TableFormatError("vectors must form a 2-D matrix")
        if len(ids) != matrix.shape[0] or len(labels) != matrix.shape[0]:
            raise TableFormatError("ids, labels, vectors length mismatch")
        if matrix.shape[0] > 0 and matrix.shape[1] == 0:
            raise TableFormatError("zero-dimensional vectors")
        if not np.all(np.isfinite(matrix)):
            bad = int(np.argwhere(~np.isfinite(matrix).all(axis=1))[0][0])
            raise TableFormatError(f"non-finite value in record {bad} (id={ids[bad]!r})")
        seen = set()
        for i, rid in enumerate(ids):
            if rid in seen:
                raise TableFormatError(f"duplicate id {rid!r} at record {i}")
            seen.add(rid)
        for i, lab in enumerate(labels):
            if not lab:
                raise TableFormatError(f"record {i} (id={ids[i]!r}): empty group label")
        self.ids = ids
        self.labels = labels
        self.vectors = matrix
        self.vectors.setflags(write=False)
        self.source_tag = source_tag

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return self.vectors.shape[0]

    @property
    def records(self) -> list[EmbeddingRecord]:
        return [
            EmbeddingRecord(i, l, v)
            for i, l, v in zip(self.ids, self.labels, self.vectors)
        ]

    def __eq__(self, other) -> bool:
        if not isinstance(other, EmbeddingTable):
            return NotImplemented
        return (
            self.ids == other.ids
            and self.labels == other.labels
            and self.vectors.shape == other.vectors.shape
            and np.array_equal(self.vectors, other.vectors)
        )


@dataclass
class GroupedDataset:
    """A table plus its label -> row-index partition."""

    table: EmbeddingTable
    groups: dict = field(default_factory=dict)

    @classmethod
    def from_table(cls, table: EmbeddingTable) -> "GroupedDataset":
        groups: dict[str, list[int]] = {}
        for i, lab in enumerate(table.labels):
            groups.setdefault(lab, []).append(i)
        return cls(table=table, groups={k: np.asarray(v) for k, v in groups.items()})

    def group_vectors(self, label: str) -> np.ndarray:
        return self.table.vectors[self.groups[label]]

    def group_size(self, label: str) -> int:
        return len(self.groups[label])


def load_table(path, format: str = "csv", source_tag: str = "") -> EmbeddingTable:
    """Read and validate an embedding table from disk."""
    if format == "csv":
        return _load_csv(path, source_tag)
    if format == "binary":
        return _load_binary(path, source_tag)
    raise ValueError(f"unknown format {format!r}")


def save_table(table: EmbeddingTable, path, format: str = "csv") -> None:
    """Write a table; load_table on the result reproduces it (binary bit-exact)."""
    if format == "csv":
        _save_csv(table, path)
    elif format == "binary":
        _save_binary(table, path)
    else:
        raise ValueError(f"unknown format {format!r}")


def _load_csv(path, source_tag: str) -> EmbeddingTable:
    ids, labels, rows = [], [], []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise TableFormatError(f"{path}: empty file") from None
        if len(header) < 3 or header[0] != "id" or header[1] != "label":
            raise TableFormatError(f"{path}: header must be id,label,d0,...")
        dim = len(header) - 2
        expected = ["d%d" % i for i in range(dim)]
        if header[2:] != expected:
            raise TableFormatError(f"{path}: coordinate columns must be d0..d{dim - 1}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != dim + 2:
                raise TableFormatError(
                    f"{path}:{lineno}: expected {dim + 2} fields, got {len(row)}"
                )
            try:
                vec = np.array(row[2:], dtype=np.float32)
            except ValueError:
                raise TableFormatError(f"{path}:{lineno}: unparseable float") from None
            if not np.all(np.isfinite(vec)):
                raise TableFormatError(f"{path}:{lineno}: non-finite value")
            ids.append(row[0])
            labels.append(row[1])
            rows.append(vec)
    matrix = np.vstack(rows) if rows else np.empty((0, dim), dtype=np.float32)
    return EmbeddingTable(ids, labels, matrix, source_tag=source_tag or str(path))


def _save_csv(table: EmbeddingTable, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id", "label"] + ["d%d" % i for i in range(table.dim)])
        for rid, lab, vec in zip(table.ids, table.labels, table.vectors):
            # repr of float32-as-float round-trips exactly through decimal
            writer.writerow([rid, lab] + [repr(float(v)) for v in vec])


def _load_binary(path, source_tag: str) -> EmbeddingTable:
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != _MAGIC:
        raise TableFormatError(f"{path}: bad magic (expected MMDE)")
    if len(data) < 13:
        raise TableFormatError(f"{path}: truncated header")
    version = data[4]
    if version != _VERSION:
        raise TableFormatError(f"{path}: unsupported version {version}")
    count, dim = struct.unpack_from("<II", data, 5)
    offset = 13
    ids, labels, rows = [], [], []
    for r in range(count):
        try:
            (id_len,) = struct.unpack_from("<H", data, offset)
            offset += 2
            rid = data[offset : offset + id_len].decode("utf-8")
            offset += id_len
            (lab_len,) = struct.unpack_from("<H", data, offset)
            offset += 2
            lab = data[offset : offset + lab_len].decode("utf-8")
            offset += lab_len
            vec = np.frombuffer(data, dtype="<f4", count=dim, offset=offset)
            if len(vec) != dim:
                raise struct.error
            offset += 4 * dim
        except (struct.error, ValueError, UnicodeDecodeError):
            raise TableFormatError(f"{path}: truncated or corrupt record {r}") from None
        if not np.all(np.isfinite(vec)):
            raise TableFormatError(f"{path}: non-finite value in record {r}")
        ids.append(rid)
        labels.append(lab)
        rows.append(vec)
    matrix = np.vstack(rows) if rows else np.empty((0, dim), dtype=np.float32)
    return EmbeddingTable(ids, labels, matrix, source_tag=source_tag or str(path))


def _save_binary(table: EmbeddingTable, path) -> None:
    parts = [_MAGIC, bytes([_VERSION]), struct.pack("<II", len(table), table.dim)]
    for rid, lab, vec in zip(table.ids, table.labels, table.vectors):
        rid_b = rid.encode("utf-8")
        lab_b = lab.encode("utf-8")
        parts.append(struct.pack("<H", len(rid_b)))
        parts.append(rid_b)
        parts.append(struct.pack("<H", len(lab_b)))
        parts.append(lab_b)
        parts.append(np.asarray(vec, dtype="<f4").tobytes())
    with open(path, "wb") as fh:
        fh.write(b"".join(parts))


def subsample(ds: GroupedDataset, group: str, k: int, seed: int) -> np.ndarray:
    """k distinct row indices drawn uniformly without replacement from a group."""
    idx = ds.groups[group]
    if k > len(idx):
        raise ValueError(f"k={k} exceeds group {group!r} size {len(idx)}")
    rng = derive_rng(seed, "subsample", group, k)
    return rng.choice(idx, size=k, replace=False)


def split_half(ds: GroupedDataset, group: str, seed: int):
    """Disjoint exhaustive halves of a group; odd sizes put the extra in the first."""
    idx = ds.groups[group]
    n = len(idx)
    if n < 4:
        raise ValueError(f"group {group!r} has {n} items; split-half needs >= 4")
    rng = derive_rng(seed, "split-half", group)
    shuffled = rng.permutation(idx)
    cut = math.ceil(n / 2)
    return shuffled[:cut], shuffled[cut:]
