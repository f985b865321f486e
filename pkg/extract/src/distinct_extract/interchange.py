"""Writers for the shared embedding-table interchange formats.

Implements the same byte-level contract the analysis engine reads:

CSV: UTF-8, header ``id,label,d0,...,d{D-1}``, decimal floats, LF endings.
Binary: magic ``MMDE`` | version u8=1 | record_count u32 LE | dim u32 LE |
per record: id_len u16 LE, id UTF-8, label_len u16 LE, label UTF-8,
dim x f32 LE.
"""

from __future__ import annotations

import csv
import struct

import numpy as np

MAGIC = b"MMDE"
VERSION = 1

__all__ = ["write_table", "read_binary"]


def write_table(ids, labels, vectors, path, format: str = "binary") -> None:
    vectors = np.asarray(vectors, dtype=np.float32)
    if vectors.ndim != 2 or len(ids) != len(vectors) or len(labels) != len(vectors):
        raise ValueError("ids, labels, vectors must align into an (n, d) table")
    if not np.all(np.isfinite(vectors)):
        raise ValueError("non-finite embedding values")
    if format == "csv":
        _write_csv(ids, labels, vectors, path)
    elif format == "binary":
        _write_binary(ids, labels, vectors, path)
    else:
        raise ValueError(f"unknown format {format!r}")


def _write_csv(ids, labels, vectors, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id", "label"] + ["d%d" % i for i in range(vectors.shape[1])])
        for rid, lab, vec in zip(ids, labels, vectors):
            writer.writerow([rid, lab] + [repr(float(v)) for v in vec])


def _write_binary(ids, labels, vectors, path) -> None:
    parts = [MAGIC, bytes([VERSION]),
             struct.pack("<II", len(ids), vectors.shape[1])]
    for rid, lab, vec in zip(ids, labels, vectors):
        rid_b = str(rid).encode("utf-8")
        lab_b = str(lab).encode("utf-8")
        parts.append(struct.pack("<H", len(rid_b)))
        parts.append(rid_b)
        parts.append(struct.pack("<H", len(lab_b)))
        parts.append(lab_b)
        parts.append(vec.astype("<f4").tobytes())
    with open(path, "wb") as fh:
        fh.write(b"".join(parts))


def read_binary(path):
    """Minimal reader, used for round-trip checks and UMAP re-export."""
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != MAGIC or data[4] != VERSION:
        raise ValueError(f"{path}: not a version-{VERSION} interchange file")
    count, dim = struct.unpack_from("<II", data, 5)
    offset = 13
    ids, labels, rows = [], [], []
    for _ in range(count):
        (id_len,) = struct.unpack_from("<H", data, offset)
        offset += 2
        ids.append(data[offset : offset + id_len].decode("utf-8"))
        offset += id_len
        (lab_len,) = struct.unpack_from("<H", data, offset)
        offset += 2
        labels.append(data[offset : offset + lab_len].decode("utf-8"))
        offset += lab_len
        rows.append(np.frombuffer(data, dtype="<f4", count=dim, offset=offset))
        offset += 4 * dim
    return ids, labels, np.vstack(rows) if rows else np.empty((0, dim), np.float32)
