"""Extraction jobs: manifest in, interchange table out."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .encoders import MODEL_WIDTHS, get_image_encoder, get_text_encoder
from .interchange import write_table

__all__ = ["ExtractJob", "ExtractResult", "read_manifest", "extract"]


@dataclass
class ExtractJob:
    modality: str  # "text" or "image"
    model_id: str
    manifest: list  # (id, label, path) triples, output order follows this
    output: str
    normalize: bool = True
    output_format: str = "binary"
    batch_size: int = 32

    def __post_init__(self):
        if self.modality not in ("text", "image"):
            raise ValueError(f"unknown modality {self.modality!r}")


@dataclass
class ExtractResult:
    written: int
    dim: int
    failures: list = field(default_factory=list)  # (id, path, reason)


def read_manifest(path) -> list:
    """Manifest CSV with header id,label,path."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["id", "label", "path"]:
            raise ValueError(f"{path}: manifest header must be id,label,path")
        return [(row[0], row[1], row[2]) for row in reader if row]


def _load_inputs(job: ExtractJob):
    """Read raw inputs, recording unreadable ones instead of failing."""
    loaded, failures = [], []
    for rid, label, path in job.manifest:
        try:
            if job.modality == "text":
                payload = Path(path).read_text(encoding="utf-8")
            else:
                from PIL import Image

                payload = Image.open(path)
                payload.load()
        except Exception as exc:  # unreadable input: skip, keep going
            failures.append((rid, path, str(exc)))
            continue
        loaded.append((rid, label, payload))
    return loaded, failures


def extract(job: ExtractJob) -> ExtractResult:
    """Encode every readable manifest entry and write the interchange table."""
    encoder = (get_text_encoder if job.modality == "text" else get_image_encoder)(
        job.model_id
    )
    loaded, failures = _load_inputs(job)
    vectors = []
    for start in range(0, len(loaded), job.batch_size):
        batch = loaded[start : start + job.batch_size]
        vectors.append(encoder.encode([payload for _, _, payload in batch]))
    matrix = np.vstack(vectors) if vectors else np.empty((0, encoder.dim), np.float32)
    declared = MODEL_WIDTHS.get(job.model_id)
    if declared is not None and matrix.shape[0] and matrix.shape[1] != declared:
        raise RuntimeError(
            f"model {job.model_id} produced dim {matrix.shape[1]}, declared {declared}"
        )
    if job.normalize and matrix.shape[0]:
        norms = np.linalg.norm(matrix, axis=1, keepdims=True)
        if np.any(norms == 0):
            raise RuntimeError("zero-norm embedding; cannot L2-normalize")
        matrix = matrix / norms
    write_table(
        [rid for rid, _, _ in loaded],
        [label for _, label, _ in loaded],
        matrix,
        job.output,
        format=job.output_format,
    )
    return ExtractResult(written=len(loaded), dim=int(matrix.shape[1]),
                         failures=failures)
