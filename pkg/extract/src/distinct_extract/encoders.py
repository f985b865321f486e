"""Encoder backends.

Real models are loaded lazily so the package imports without torch or
network access. The registry pins model identifiers to their embedding
widths; an emitted table whose dim disagrees with the declared width is
a bug, not a configuration choice.

The ``hash`` backends produce deterministic pseudo-embeddings from the
input content. They exist for offline pipeline testing and carry the
same determinism contract as real encoders (identical input, identical
vector); they have no semantic content.
"""

from __future__ import annotations

import hashlib
import io

import numpy as np

__all__ = ["MODEL_WIDTHS", "get_text_encoder", "get_image_encoder"]

MODEL_WIDTHS = {
    "avsolatorio/GIST-small-Embedding-v0": 384,
    "ViT-H-14-quickgelu/dfn5b": 1024,
    "hash-text-384": 384,
    "hash-image-1024": 1024,
}


def _hash_vector(payload: bytes, dim: int) -> np.ndarray:
    digest = hashlib.sha256(payload).digest()
    seed = int.from_bytes(digest[:8], "little")
    return np.random.Generator(np.random.PCG64(seed)).normal(size=dim)


class HashTextEncoder:
    def __init__(self, dim: int):
        self.dim = dim

    def encode(self, texts) -> np.ndarray:
        return np.vstack([_hash_vector(t.encode("utf-8"), self.dim) for t in texts])


class HashImageEncoder:
    """Hashes decoded pixel content, so re-encoded identical pixels match."""

    def __init__(self, dim: int):
        self.dim = dim

    def encode(self, images) -> np.ndarray:
        rows = []
        for img in images:
            pixels = np.asarray(img.convert("RGB"))
            rows.append(_hash_vector(pixels.tobytes(), self.dim))
        return np.vstack(rows)


class SentenceTransformerEncoder:
    def __init__(self, model_id: str):
        from sentence_transformers import SentenceTransformer

        self.model = SentenceTransformer(model_id)
        self.dim = self.model.get_sentence_embedding_dimension()

    def encode(self, texts) -> np.ndarray:
        return np.asarray(self.model.encode(list(texts), convert_to_numpy=True))


class OpenClipImageEncoder:
    def __init__(self, model_id: str):
        # model_id convention: "<architecture>/<pretrained-tag>"
        import open_clip
        import torch

        arch, pretrained = model_id.split("/", 1)
        self.model, _, self.preprocess = open_clip.create_model_and_transforms(
            arch, pretrained=pretrained
        )
        self.model.eval()
        self.torch = torch
        self.dim = self.model.visual.output_dim

    def encode(self, images) -> np.ndarray:
        batch = self.torch.stack([self.preprocess(img.convert("RGB")) for img in images])
        with self.torch.no_grad():
            feats = self.model.encode_image(batch)
        return feats.cpu().numpy()


def get_text_encoder(model_id: str):
    if model_id.startswith("hash-text"):
        return HashTextEncoder(MODEL_WIDTHS.get(model_id, 384))
    return SentenceTransformerEncoder(model_id)


def get_image_encoder(model_id: str):
    if model_id.startswith("hash-image"):
        return HashImageEncoder(MODEL_WIDTHS.get(model_id, 1024))
    return OpenClipImageEncoder(model_id)
