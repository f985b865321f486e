"""Embedding extraction companion for the distinct analysis engine.

Turns raw corpora (text files, images) into embedding tables in the
shared interchange formats, plus UMAP reduction and image-similarity
exports. The analysis engine consumes the emitted files; the two
packages share no code, only the byte-level contract.
"""

from .encoders import MODEL_WIDTHS, get_image_encoder, get_text_encoder
from .interchange import read_binary, write_table
from .jobs import ExtractJob, ExtractResult, extract, read_manifest
from .similarity import export_similarity_pairs, lpips_value, ssim_value
from .umap_reduce import reduce_umap

__version__ = "0.1.0"

__all__ = [
    "MODEL_WIDTHS",
    "get_image_encoder",
    "get_text_encoder",
    "read_binary",
    "write_table",
    "ExtractJob",
    "ExtractResult",
    "extract",
    "read_manifest",
    "export_similarity_pairs",
    "ssim_value",
    "lpips_value",
    "reduce_umap",
    "__version__",
]
