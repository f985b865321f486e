"""UMAP reduction of interchange tables.

The reduced table is meant for the analysis engine's ``external`` reducer
path (the engine's own reducer is a deterministic PCA; UMAP lives here
because it is stochastic and ecosystem-bound). Requires umap-learn.
"""

from __future__ import annotations

from .interchange import read_binary, write_table

__all__ = ["reduce_umap"]


def reduce_umap(in_path, out_path, target_dim: int, seed: int = 0,
                metric: str = "cosine", output_format: str = "binary"):
    ids, labels, vectors = read_binary(in_path)
    if target_dim >= len(ids):
        raise ValueError(
            f"target_dim {target_dim} must be < record count {len(ids)}"
        )
    try:
        import umap
    except ImportError as exc:
        raise RuntimeError(
            "umap-learn is not installed; install the [umap] extra"
        ) from exc
    reducer = umap.UMAP(n_components=target_dim, metric=metric, random_state=seed)
    reduced = reducer.fit_transform(vectors)
    write_table(ids, labels, reduced, out_path, format=output_format)
    return len(ids), target_dim
