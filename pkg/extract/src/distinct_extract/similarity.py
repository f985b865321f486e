"""Pairwise image-similarity exports (SSIM, LPIPS) for audit merges.

Output CSV: ``candidate_id,reference_id,metric,value`` with one row per
same-stratum candidate/reference pair. SSIM uses scikit-image; LPIPS
needs the optional lpips+torch extra.
"""

from __future__ import annotations

import csv

import numpy as np

__all__ = ["export_similarity_pairs", "ssim_value", "lpips_value"]


def _load_gray(path, size=(256, 256)) -> np.ndarray:
    from PIL import Image

    with Image.open(path) as img:
        return np.asarray(img.convert("L").resize(size), dtype=np.float64)


def ssim_value(path_a, path_b) -> float:
    from skimage.metrics import structural_similarity

    a, b = _load_gray(path_a), _load_gray(path_b)
    return float(structural_similarity(a, b, data_range=255.0))


class _LpipsScorer:
    def __init__(self):
        import lpips
        import torch

        self.torch = torch
        self.net = lpips.LPIPS(net="alex")
        self.net.eval()

    def __call__(self, path_a, path_b) -> float:
        from PIL import Image

        tensors = []
        for path in (path_a, path_b):
            with Image.open(path) as img:
                arr = np.asarray(img.convert("RGB").resize((256, 256)), dtype=np.float32)
            tensors.append(
                self.torch.from_numpy(arr / 127.5 - 1.0).permute(2, 0, 1)[None]
            )
        with self.torch.no_grad():
            return float(self.net(tensors[0], tensors[1]).item())


_lpips_scorer = None


def lpips_value(path_a, path_b) -> float:
    global _lpips_scorer
    if _lpips_scorer is None:
        try:
            _lpips_scorer = _LpipsScorer()
        except ImportError as exc:
            raise RuntimeError(
                "lpips/torch not installed; install the [similarity] extra"
            ) from exc
    return _lpips_scorer(path_a, path_b)


def export_similarity_pairs(candidates, references, metric: str, out_path):
    """candidates/references: (id, label, path) triples; same-label pairs only.

    Returns (pair_count, failures) where failures lists undecodable images.
    """
    if metric == "ssim":
        score = ssim_value
    elif metric == "lpips":
        score = lpips_value
    else:
        raise ValueError(f"unknown metric {metric!r}")
    failures = []
    count = 0
    with open(out_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["candidate_id", "reference_id", "metric", "value"])
        for cid, clabel, cpath in candidates:
            for rid, rlabel, rpath in references:
                if clabel != rlabel:
                    continue
                try:
                    value = score(cpath, rpath)
                except (OSError, ValueError) as exc:
                    failures.append((cid, rid, str(exc)))
                    continue
                writer.writerow([cid, rid, metric, repr(value)])
                count += 1
    return count, failures
