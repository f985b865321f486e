import csv

import numpy as np
import pytest
from PIL import Image


@pytest.fixture
def text_corpus(tmp_path):
    """Write a small text corpus plus its manifest; return the manifest path."""
    rows = []
    for i in range(6):
        label = "human" if i < 3 else "model"
        path = tmp_path / f"doc{i}.txt"
        path.write_text(f"sample document {i} from the {label} pool\n" * 3,
                        encoding="utf-8")
        rows.append((f"doc{i}", label, str(path)))
    manifest = tmp_path / "manifest.csv"
    with open(manifest, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "label", "path"])
        writer.writerows(rows)
    return manifest


@pytest.fixture
def image_corpus(tmp_path):
    rng = np.random.default_rng(7)
    rows = []
    for i in range(4):
        label = "human" if i < 2 else "model"
        arr = rng.integers(0, 256, size=(32, 32, 3), dtype=np.uint8)
        path = tmp_path / f"img{i}.png"
        Image.fromarray(arr).save(path)
        rows.append((f"img{i}", label, str(path)))
    manifest = tmp_path / "images.csv"
    with open(manifest, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "label", "path"])
        writer.writerows(rows)
    return manifest
