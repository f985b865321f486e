"""CLI surface for the extraction companion."""

import numpy as np
import pytest

from distinct_extract.cli import main
from distinct_extract.interchange import read_binary


def test_extract_command(tmp_path, text_corpus, capsys):
    out = tmp_path / "emb.mmde"
    code = main([
        "extract", "--modality", "text", "--model", "hash-text-384",
        "--manifest", str(text_corpus), "--out", str(out),
    ])
    assert code == 0
    assert "6 records, dim=384" in capsys.readouterr().err
    ids, _, vectors = read_binary(out)
    assert len(ids) == 6
    np.testing.assert_allclose(
        np.linalg.norm(vectors.astype(np.float64), axis=1), 1.0, atol=1e-5
    )


def test_extract_csv_format_feeds_engine_cli(tmp_path, text_corpus):
    from distinct.cli import main as engine_main

    out = tmp_path / "emb.csv"
    assert main([
        "extract", "--modality", "text", "--model", "hash-text-384",
        "--manifest", str(text_corpus), "--out", str(out), "--format", "csv",
    ]) == 0
    report = tmp_path / "report.json"
    code = engine_main([
        "test", "--table-a", str(out),
        "--group-a", "human", "--group-b", "model",
        "--permutations", "49", "--seed", "3", "--out", str(report),
    ])
    assert code == 0
    assert b'"p_value"' in report.read_bytes()


def test_extract_bad_manifest_exits_nonzero(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("wrong,header\n")
    code = main([
        "extract", "--modality", "text", "--model", "hash-text-384",
        "--manifest", str(bad), "--out", str(tmp_path / "x.mmde"),
    ])
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_similarity_command(tmp_path, image_corpus, capsys):
    pytest.importorskip("skimage")
    out = tmp_path / "pairs.csv"
    code = main([
        "similarity", "--candidates", str(image_corpus),
        "--references", str(image_corpus), "--metric", "ssim",
        "--out", str(out),
    ])
    assert code == 0
    # 2 labels x (2 candidates x 2 references) same-stratum pairs
    assert "8 pairs" in capsys.readouterr().err


def test_reduce_command_without_backend(tmp_path, text_corpus, capsys):
    try:
        import umap  # noqa: F401
    except ImportError:
        pass
    else:
        pytest.skip("umap-learn installed; absence path not reachable")
    emb = tmp_path / "emb.mmde"
    main([
        "extract", "--modality", "text", "--model", "hash-text-384",
        "--manifest", str(text_corpus), "--out", str(emb),
    ])
    code = main([
        "reduce", "--in", str(emb), "--out", str(tmp_path / "r.mmde"), "--dims", "2",
    ])
    assert code == 1
    assert "umap-learn" in capsys.readouterr().err
