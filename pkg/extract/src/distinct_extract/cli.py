"""distinct-extract <extract|reduce|similarity> [flags]"""

from __future__ import annotations

import argparse
import sys

from .jobs import ExtractJob, extract, read_manifest
from .similarity import export_similarity_pairs
from .umap_reduce import reduce_umap


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="distinct-extract")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="encode a manifest into an interchange table")
    p.add_argument("--modality", choices=["text", "image"], required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--manifest", required=True, help="CSV with header id,label,path")
    p.add_argument("--out", required=True)
    p.add_argument("--no-normalize", action="store_true")
    p.add_argument("--format", choices=["binary", "csv"], default="binary")

    p = sub.add_parser("reduce", help="UMAP-reduce an interchange table")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--dims", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--metric", default="cosine")

    p = sub.add_parser("similarity", help="export pairwise SSIM/LPIPS values")
    p.add_argument("--candidates", required=True, help="manifest CSV")
    p.add_argument("--references", required=True, help="manifest CSV")
    p.add_argument("--metric", choices=["ssim", "lpips"], required=True)
    p.add_argument("--out", required=True)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "extract":
            job = ExtractJob(
                modality=args.modality,
                model_id=args.model,
                manifest=read_manifest(args.manifest),
                output=args.out,
                normalize=not args.no_normalize,
                output_format=args.format,
            )
            result = extract(job)
            print(f"{result.written} records, dim={result.dim}", file=sys.stderr)
            for rid, path, reason in result.failures:
                print(f"skipped {rid} ({path}): {reason}", file=sys.stderr)
        elif args.command == "reduce":
            count, dim = reduce_umap(args.input, args.out, args.dims,
                                     seed=args.seed, metric=args.metric)
            print(f"{count} records, dim={dim}", file=sys.stderr)
        else:
            count, failures = export_similarity_pairs(
                read_manifest(args.candidates), read_manifest(args.references),
                args.metric, args.out,
            )
            print(f"{count} pairs", file=sys.stderr)
            for cid, rid, reason in failures:
                print(f"failed {cid}/{rid}: {reason}", file=sys.stderr)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
