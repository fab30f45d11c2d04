"""Checkpoint export CLI.

``evsparse-export model`` writes the terminal layer as a model file;
``evsparse-export features`` runs a batch of raw inputs through the
network and writes the captured feature vectors as a batch file. Both
artifacts feed directly into the sparsification CLI. Exit codes match
it: 0 success, 1 validation error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import sys

from . import extract, formats

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evsparse-export",
        description="Export softmax-layer parameters and features from a PyTorch checkpoint.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    mod = sub.add_parser("model", help="write the terminal linear layer as a model file")
    mod.add_argument("--checkpoint", required=True, help="torch.save()d full module")
    mod.add_argument("--layer", required=True, help="qualified layer name (named_modules)")
    mod.add_argument("--out", required=True, help="model file output path")

    feat = sub.add_parser("features", help="capture feature vectors for a batch of inputs")
    feat.add_argument("--checkpoint", required=True)
    feat.add_argument("--layer", required=True)
    feat.add_argument("--inputs", required=True, help="batch file of raw network inputs")
    feat.add_argument("--out", required=True, help="batch file of captured features")
    return parser


def _cmd_model(args) -> int:
    layer = extract.export_last_layer(args.checkpoint, args.layer)
    formats.write_model_file(layer.weights, layer.bias, args.out)
    print(f"{layer.num_classes} classes x {layer.num_features} features -> {args.out}")
    return EXIT_OK


def _cmd_features(args) -> int:
    _, inputs = formats.read_batch_file(args.inputs)
    entries, failures = extract.export_features(args.checkpoint, inputs, args.layer)
    if entries:
        num_features = entries[0][1].size
    else:
        layer = extract.export_last_layer(args.checkpoint, args.layer)
        num_features = layer.num_features
    formats.write_batch_file(entries, num_features, args.out)
    print(f"{len(entries)} feature vectors -> {args.out}")
    if failures:
        for input_id, message in failures:
            print(f"failed {input_id}: {message}", file=sys.stderr)
        print(f"{len(failures)} input(s) failed", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {"model": _cmd_model, "features": _cmd_features}
    try:
        return handlers[args.command](args)
    except (extract.ExportError, formats.FormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
