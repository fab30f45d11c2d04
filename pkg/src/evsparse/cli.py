"""Command line surface.

Subcommands: ``sparsify`` (batch filtering with structured/CSV reports
and optional figures), ``oracle`` (power-set validation of the closed
forms), ``metrics`` (distances between two result files), ``target``
(sparse reference distribution from a binary-query result pair).

Exit codes: 0 success, 1 validation error, 2 numerical-guard violation,
3 I/O error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import io, metrics, oracle, report
from .errors import (
    EXIT_IO,
    EXIT_NUMERICAL,
    EXIT_OK,
    EXIT_VALIDATION,
    NumericalGuardError,
    ValidationError,
)

ORACLE_TOLERANCE = 1e-9


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evsparse",
        description="Post hoc sparsification of softmax latent distributions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("sparsify", help="filter a batch of inputs through a model")
    sp.add_argument("--model", required=True, help="model file path")
    sp.add_argument("--inputs", required=True, help="batch file path")
    sp.add_argument(
        "--method",
        choices=io.METHODS,
        default="evidential",
        help="output transformation (default: evidential)",
    )
    sp.add_argument(
        "--tol",
        type=float,
        default=1e-12,
        help="zero-evidence tolerance, relative to max(1, max|w|) (default: 1e-12)",
    )
    sp.add_argument("--out", required=True, help="report output path")
    sp.add_argument(
        "--emit",
        choices=("structured", "csv"),
        default="structured",
        help="report format (default: structured)",
    )
    sp.add_argument("--figures", help="directory for per-input bar charts (optional)")
    sp.add_argument(
        "--workers",
        type=int,
        default=None,
        help="parallel workers (default: $EVSPARSE_WORKERS or 1)",
    )

    orc = sub.add_parser("oracle", help="validate closed forms against the power set")
    orc.add_argument("--model", required=True)
    orc.add_argument("--inputs", required=True)
    orc.add_argument(
        "--max-k",
        type=int,
        default=12,
        help="largest class count to enumerate (default: 12)",
    )

    met = sub.add_parser("metrics", help="distances between two result files")
    met.add_argument("--a", required=True, help="first results file")
    met.add_argument("--b", required=True, help="second results file")
    met.add_argument("--out", help="write the CSV table here instead of stdout")
    met.add_argument("--figures", help="directory for per-pair comparison charts")

    tgt = sub.add_parser("target", help="binary-query target distribution")
    tgt.add_argument("--a", required=True, help="results for the query")
    tgt.add_argument("--b", required=True, help="results for the complement query")
    tgt.add_argument("--out", required=True, help="report output path")
    tgt.add_argument("--emit", choices=("structured", "csv"), default="structured")
    return parser


def _cmd_sparsify(args) -> int:
    model = io.load_model(args.model)
    batch = io.load_batch(args.inputs)
    records, failures = io.run_batch(
        model, batch, method=args.method, tol=args.tol, workers=args.workers
    )
    io.write_report(records, args.out, fmt=args.emit)
    if args.figures:
        report.render_batch_figures(records, args.figures, class_labels=model.class_labels)
    print(f"{len(records)} inputs -> {args.out}")
    if failures:
        for input_id, message in failures:
            print(f"failed {input_id}: {message}", file=sys.stderr)
        print(f"{len(failures)} input(s) failed", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


def _cmd_oracle(args) -> int:
    model = io.load_model(args.model)
    batch = io.load_batch(args.inputs)
    if model.num_classes > args.max_k:
        raise NumericalGuardError(
            f"model has {model.num_classes} classes, above the --max-k {args.max_k} budget"
        )
    worst_plaus = 0.0
    worst_fused = 0.0
    fused_checked = 0
    mismatches = 0
    for item in batch.inputs:
        check = oracle.equivalence_check(model, item.features)
        worst_plaus = max(worst_plaus, check.plausibility_vs_softmax)
        if check.fused_vs_closed is not None:
            worst_fused = max(worst_fused, check.fused_vs_closed)
            fused_checked += 1
        mismatches += check.sign_mismatches
    print(f"inputs checked: {len(batch.inputs)}")
    print(f"max |plausibility - softmax|: {worst_plaus:.3e}")
    if fused_checked:
        print(f"max |fused - closed form|: {worst_fused:.3e} ({fused_checked} inputs)")
    else:
        print("fusion check skipped (class count above enumeration budget)")
    print(f"singleton sign mismatches: {mismatches}")
    if worst_plaus > ORACLE_TOLERANCE or worst_fused > ORACLE_TOLERANCE or mismatches:
        print(f"deviation above {ORACLE_TOLERANCE:g}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def _pair_records(path_a: str, path_b: str):
    records_a = io.read_report(path_a)
    records_b = io.read_report(path_b)
    by_id = {rec.input_id: rec for rec in records_b}
    missing = [rec.input_id for rec in records_a if rec.input_id not in by_id]
    if missing or len(records_a) != len(records_b):
        raise ValidationError(
            f"result files do not pair up by id (unmatched: {missing[:5]!r})"
        )
    return [(rec.input_id, rec, by_id[rec.input_id]) for rec in records_a]


def _cmd_metrics(args) -> int:
    pairs = _pair_records(args.a, args.b)
    lines = ["id,wasserstein1,bhattacharyya,support_a,support_b,reduction_a,reduction_b"]
    w_values, b_values = [], []
    for input_id, rec_a, rec_b in pairs:
        dist_w = metrics.wasserstein1(rec_a.distribution, rec_b.distribution)
        dist_b = metrics.bhattacharyya(rec_a.distribution, rec_b.distribution)
        size_a, red_a = rec_a.support_stats
        size_b, red_b = rec_b.support_stats
        w_values.append(dist_w)
        b_values.append(dist_b)
        lines.append(
            f"{input_id},{dist_w:.9g},{dist_b:.9g},{size_a},{size_b},{red_a:.9g},{red_b:.9g}"
        )
    if pairs:
        lines.append(f"mean,{np.mean(w_values):.9g},{np.mean(b_values):.9g},,,,")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"{len(pairs)} pairs -> {args.out}")
    else:
        sys.stdout.write(text)
    if args.figures:
        report.render_pair_figures(pairs, args.figures)
    return EXIT_OK


def _cmd_target(args) -> int:
    pairs = _pair_records(args.a, args.b)
    records = []
    for input_id, rec_a, rec_b in pairs:
        target = metrics.target_distribution(rec_a.softmax_probs, rec_b.softmax_probs)
        records.append(
            io.ResultRecord(
                input_id=input_id,
                method="target",
                distribution=target,
                softmax_probs=rec_a.softmax_probs,
                w=None,
            )
        )
    io.write_report(records, args.out, fmt=args.emit)
    print(f"{len(records)} targets -> {args.out}")
    return EXIT_OK


_COMMANDS = {
    "sparsify": _cmd_sparsify,
    "oracle": _cmd_oracle,
    "metrics": _cmd_metrics,
    "target": _cmd_target,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalGuardError as exc:
        print(f"numerical guard: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
