"""Interchange formats and the batch runner.

Everything on disk is line-oriented text: whitespace-separated tokens,
blank lines and ``#`` comments ignored, an explicit ``schema_version``
first and a ``kind`` tag second. Three kinds exist:

model::

    schema_version 1
    kind model
    classes 2
    features 1
    bias 0.5 -0.5
    weights 0 1.0        # class-major: one line per class, J values
    weights 1 -1.0
    label 0 even         # optional display labels

batch::

    schema_version 1
    kind batch
    features 1
    input q0 2.0         # unique id, then J feature values

results (written by :func:`write_report`, read back by
:func:`read_report`)::

    schema_version 1
    kind results
    classes 2
    record q0
    method evidential
    vacuous false
    support 0
    probs 1
    softmax 0.993307149 0.00669285092
    w 2.5 -2.5
    end

Probabilities are printed with 9 significant digits, which keeps the
write/read round trip well inside 1e-9. The CSV emission is a flat
export of the same records for spreadsheets; only the structured format
is read back.
"""

from __future__ import annotations

import csv
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import baselines, core
from .errors import ValidationError
from .types import LastLayerParams, SparseDistribution

SCHEMA_VERSION = 1
METHODS = ("evidential", "sparsemax", "softmax")

CSV_HEADER = [
    "id",
    "method",
    "vacuous_fallback",
    "support_size",
    "reduction_fraction",
    "support",
    "probs",
    "softmax",
    "w",
]

WORKER_COUNT_ENV = "EVSPARSE_WORKERS"


@dataclass(frozen=True)
class BatchInput:
    input_id: str
    features: np.ndarray


@dataclass(frozen=True)
class Batch:
    num_features: int
    inputs: tuple[BatchInput, ...]


@dataclass(frozen=True, eq=False)
class ResultRecord:
    """One input's outcome: the sparse result plus diagnostic vectors."""

    input_id: str
    method: str
    distribution: SparseDistribution
    softmax_probs: np.ndarray
    w: np.ndarray | None = None

    @property
    def support_stats(self) -> tuple[int, float]:
        size = self.distribution.support_size
        return size, 1.0 - size / self.distribution.num_classes


def _fmt(values) -> str:
    return " ".join(f"{v:.9g}" for v in values)


class _LineReader:
    """Tokenized line iterator with positions for error messages."""

    def __init__(self, path: str):
        self.path = path
        with open(path, "r", encoding="utf-8") as fh:
            raw = fh.readlines()
        self.lines = []
        for number, text in enumerate(raw, start=1):
            stripped = text.strip()
            if not stripped or stripped.startswith("#"):
                continue
            self.lines.append((number, stripped.split()))
        self.pos = 0

    def error(self, number: int, message: str) -> ValidationError:
        return ValidationError(f"{self.path}:{number}: {message}")

    def next(self, expected_key: str | None = None):
        if self.pos >= len(self.lines):
            raise ValidationError(f"{self.path}: unexpected end of file")
        number, tokens = self.lines[self.pos]
        self.pos += 1
        if expected_key is not None:
            if tokens[0] != expected_key:
                raise self.error(number, f"expected '{expected_key}', found '{tokens[0]}'")
            if len(tokens) < 2:
                raise self.error(number, f"'{expected_key}' line needs a value")
        return number, tokens

    def peek_key(self) -> str | None:
        if self.pos >= len(self.lines):
            return None
        return self.lines[self.pos][1][0]

    @property
    def exhausted(self) -> bool:
        return self.pos >= len(self.lines)


def _parse_floats(reader: _LineReader, number: int, tokens: list[str], count: int, what: str):
    if len(tokens) != count:
        raise reader.error(number, f"expected {count} values for {what}, found {len(tokens)}")
    try:
        values = np.array([float(t) for t in tokens])
    except ValueError as exc:
        raise reader.error(number, f"bad number in {what}: {exc}") from None
    if not np.all(np.isfinite(values)):
        raise reader.error(number, f"non-finite value in {what}")
    return values


def _parse_int(reader: _LineReader, number: int, token: str, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise reader.error(number, f"bad integer for {what}: {token!r}") from None


def _parse_header(reader: _LineReader, kind: str) -> None:
    number, tokens = reader.next("schema_version")
    version = _parse_int(reader, number, tokens[1], "schema_version")
    if version != SCHEMA_VERSION:
        raise reader.error(number, f"unsupported schema_version {version}")
    number, tokens = reader.next("kind")
    if tokens[1] != kind:
        raise reader.error(number, f"expected kind '{kind}', found '{tokens[1]}'")


def load_model(path: str) -> LastLayerParams:
    """Parse and validate a model file into layer parameters."""
    reader = _LineReader(path)
    _parse_header(reader, "model")
    number, tokens = reader.next("classes")
    num_classes = _parse_int(reader, number, tokens[1], "classes")
    number, tokens = reader.next("features")
    num_features = _parse_int(reader, number, tokens[1], "features")
    bias = None
    weights: dict[int, np.ndarray] = {}
    labels: dict[int, str] = {}
    while not reader.exhausted:
        number, tokens = reader.next()
        key = tokens[0]
        if len(tokens) < 2:
            raise reader.error(number, f"{key!r} line needs a value")
        if key == "bias":
            if bias is not None:
                raise reader.error(number, "duplicate bias line")
            bias = _parse_floats(reader, number, tokens[1:], num_classes, "bias")
        elif key == "weights":
            row = _parse_int(reader, number, tokens[1], "weights row index")
            if not 0 <= row < num_classes:
                raise reader.error(number, f"weights row {row} out of range")
            if row in weights:
                raise reader.error(number, f"duplicate weights row {row}")
            weights[row] = _parse_floats(
                reader, number, tokens[2:], num_features, f"weights row {row}"
            )
        elif key == "label":
            index = _parse_int(reader, number, tokens[1], "label index")
            if not 0 <= index < num_classes:
                raise reader.error(number, f"label index {index} out of range")
            labels[index] = " ".join(tokens[2:])
        else:
            raise reader.error(number, f"unknown model key {key!r}")
    if bias is None:
        raise ValidationError(f"{path}: missing bias line")
    missing = [k for k in range(num_classes) if k not in weights]
    if missing:
        raise ValidationError(f"{path}: missing weights row(s) {missing}")
    class_labels = None
    if labels:
        class_labels = tuple(labels.get(k, str(k)) for k in range(num_classes))
    return LastLayerParams(
        weights=np.stack([weights[k] for k in range(num_classes)]),
        bias=bias,
        class_labels=class_labels,
    )


def save_model(params: LastLayerParams, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"schema_version {SCHEMA_VERSION}\nkind model\n")
        fh.write(f"classes {params.num_classes}\nfeatures {params.num_features}\n")
        fh.write(f"bias {' '.join(repr(float(v)) for v in params.bias)}\n")
        for k in range(params.num_classes):
            fh.write(f"weights {k} {' '.join(repr(float(v)) for v in params.weights[k])}\n")
        if params.class_labels is not None:
            for k, label in enumerate(params.class_labels):
                fh.write(f"label {k} {label}\n")


def load_batch(path: str) -> Batch:
    """Parse a batch of feature vectors, enforcing unique ids."""
    reader = _LineReader(path)
    _parse_header(reader, "batch")
    number, tokens = reader.next("features")
    num_features = _parse_int(reader, number, tokens[1], "features")
    inputs = []
    seen = set()
    while not reader.exhausted:
        number, tokens = reader.next("input")
        input_id = tokens[1]
        if input_id in seen:
            raise reader.error(number, f"duplicate input id {input_id!r}")
        seen.add(input_id)
        features = _parse_floats(
            reader, number, tokens[2:], num_features, f"input {input_id}"
        )
        inputs.append(BatchInput(input_id=input_id, features=features))
    return Batch(num_features=num_features, inputs=tuple(inputs))


def save_batch(batch: Batch, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"schema_version {SCHEMA_VERSION}\nkind batch\n")
        fh.write(f"features {batch.num_features}\n")
        for item in batch.inputs:
            fh.write(f"input {item.input_id} {' '.join(repr(float(v)) for v in item.features)}\n")


def evaluate_one(
    model: LastLayerParams, features, input_id: str, method: str, tol: float = 1e-12
) -> ResultRecord:
    """Run one input through the requested method."""
    if method not in METHODS:
        raise ValidationError(f"unknown method {method!r}, expected one of {METHODS}")
    logit_values = core.logits(model, features)
    softmax_probs = core.softmax(logit_values)
    ew = core.evidential_weights(core.center_params(model), features)
    if method == "evidential":
        report = core.singleton_mass_signs(ew, core.default_tolerance(ew, tol))
        dist = core.filter_distribution(softmax_probs, report)
    elif method == "sparsemax":
        dist = baselines.sparsemax(logit_values)
    else:
        support = np.flatnonzero(softmax_probs > 0.0)
        dist = SparseDistribution(
            support=support,
            probs=softmax_probs[support],
            num_classes=model.num_classes,
            vacuous_fallback=False,
        )
    return ResultRecord(
        input_id=input_id,
        method=method,
        distribution=dist,
        softmax_probs=softmax_probs,
        w=ew.w,
    )


def _evaluate_star(args) -> ResultRecord:
    return evaluate_one(*args)


def run_batch(
    model: LastLayerParams,
    batch: Batch,
    method: str = "evidential",
    tol: float = 1e-12,
    workers: int | None = None,
):
    """Evaluate every batch input, collecting per-input failures.

    Records come back in batch order regardless of worker count. Returns
    ``(records, failures)`` where failures is a list of (id, message)
    pairs for inputs that could not be evaluated.
    """
    if method not in METHODS:
        raise ValidationError(f"unknown method {method!r}, expected one of {METHODS}")
    if workers is None:
        workers = int(os.environ.get(WORKER_COUNT_ENV, "1"))
    records: list[ResultRecord] = []
    failures: list[tuple[str, str]] = []
    jobs = [(model, item.features, item.input_id, method, tol) for item in batch.inputs]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_evaluate_star, job) for job in jobs]
            for item, future in zip(batch.inputs, futures):
                try:
                    records.append(future.result())
                except Exception as exc:
                    failures.append((item.input_id, str(exc)))
    else:
        for job, item in zip(jobs, batch.inputs):
            try:
                records.append(_evaluate_star(job))
            except Exception as exc:
                failures.append((item.input_id, str(exc)))
    return records, failures


def write_report(records, path: str, fmt: str = "structured") -> None:
    """Emit records as structured text or CSV with a fixed field order."""
    if fmt == "structured":
        _write_structured(records, path)
    elif fmt == "csv":
        _write_csv(records, path)
    else:
        raise ValidationError(f"unknown report format {fmt!r}")


def _write_structured(records, path: str) -> None:
    counts = {rec.distribution.num_classes for rec in records}
    if len(counts) > 1:
        raise ValidationError(f"records mix class counts {sorted(counts)}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"schema_version {SCHEMA_VERSION}\nkind results\n")
        if records:
            fh.write(f"classes {records[0].distribution.num_classes}\n")
        for rec in records:
            fh.write(f"record {rec.input_id}\n")
            fh.write(f"method {rec.method}\n")
            fh.write(f"vacuous {'true' if rec.distribution.vacuous_fallback else 'false'}\n")
            fh.write(f"support {' '.join(str(i) for i in rec.distribution.support)}\n")
            fh.write(f"probs {_fmt(rec.distribution.probs)}\n")
            fh.write(f"softmax {_fmt(rec.softmax_probs)}\n")
            if rec.w is not None:
                fh.write(f"w {_fmt(rec.w)}\n")
            fh.write("end\n")


def _write_csv(records, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for rec in records:
            size, reduction = rec.support_stats
            writer.writerow(
                [
                    rec.input_id,
                    rec.method,
                    "true" if rec.distribution.vacuous_fallback else "false",
                    size,
                    f"{reduction:.9g}",
                    " ".join(str(i) for i in rec.distribution.support),
                    _fmt(rec.distribution.probs),
                    _fmt(rec.softmax_probs),
                    _fmt(rec.w) if rec.w is not None else "",
                ]
            )


def read_report(path: str) -> list[ResultRecord]:
    """Parse a structured results file back into records."""
    reader = _LineReader(path)
    _parse_header(reader, "results")
    num_classes = None
    if reader.peek_key() == "classes":
        number, tokens = reader.next("classes")
        num_classes = _parse_int(reader, number, tokens[1], "classes")
    records = []
    while not reader.exhausted:
        number, tokens = reader.next("record")
        input_id = tokens[1]
        fields: dict[str, tuple[int, list[str]]] = {}
        while True:
            number, tokens = reader.next()
            if tokens[0] == "end":
                break
            if len(tokens) < 2:
                raise reader.error(number, f"{tokens[0]!r} line needs a value")
            fields[tokens[0]] = (number, tokens[1:])
        for required in ("method", "vacuous", "support", "probs", "softmax"):
            if required not in fields:
                raise reader.error(number, f"record {input_id!r} missing {required!r}")
        if num_classes is None:
            raise ValidationError(f"{path}: records present but no classes line")
        method = fields["method"][1][0]
        vacuous = fields["vacuous"][1][0] == "true"
        support = [
            _parse_int(reader, fields["support"][0], t, "support index")
            for t in fields["support"][1]
        ]
        n_probs, probs_tokens = fields["probs"]
        probs = _parse_floats(reader, n_probs, probs_tokens, len(support), "probs")
        # 9-significant-digit emission leaves the sum ~5e-10 off exactly 1;
        # renormalize so the strict distribution invariant holds again
        probs = probs / probs.sum()
        n_soft, soft_tokens = fields["softmax"]
        softmax_probs = _parse_floats(reader, n_soft, soft_tokens, num_classes, "softmax")
        w = None
        if "w" in fields:
            n_w, w_tokens = fields["w"]
            w = _parse_floats(reader, n_w, w_tokens, num_classes, "w")
        records.append(
            ResultRecord(
                input_id=input_id,
                method=method,
                distribution=SparseDistribution(
                    support=np.array(support, dtype=np.int64),
                    probs=probs,
                    num_classes=num_classes,
                    vacuous_fallback=vacuous,
                ),
                softmax_probs=softmax_probs,
                w=w,
            )
        )
    return records
