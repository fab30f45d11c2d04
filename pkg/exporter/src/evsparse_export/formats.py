"""Writers and a reader for the evsparse text interchange formats.

The sparsification pipeline defines the formats; this module reproduces
them byte for byte (schema_version header, ``kind`` tag, repr-formatted
floats) so exported artifacts feed straight into its CLI.
"""

from __future__ import annotations

import numpy as np

SCHEMA_VERSION = 1


class FormatError(ValueError):
    pass


def _values(vector) -> str:
    return " ".join(repr(float(v)) for v in vector)


def write_model_file(weights, bias, path: str, class_labels=None) -> None:
    """Write class-major layer parameters as a model file."""
    weights = np.asarray(weights, dtype=np.float64)
    bias = np.asarray(bias, dtype=np.float64)
    num_classes, num_features = weights.shape
    if bias.shape != (num_classes,):
        raise FormatError(f"bias shape {bias.shape} does not match {num_classes} classes")
    if not (np.all(np.isfinite(weights)) and np.all(np.isfinite(bias))):
        raise FormatError("non-finite parameter value")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"schema_version {SCHEMA_VERSION}\nkind model\n")
        fh.write(f"classes {num_classes}\nfeatures {num_features}\n")
        fh.write(f"bias {_values(bias)}\n")
        for k in range(num_classes):
            fh.write(f"weights {k} {_values(weights[k])}\n")
        if class_labels is not None:
            for k, label in enumerate(class_labels):
                fh.write(f"label {k} {label}\n")


def write_batch_file(entries, num_features: int, path: str) -> None:
    """Write (id, feature vector) pairs as a batch file."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"schema_version {SCHEMA_VERSION}\nkind batch\n")
        fh.write(f"features {num_features}\n")
        for input_id, features in entries:
            features = np.asarray(features, dtype=np.float64)
            if features.shape != (num_features,):
                raise FormatError(
                    f"input {input_id!r} has {features.shape} features, expected {num_features}"
                )
            fh.write(f"input {input_id} {_values(features)}\n")


def read_batch_file(path: str):
    """Parse a batch file into (num_features, [(id, vector), ...])."""
    entries = []
    num_features = None
    with open(path, "r", encoding="utf-8") as fh:
        for number, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            tokens = text.split()
            key = tokens[0]
            if key == "schema_version":
                if int(tokens[1]) != SCHEMA_VERSION:
                    raise FormatError(f"{path}:{number}: unsupported schema_version")
            elif key == "kind":
                if tokens[1] != "batch":
                    raise FormatError(f"{path}:{number}: expected kind batch")
            elif key == "features":
                num_features = int(tokens[1])
            elif key == "input":
                if num_features is None:
                    raise FormatError(f"{path}:{number}: input before features")
                values = np.array([float(t) for t in tokens[2:]])
                if values.shape != (num_features,):
                    raise FormatError(
                        f"{path}:{number}: expected {num_features} values, got {values.size}"
                    )
                entries.append((tokens[1], values))
            else:
                raise FormatError(f"{path}:{number}: unknown key {key!r}")
    if num_features is None:
        raise FormatError(f"{path}: missing features line")
    return num_features, entries
