"""Checkpoint-to-text-format exporter for the sparsification pipeline.

No filtering math lives here: the exporter only extracts the terminal
linear layer and the feature vectors feeding it, in the pipeline's
interchange formats.
"""

from .extract import ExportError, ExtractedLayer, export_features, export_last_layer
from .formats import FormatError, read_batch_file, write_batch_file, write_model_file

__version__ = "0.1.0"

__all__ = [
    "ExportError",
    "ExtractedLayer",
    "export_features",
    "export_last_layer",
    "FormatError",
    "read_batch_file",
    "write_batch_file",
    "write_model_file",
]
