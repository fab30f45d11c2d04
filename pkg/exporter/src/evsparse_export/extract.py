"""Pull softmax-layer parameters and feature vectors out of a checkpoint.

The checkpoint must hold a whole ``nn.Module`` (``torch.save(model)``),
since feature capture needs a runnable network. The layer identifier is
the qualified name from ``named_modules()`` of the linear layer feeding
the softmax; its input during a forward pass is the feature vector, its
weight/bias are the class-major parameters. Inputs with more than one
trailing dimension are flattened row-major before the length check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch
from torch import nn


class ExportError(ValueError):
    pass


@dataclass(frozen=True)
class ExtractedLayer:
    weights: np.ndarray  # class-major (K, J)
    bias: np.ndarray  # (K,)

    @property
    def num_classes(self) -> int:
        return self.weights.shape[0]

    @property
    def num_features(self) -> int:
        return self.weights.shape[1]


def load_checkpoint(path: str) -> nn.Module:
    model = torch.load(path, map_location="cpu", weights_only=False)
    if not isinstance(model, nn.Module):
        raise ExportError(
            f"checkpoint {path!r} does not hold a module (got {type(model).__name__}); "
            "save the full model, not a state dict"
        )
    model.eval()
    return model


def _find_layer(model: nn.Module, layer_identifier: str) -> nn.Module:
    layers = dict(model.named_modules())
    if layer_identifier not in layers:
        linear_names = [name for name, mod in layers.items() if isinstance(mod, nn.Linear)]
        raise ExportError(
            f"no layer named {layer_identifier!r}; linear layers present: {linear_names}"
        )
    return layers[layer_identifier]


def export_last_layer(checkpoint_path: str, layer_identifier: str) -> ExtractedLayer:
    """Extract the terminal linear layer's class-major weights and bias."""
    model = load_checkpoint(checkpoint_path)
    layer = _find_layer(model, layer_identifier)
    if not isinstance(layer, nn.Linear):
        raise ExportError(
            f"layer {layer_identifier!r} is {type(layer).__name__}, expected a linear layer"
        )
    weights = layer.weight.detach().cpu().numpy().astype(np.float64)
    if layer.bias is not None:
        bias = layer.bias.detach().cpu().numpy().astype(np.float64)
    else:
        bias = np.zeros(weights.shape[0])
    return ExtractedLayer(weights=weights, bias=bias)


def export_features(checkpoint_path: str, inputs, layer_identifier: str):
    """Capture the feature vector feeding the identified layer per input.

    ``inputs`` is an iterable of (id, vector) pairs fed to the network
    one at a time. Returns ``(entries, failures)`` where entries are
    (id, feature vector) pairs in input order and failures are
    (id, message) pairs for inputs whose forward pass failed.
    """
    model = load_checkpoint(checkpoint_path)
    layer = _find_layer(model, layer_identifier)
    if not isinstance(layer, nn.Linear):
        raise ExportError(
            f"layer {layer_identifier!r} is {type(layer).__name__}, expected a linear layer"
        )
    captured: list[torch.Tensor] = []

    def grab(_module, args):
        captured.append(args[0].detach())

    handle = layer.register_forward_pre_hook(grab)
    entries = []
    failures = []
    try:
        with torch.no_grad():
            for input_id, vector in inputs:
                captured.clear()
                try:
                    x = torch.as_tensor(np.asarray(vector), dtype=torch.float32)
                    model(x.unsqueeze(0))
                    if not captured:
                        raise ExportError("forward pass never reached the layer")
                    phi = captured[-1].reshape(-1).cpu().numpy().astype(np.float64)
                    if phi.size != layer.in_features:
                        raise ExportError(
                            f"captured {phi.size} features, layer expects {layer.in_features}"
                        )
                    entries.append((input_id, phi))
                except Exception as exc:
                    failures.append((input_id, str(exc)))
    finally:
        handle.remove()
    return entries, failures
