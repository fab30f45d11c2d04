"""Baseline sparse/dense output transformations."""

from __future__ import annotations

import numpy as np

from .types import SparseDistribution, _as_float_array


def sparsemax(logit_values) -> SparseDistribution:
    """Euclidean projection of a score vector onto the probability simplex.

    Sort descending, find the largest k with ``1 + k * z_(k) > cumsum_k``,
    set ``tau = (cumsum_k(z) - 1) / k`` and clip ``z - tau`` at zero.
    Classes landing exactly on the threshold get probability zero, so the
    support is the strictly positive entries.
    """
    z = _as_float_array(logit_values, "logits", 1)
    k = z.shape[0]
    z_sorted = np.sort(z)[::-1]
    cssv = np.cumsum(z_sorted)
    ranks = np.arange(1, k + 1)
    rho = ranks[1.0 + ranks * z_sorted > cssv].max()
    tau = (cssv[rho - 1] - 1.0) / rho
    p = np.maximum(z - tau, 0.0)
    support = np.flatnonzero(p > 0.0)
    return SparseDistribution(
        support=support, probs=p[support], num_classes=k, vacuous_fallback=False
    )
