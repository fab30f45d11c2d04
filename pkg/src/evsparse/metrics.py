"""Distribution comparison metrics and support diagnostics.

The 1-Wasserstein distance uses unit-spaced class indices as the ground
metric. Class indices are nominally unordered, so this is a convention
(the one used by standard scalar-sample distance tooling), documented
here because it affects absolute values but not method rankings on a
fixed class ordering.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError
from .types import SparseDistribution, _as_float_array


def _dense(dist, num_classes: int | None = None) -> np.ndarray:
    """Coerce a dense vector or a SparseDistribution to a dense view."""
    if isinstance(dist, SparseDistribution):
        d = dist.dense()
    else:
        d = _as_float_array(dist, "distribution", 1)
    if num_classes is not None and d.shape[0] != num_classes:
        raise ValidationError(
            f"distributions disagree on class count: {d.shape[0]} vs {num_classes}"
        )
    return d


def target_distribution(p_y, p_ybar) -> SparseDistribution:
    """Sparse reference distribution from a binary-query pair.

    Keeps the classes where the first conditional is at least as large as
    its complement-query counterpart (ties kept), with probabilities
    proportional to the first conditional on that support.
    """
    p = _dense(p_y)
    q = _dense(p_ybar, p.shape[0])
    keep = p >= q
    total = p[keep].sum()
    if total <= 0.0:
        raise ValidationError("target distribution has numerically empty support")
    support = np.flatnonzero(keep & (p > 0.0))
    return SparseDistribution(
        support=support,
        probs=p[support] / total,
        num_classes=p.shape[0],
        vacuous_fallback=False,
    )


def bhattacharyya(p, q, smoothing: float = 0.0) -> float:
    """Bhattacharyya distance ``-ln sum_k sqrt(p_k q_k)``.

    Disjoint supports give ``+inf`` by definition. Pass a positive
    ``smoothing`` epsilon (added to every class, then renormalized) to
    force finite values for plotting; it is off by default.
    """
    dp = _dense(p)
    dq = _dense(q, dp.shape[0])
    if smoothing > 0.0:
        dp = (dp + smoothing) / (dp + smoothing).sum()
        dq = (dq + smoothing) / (dq + smoothing).sum()
    coeff = np.sqrt(dp * dq).sum()
    if coeff <= 0.0:
        return float("inf")
    # clamp the -0.0 / tiny-negative results of coeff rounding up to 1
    return max(0.0, float(-np.log(coeff)))


def wasserstein1(p, q) -> float:
    """1-Wasserstein distance with ground metric ``|i - j|`` on indices.

    For unit-spaced points this is the L1 distance between the CDFs.
    """
    dp = _dense(p)
    dq = _dense(q, dp.shape[0])
    return float(np.abs(np.cumsum(dp - dq)).sum())


def support_stats(dist: SparseDistribution) -> tuple[int, float]:
    """Support size and the fraction of classes filtered out."""
    size = dist.support_size
    return size, 1.0 - size / dist.num_classes
