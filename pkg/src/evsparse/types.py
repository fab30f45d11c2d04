"""Domain types shared across the toolkit.

Dense categorical distributions are plain float ndarrays summing to 1;
only structured values (trained layer parameters, filtered distributions,
keep/drop reports) get dataclasses.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


def _as_float_array(values, name: str, ndim: int) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != ndim:
        raise ValidationError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    bad = np.argwhere(~np.isfinite(arr))
    if bad.size:
        idx = tuple(int(i) for i in bad[0])
        raise ValidationError(f"non-finite entry in {name} at index {idx}")
    return arr


@dataclass(frozen=True)
class LastLayerParams:
    """Raw trained softmax-layer parameters.

    ``weights`` is class-major (K rows, one per latent class; J feature
    columns) so a class logit is a row dot product. ``bias`` has length K.
    """

    weights: np.ndarray
    bias: np.ndarray
    class_labels: tuple[str, ...] | None = None

    def __post_init__(self):
        w = _as_float_array(self.weights, "weights", 2)
        b = _as_float_array(self.bias, "bias", 1)
        if w.shape[0] < 2:
            raise ValidationError(f"need at least 2 classes, got {w.shape[0]}")
        if w.shape[1] < 1:
            raise ValidationError("need at least 1 feature column")
        if b.shape[0] != w.shape[0]:
            raise ValidationError(
                f"bias length {b.shape[0]} does not match {w.shape[0]} classes"
            )
        if self.class_labels is not None and len(self.class_labels) != w.shape[0]:
            raise ValidationError("class_labels length does not match class count")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", b)

    @property
    def num_classes(self) -> int:
        return self.weights.shape[0]

    @property
    def num_features(self) -> int:
        return self.weights.shape[1]


@dataclass(frozen=True)
class CenteredParams:
    """Layer parameters with the per-feature class mean removed.

    Every weight column and the bias vector sum to zero over classes.
    """

    beta: np.ndarray
    beta0: np.ndarray

    @property
    def num_classes(self) -> int:
        return self.beta.shape[0]

    @property
    def num_features(self) -> int:
        return self.beta.shape[1]


@dataclass(frozen=True)
class EvidentialWeights:
    """Per-class net evidence and its positive/negative split.

    ``w_plus - w_minus == w`` and ``w_plus * w_minus == 0`` elementwise;
    the positive part supports the class, the negative part its complement.
    """

    w: np.ndarray
    w_plus: np.ndarray
    w_minus: np.ndarray

    @classmethod
    def from_w(cls, w) -> "EvidentialWeights":
        w = _as_float_array(w, "w", 1)
        return cls(w=w, w_plus=np.maximum(0.0, w), w_minus=np.maximum(0.0, -w))

    @property
    def num_classes(self) -> int:
        return self.w.shape[0]


@dataclass(frozen=True)
class SingletonMassReport:
    """Which classes carry strictly positive singleton belief mass.

    ``w`` is the evidence vector the decision was made from;
    ``all_vacuous`` is set when no class receives direct evidence.
    """

    keep_mask: np.ndarray
    w: np.ndarray
    all_vacuous: bool


@dataclass(frozen=True)
class SparseDistribution:
    """A categorical distribution restricted to an explicit support set.

    ``support`` holds strictly increasing class indices in ``[0, num_classes)``
    and ``probs`` the matching positive probabilities (sum 1). When the
    belief-mass filter found no evidence anywhere, ``vacuous_fallback`` is
    set and the distribution is the unfiltered input.
    """

    support: np.ndarray
    probs: np.ndarray
    num_classes: int
    vacuous_fallback: bool = False

    def __post_init__(self):
        support = np.asarray(self.support, dtype=np.int64)
        probs = _as_float_array(self.probs, "probs", 1)
        if support.ndim != 1 or support.size == 0:
            raise ValidationError("support must be a non-empty index vector")
        if support.size != probs.size:
            raise ValidationError("support and probs lengths differ")
        if np.any(np.diff(support) <= 0):
            raise ValidationError("support indices must be strictly increasing")
        if support[0] < 0 or support[-1] >= self.num_classes:
            raise ValidationError("support index out of range")
        if np.any(probs <= 0.0):
            raise ValidationError("every supported probability must be positive")
        if abs(probs.sum() - 1.0) > 1e-12 * self.num_classes:
            raise ValidationError(f"probs sum to {probs.sum()!r}, expected 1")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "probs", probs)

    def dense(self) -> np.ndarray:
        """Expand to a length-``num_classes`` vector with zeros off support."""
        out = np.zeros(self.num_classes)
        out[self.support] = self.probs
        return out

    @property
    def support_size(self) -> int:
        return int(self.support.size)


def validate_distribution(probs, num_classes: int | None = None) -> np.ndarray:
    """Check a dense categorical distribution: nonnegative, sums to 1."""
    p = _as_float_array(probs, "probs", 1)
    if num_classes is not None and p.shape[0] != num_classes:
        raise ValidationError(f"expected {num_classes} classes, got {p.shape[0]}")
    if np.any(p < 0.0):
        raise ValidationError("negative probability entry")
    if abs(p.sum() - 1.0) > 1e-12 * p.shape[0]:
        raise ValidationError(f"probabilities sum to {p.sum()!r}, expected 1")
    return p
