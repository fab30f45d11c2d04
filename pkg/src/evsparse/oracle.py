"""Brute-force Dempster-Shafer machinery over the full power set.

Ground truth for the closed forms in :mod:`evsparse.core`: belief masses
are dense vectors indexed by subset bitmask (bit ``k`` set means class
``k`` is in the subset), fused pairwise with Dempster's rule. Exponential
in the class count by construction; capped at ``K <= 20`` because this
module exists for validation, not production filtering.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import core
from .core import MAX_EXP_WEIGHT
from .errors import NumericalGuardError, ValidationError
from .types import EvidentialWeights, _as_float_array

MAX_POWER_SET_CLASSES = 20
MAX_FUSION_CLASSES = 12
MAX_FUSION_FEATURES = 8
TOTAL_CONFLICT_EPS = 1e-12

# clamp-and-renormalize budget for floating-point cancellation
_NEGATIVE_MASS_EPS = 1e-15
_MASS_SUM_EPS = 1e-10


def _check_class_count(num_classes: int) -> int:
    if not 1 <= num_classes <= MAX_POWER_SET_CLASSES:
        raise ValidationError(
            f"power-set representation supports 1..{MAX_POWER_SET_CLASSES} classes, "
            f"got {num_classes}"
        )
    return int(num_classes)


@dataclass(frozen=True)
class PowerSetMass:
    """Dense belief mass over all ``2**num_classes`` subsets.

    ``masses[bitmask]`` is the mass of the subset encoded by the bitmask;
    the empty set carries zero and the total is 1. Tiny negative entries
    from cancellation are clamped and the vector renormalized; anything
    worse is rejected.
    """

    num_classes: int
    masses: np.ndarray

    def __post_init__(self):
        k = _check_class_count(self.num_classes)
        m = _as_float_array(self.masses, "masses", 1)
        if m.shape[0] != 1 << k:
            raise ValidationError(
                f"mass vector length {m.shape[0]} does not match 2**{k} subsets"
            )
        if m[0] != 0.0:
            if abs(m[0]) > _NEGATIVE_MASS_EPS:
                raise ValidationError("empty set must carry zero mass")
            m = m.copy()
            m[0] = 0.0
        low = m.min()
        if low < 0.0:
            if low < -_NEGATIVE_MASS_EPS:
                raise ValidationError(f"negative mass {low!r} beyond clamping budget")
            m = np.maximum(m, 0.0)
        total = m.sum()
        if abs(total - 1.0) > _MASS_SUM_EPS:
            raise ValidationError(f"masses sum to {total!r}, expected 1")
        if total != 1.0:
            m = m / total
        object.__setattr__(self, "masses", m)

    @property
    def full_set(self) -> int:
        return (1 << self.num_classes) - 1

    @property
    def is_vacuous(self) -> bool:
        return self.masses[self.full_set] == 1.0

    def singletons(self) -> np.ndarray:
        """Masses of the one-class subsets, ordered by class index."""
        return self.masses[1 << np.arange(self.num_classes)]


def vacuous_mass(num_classes: int) -> PowerSetMass:
    """Total ignorance: all mass on the full set."""
    k = _check_class_count(num_classes)
    m = np.zeros(1 << k)
    m[-1] = 1.0
    return PowerSetMass(num_classes=k, masses=m)


@dataclass(frozen=True)
class SimpleMass:
    """Mass with one non-full focal set: ``m(focal) = s, m(Z) = 1 - s``."""

    num_classes: int
    focal_set: int
    support: float

    def to_mass(self) -> PowerSetMass:
        m = np.zeros(1 << self.num_classes)
        m[self.focal_set] += self.support
        m[(1 << self.num_classes) - 1] += 1.0 - self.support
        return PowerSetMass(num_classes=self.num_classes, masses=m)


def simple_mass_pair(w_jk: float, class_k: int, num_classes: int) -> tuple[SimpleMass, SimpleMass]:
    """Split one evidential weight into its two simple mass functions.

    A positive weight supports the singleton ``{z_k}`` with degree
    ``1 - e^{-w}``, a negative weight supports its complement; the other
    member of the pair is vacuous (at most one is active, both for w = 0).
    """
    k = _check_class_count(num_classes)
    if not 0 <= class_k < k:
        raise ValidationError(f"class index {class_k} out of range for {k} classes")
    if not np.isfinite(w_jk):
        raise ValidationError("evidential weight must be finite")
    full = (1 << k) - 1
    s_pos = -np.expm1(-max(0.0, w_jk))
    s_neg = -np.expm1(-max(0.0, -w_jk))
    positive = SimpleMass(num_classes=k, focal_set=1 << class_k, support=float(s_pos))
    negative = SimpleMass(num_classes=k, focal_set=full ^ (1 << class_k), support=float(s_neg))
    return positive, negative


def dempster_combine(m1: PowerSetMass, m2: PowerSetMass) -> tuple[PowerSetMass, float]:
    """Conflict-renormalized conjunctive fusion of two independent masses.

    Product mass flows to the intersection of each focal-set pair; the
    share landing on the empty set is the conflict ``kappa`` and the rest
    is rescaled by ``1/(1 - kappa)``. Rejected as total conflict when
    ``kappa`` reaches 1.
    """
    if m1.num_classes != m2.num_classes:
        raise ValidationError("cannot combine masses over different class sets")
    out = np.zeros_like(m1.masses)
    idx1 = np.flatnonzero(m1.masses)
    idx2 = np.flatnonzero(m2.masses)
    if idx1.size > idx2.size:  # iterate over the sparser side
        m1, m2, idx1, idx2 = m2, m1, idx2, idx1
    vals2 = m2.masses[idx2]
    for b in idx1:
        np.add.at(out, b & idx2, m1.masses[b] * vals2)
    kappa = float(out[0])
    out[0] = 0.0
    if kappa >= 1.0 - TOTAL_CONFLICT_EPS:
        raise NumericalGuardError(f"total conflict: kappa = {kappa!r}")
    out /= 1.0 - kappa
    return PowerSetMass(num_classes=m1.num_classes, masses=out), kappa


def fuse_feature_masses(w_per_feature) -> PowerSetMass:
    """Fold all per-feature simple masses together with Dempster's rule.

    ``w_per_feature`` is a (J, K) matrix of per-feature evidential
    weights. Fusion order is fixed for reproducibility -- feature-major,
    then class, positive before negative -- and immaterial up to rounding
    since the rule is associative.
    """
    w = _as_float_array(w_per_feature, "w_per_feature", 2)
    num_features, num_classes = w.shape
    if num_classes > MAX_FUSION_CLASSES:
        raise ValidationError(
            f"fusion enumeration capped at {MAX_FUSION_CLASSES} classes, got {num_classes}"
        )
    if num_features > MAX_FUSION_FEATURES:
        raise ValidationError(
            f"fusion enumeration capped at {MAX_FUSION_FEATURES} features, got {num_features}"
        )
    fused = vacuous_mass(num_classes)
    for j in range(num_features):
        for k in range(num_classes):
            for part in simple_mass_pair(w[j, k], k, num_classes):
                if part.support > 0.0:
                    fused, _ = dempster_combine(fused, part.to_mass())
    return fused


def closed_form_mass(ew: EvidentialWeights) -> PowerSetMass:
    """Fused output mass computed directly from the per-class weights.

    Singletons get ``e^{-w-_k} (e^{w+_k} - 1 + prod_{l != k} (1 - e^{-w-_l}))``
    and larger subsets ``prod_{k not in A} (1 - e^{-w-_k}) * prod_{k in A} e^{-w-_k}``,
    all scaled so the non-empty subsets sum to 1. The normalization
    constant is defined by that summation; no closed form is used for it.
    """
    k = _check_class_count(ew.num_classes)
    if np.abs(ew.w).max(initial=0.0) > MAX_EXP_WEIGHT:
        raise NumericalGuardError(
            f"|w| exceeds {MAX_EXP_WEIGHT:g}; singleton masses would overflow"
        )
    stay = np.exp(-ew.w_minus)  # e^{-w-_k}, factor for classes inside the subset
    leave = -np.expm1(-ew.w_minus)  # 1 - e^{-w-_k}, for classes outside
    # product over per-class factors for every bitmask, by doubling
    masses = np.ones(1)
    for i in range(k):
        masses = np.concatenate([masses * leave[i], masses * stay[i]])
    # singletons follow their own closed form
    for i in range(k):
        others = np.prod(np.delete(leave, i))
        masses[1 << i] = stay[i] * (np.expm1(ew.w_plus[i]) + others)
    masses[0] = 0.0
    total = masses.sum()
    if not np.isfinite(total) or total <= 0.0:
        raise NumericalGuardError(f"mass normalization failed, total = {total!r}")
    return PowerSetMass(num_classes=k, masses=masses / total)


def plausibilities(mass: PowerSetMass) -> np.ndarray:
    """Per-class plausibility: total mass of subsets containing the class."""
    k = mass.num_classes
    subsets = np.arange(1 << k)
    return np.array(
        [mass.masses[(subsets >> i) & 1 == 1].sum() for i in range(k)]
    )


def plausibility_transform(mass: PowerSetMass) -> np.ndarray:
    """Normalize plausibilities into a categorical distribution.

    Always well-defined: the full set contributes to every class, so no
    plausibility vector from a valid mass is identically zero.
    """
    pl = plausibilities(mass)
    return pl / pl.sum()


@dataclass(frozen=True)
class EquivalenceReport:
    """Deviations between the closed forms and the brute-force fusion."""

    plausibility_vs_softmax: float
    fused_vs_closed: float | None  # None when the fusion budget was exceeded
    sign_mismatches: int


def equivalence_check(model, phi) -> EquivalenceReport:
    """Validate one model/input pair against the power-set construction.

    Checks that the plausibility transformation of the closed-form mass
    reproduces the softmax output, that pairwise Dempster fusion of the
    per-feature simple masses agrees with the closed form (skipped when
    the feature count exceeds the enumeration budget; the per-class
    totals are fused instead), and that the exponentiation-free sign test
    marks exactly the nonzero singletons.
    """
    centered = core.center_params(model)
    ew = core.evidential_weights(centered, phi)
    closed = closed_form_mass(ew)
    softmax_probs = core.softmax(core.logits(model, phi))
    plaus_dev = float(np.abs(plausibility_transform(closed) - softmax_probs).max())

    fused_dev: float | None = None
    if model.num_classes <= MAX_FUSION_CLASSES:
        if model.num_features <= MAX_FUSION_FEATURES:
            per_feature = np.tile(ew.w / model.num_features, (model.num_features, 1))
        else:
            per_feature = ew.w[np.newaxis, :]
        fused = fuse_feature_masses(per_feature)
        fused_dev = float(np.abs(fused.masses - closed.masses).max())

    keep = core.singleton_mass_signs(ew, tol=0.0).keep_mask
    mismatches = int(np.sum((closed.singletons() > 0.0) != keep))
    return EquivalenceReport(
        plausibility_vs_softmax=plaus_dev,
        fused_vs_closed=fused_dev,
        sign_mismatches=mismatches,
    )
