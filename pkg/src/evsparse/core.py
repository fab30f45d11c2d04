"""Closed-form evidential decomposition of a softmax layer.

A trained softmax layer ``p(z_k | y) = softmax(bias_k + weights_k . phi)``
can be read as a Dempster-Shafer fusion of per-feature simple mass
functions. After centering the parameters over classes, each class gets a
single net evidential weight

    w_k = beta0_k + sum_j beta_kj * phi_j  =  logit_k - mean(logits),

whose positive part is direct support for the class and whose negative
part is support for the complement. A class keeps singleton belief mass
exactly when ``w_k > 0`` (or, degenerately, when every other class has
negative evidence), so the keep/drop decision needs signs only and never
exponentiates. Filtering the softmax distribution to the kept classes and
renormalizing yields the sparsified distribution.
"""

from __future__ import annotations

import numpy as np

from .errors import NumericalGuardError, ValidationError
from .types import (
    CenteredParams,
    EvidentialWeights,
    LastLayerParams,
    SingletonMassReport,
    SparseDistribution,
    _as_float_array,
)

# exp() stays finite and simple masses stay representable up to here
MAX_EXP_WEIGHT = 500.0


def center_params(raw: LastLayerParams) -> CenteredParams:
    """Remove the class mean from every weight column and from the bias."""
    beta = raw.weights - raw.weights.mean(axis=0, keepdims=True)
    beta0 = raw.bias - raw.bias.mean()
    return CenteredParams(beta=beta, beta0=beta0)


def _check_features(phi, num_features: int) -> np.ndarray:
    phi = _as_float_array(phi, "features", 1)
    if phi.shape[0] != num_features:
        raise ValidationError(
            f"feature vector length {phi.shape[0]} does not match {num_features} model features"
        )
    return phi


def logits(raw: LastLayerParams, phi) -> np.ndarray:
    """Affine softmax inputs ``bias_k + weights_k . phi``."""
    phi = _check_features(phi, raw.num_features)
    return raw.bias + raw.weights @ phi


def softmax(logit_values) -> np.ndarray:
    """Numerically stable softmax (max subtraction)."""
    z = _as_float_array(logit_values, "logits", 1)
    e = np.exp(z - z.max())
    return e / e.sum()


def evidential_weights(centered: CenteredParams, phi) -> EvidentialWeights:
    """Per-class net evidence ``w_k = beta0_k + beta_k . phi``.

    Because the parameters are centered, ``sum_k w_k = 0`` and ``w`` equals
    the raw logits minus their mean.
    """
    phi = _check_features(phi, centered.num_features)
    w = centered.beta0 + centered.beta @ phi
    return EvidentialWeights.from_w(w)


def alpha_params(centered: CenteredParams, phi) -> np.ndarray:
    """Input-dependent per-feature bias terms, shape (J, K).

    ``alpha[j, k] = w_k / J - beta[k, j] * phi[j]``; each column sums to
    ``beta0[k]``, the constraint that makes the belief-mass reading agree
    with the softmax output.
    """
    phi = _check_features(phi, centered.num_features)
    w = centered.beta0 + centered.beta @ phi
    return w / centered.num_features - (centered.beta * phi).T


def singleton_mass_signs(ew: EvidentialWeights, tol: float = 0.0) -> SingletonMassReport:
    """Decide which singleton masses are strictly positive, without exp().

    The unnormalized singleton mass is
    ``e^{-w-_k} (e^{w+_k} - 1 + prod_{l != k} (1 - e^{-w-_l}))``;
    both bracketed terms are nonnegative, so it is positive iff
    ``w+_k > tol`` or every other class has ``w-_l > tol``.
    """
    if tol < 0:
        raise ValidationError("tolerance must be nonnegative")
    direct = ew.w_plus > tol
    negative = ew.w_minus > tol
    k = ew.num_classes
    # all-others-negative branch: count of negative classes excluding self
    others_negative = (negative.sum() - negative.astype(np.int64)) == k - 1
    keep = direct | others_negative
    return SingletonMassReport(keep_mask=keep, w=ew.w, all_vacuous=not keep.any())


def singleton_masses_unnormalized(ew: EvidentialWeights) -> np.ndarray:
    """Unnormalized singleton belief masses (shared constant dropped).

    Exponentiates, so the magnitude guard applies; the filtering path
    should use :func:`singleton_mass_signs` instead.
    """
    if np.abs(ew.w).max(initial=0.0) > MAX_EXP_WEIGHT:
        raise NumericalGuardError(
            f"|w| exceeds {MAX_EXP_WEIGHT:g}; use the sign-only path for filtering"
        )
    k = ew.num_classes
    # 1 - e^{-w-_l} via expm1 for accuracy near zero
    r = -np.expm1(-ew.w_minus)
    out = np.empty(k)
    for i in range(k):
        others = np.prod(np.delete(r, i))
        out[i] = np.exp(-ew.w_minus[i]) * (np.expm1(ew.w_plus[i]) + others)
    return out


def filter_distribution(softmax_probs, report: SingletonMassReport) -> SparseDistribution:
    """Drop classes with zero singleton mass and renormalize.

    If every class was dropped (no direct evidence anywhere, e.g. uniform
    logits) the unfiltered distribution is returned with
    ``vacuous_fallback`` set, since renormalizing over an empty support is
    undefined.
    """
    probs = _as_float_array(softmax_probs, "softmax_probs", 1)
    k = probs.shape[0]
    if report.keep_mask.shape[0] != k:
        raise ValidationError(
            f"keep mask length {report.keep_mask.shape[0]} does not match {k} classes"
        )
    if report.all_vacuous:
        # pass the input through untouched; zero-probability classes are
        # simply absent from the support so the dense view is identical
        support = np.flatnonzero(probs > 0.0)
        return SparseDistribution(
            support=support,
            probs=probs[support],
            num_classes=k,
            vacuous_fallback=True,
        )
    support = np.flatnonzero(report.keep_mask)
    kept = probs[support]
    return SparseDistribution(
        support=support,
        probs=kept / kept.sum(),
        num_classes=k,
        vacuous_fallback=False,
    )


def default_tolerance(ew: EvidentialWeights, rel_tol: float = 1e-12) -> float:
    """Scale-aware zero-evidence tolerance ``rel_tol * max(1, max|w|)``."""
    return rel_tol * max(1.0, float(np.abs(ew.w).max(initial=0.0)))


def sparsify(raw: LastLayerParams, phi, tol: float = 1e-12) -> SparseDistribution:
    """End-to-end filter: centering, evidence signs, renormalized softmax.

    ``tol`` is a relative factor; the absolute zero-evidence threshold is
    ``tol * max(1, max|w|)`` so that rounding in the centering sums cannot
    flip a keep decision at any logit scale.
    """
    centered = center_params(raw)
    ew = evidential_weights(centered, phi)
    report = singleton_mass_signs(ew, default_tolerance(ew, tol))
    return filter_distribution(softmax(logits(raw, phi)), report)
