"""Acceptance suite: one test per release criterion, at fixed tolerances.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one PASS line
per criterion. Every tolerance is pinned here; nothing is calibrated at
run time.
"""

import time
import warnings

import numpy as np
import pytest

import oracles
from helpers import (
    EVEN_FILTERED,
    EVEN_KEEP,
    EVEN_SOFTMAX,
    ODD_FILTERED,
    ODD_KEEP,
    ODD_SOFTMAX,
    TARGET_PROBS,
    TARGET_SUPPORT,
    random_model,
)
from evsparse import (
    EvidentialWeights,
    LastLayerParams,
    SingletonMassReport,
    alpha_params,
    bhattacharyya,
    center_params,
    default_tolerance,
    evidential_weights,
    filter_distribution,
    logits,
    singleton_mass_signs,
    softmax,
    sparsemax,
    sparsify,
    support_stats,
    target_distribution,
    wasserstein1,
)
from evsparse.oracle import closed_form_mass, fuse_feature_masses, plausibility_transform


def _passed(name: str, detail: str = "") -> None:
    suffix = f" ({detail})" if detail else ""
    print(f"[PASS] {name}{suffix}")


def _mask_report(keep_indices, num_classes):
    mask = np.zeros(num_classes, dtype=bool)
    mask[keep_indices] = True
    return SingletonMassReport(keep_mask=mask, w=np.zeros(num_classes), all_vacuous=False)


def test_fig2_renormalization_fixtures():
    """Published filtered distributions are reproduced within 1e-4."""
    even = filter_distribution(EVEN_SOFTMAX, _mask_report(EVEN_KEEP, 10))
    np.testing.assert_array_equal(even.support, EVEN_KEEP)
    np.testing.assert_allclose(even.probs, EVEN_FILTERED, atol=1e-4)
    odd = filter_distribution(ODD_SOFTMAX, _mask_report(ODD_KEEP, 10))
    np.testing.assert_array_equal(odd.support, ODD_KEEP)
    np.testing.assert_allclose(odd.probs, ODD_FILTERED, atol=1e-4)
    _passed("fig2 renormalization fixtures", "even+odd within 1e-4")


def test_dst_softmax_equivalence_500_instances():
    """Plausibility of the fused mass reproduces softmax; closed form
    matches pairwise fusion. 500 random instances, K in [2,8], J in [1,5],
    both within 1e-9."""
    rng = np.random.default_rng(411)
    start = time.time()
    worst_plaus = 0.0
    worst_fused = 0.0
    for _ in range(500):
        k = int(rng.integers(2, 9))
        j = int(rng.integers(1, 6))
        model = random_model(rng, k, j)
        phi = rng.normal(size=j)
        ew = evidential_weights(center_params(model), phi)
        closed = closed_form_mass(ew)
        plaus_dev = np.abs(
            plausibility_transform(closed) - softmax(logits(model, phi))
        ).max()
        per_feature = np.tile(ew.w / j, (j, 1))
        fused_dev = np.abs(fuse_feature_masses(per_feature).masses - closed.masses).max()
        worst_plaus = max(worst_plaus, plaus_dev)
        worst_fused = max(worst_fused, fused_dev)
    elapsed = time.time() - start
    assert worst_plaus <= 1e-9, worst_plaus
    assert worst_fused <= 1e-9, worst_fused
    assert elapsed < 60.0
    _passed(
        "DST-softmax equivalence",
        f"max plaus dev {worst_plaus:.2e}, max fusion dev {worst_fused:.2e}, {elapsed:.1f}s",
    )


def test_support_characterization_1000_instances():
    """Filtered support is exactly the classes above the mean logit, and
    exactly the nonzero singletons of the power-set construction (K <= 8).
    Zero mismatches allowed."""
    rng = np.random.default_rng(412)
    oracle_checked = 0
    for _ in range(1000):
        k = int(rng.integers(2, 13))
        j = int(rng.integers(1, 7))
        model = random_model(rng, k, j)
        phi = rng.normal(size=j)
        dist = sparsify(model, phi)
        raw = logits(model, phi)
        ew = evidential_weights(center_params(model), phi)
        tol = default_tolerance(ew)
        expected = set(np.flatnonzero(raw > raw.mean() + tol))
        assert set(dist.support) == expected
        if k <= 8:
            singletons = closed_form_mass(ew).singletons()
            assert set(np.flatnonzero(singletons > 0.0)) == set(dist.support)
            oracle_checked += 1
    _passed("support characterization", f"1000 instances, {oracle_checked} oracle-checked")


def test_constraint_satisfaction_1000_instances():
    """Per-class alpha columns sum to the centered bias within 1e-9 and
    the evidence vector sums to zero within 1e-10; the evidence vector
    equals the logits minus their mean."""
    rng = np.random.default_rng(413)
    worst_alpha = 0.0
    worst_sum = 0.0
    worst_identity = 0.0
    for _ in range(1000):
        k = int(rng.integers(2, 17))
        j = int(rng.integers(1, 33))
        model = random_model(rng, k, j)
        phi = rng.normal(size=j)
        centered = center_params(model)
        alpha = alpha_params(centered, phi)
        worst_alpha = max(worst_alpha, np.abs(alpha.sum(axis=0) - centered.beta0).max())
        ew = evidential_weights(centered, phi)
        worst_sum = max(worst_sum, abs(ew.w.sum()))
        raw = logits(model, phi)
        worst_identity = max(worst_identity, np.abs(ew.w - (raw - raw.mean())).max())
    assert worst_alpha <= 1e-9, worst_alpha
    assert worst_sum <= 1e-10, worst_sum
    assert worst_identity <= 1e-10, worst_identity
    _passed(
        "alpha/bias constraint and sum-zero",
        f"max alpha dev {worst_alpha:.2e}, max sum {worst_sum:.2e}, "
        f"max centering dev {worst_identity:.2e}",
    )


def test_sparsemax_against_projection_oracle():
    """200 random K <= 10 inputs within 1e-9 of the exhaustive projection;
    shift invariance and simplex membership hold within 1e-12."""
    rng = np.random.default_rng(414)
    worst = 0.0
    for _ in range(200):
        k = int(rng.integers(2, 11))
        z = rng.normal(0, 3, k)
        dist = sparsemax(z)
        expected = oracles.simplex_projection_exhaustive(z)
        worst = max(worst, np.abs(dist.dense() - expected).max())
        shifted = sparsemax(z + rng.normal(0, 10))
        np.testing.assert_array_equal(dist.support, shifted.support)
        np.testing.assert_allclose(dist.probs, shifted.probs, atol=1e-12)
        assert np.all(dist.probs > 0.0)
        assert abs(dist.probs.sum() - 1.0) <= 1e-12
    assert worst <= 1e-9, worst
    _passed("sparsemax projection", f"200 inputs, max dev {worst:.2e}")


def test_metric_criteria():
    """Transport distance matches the LP oracle within 1e-9 on 200 random
    pairs; Bhattacharyya is zero on equal inputs and symmetric within
    1e-12; the binary-query target matches its derived values."""
    rng = np.random.default_rng(415)
    worst = 0.0
    for _ in range(200):
        k = int(rng.integers(2, 7))
        p = oracles.random_distribution(rng, k)
        q = oracles.random_distribution(rng, k)
        worst = max(worst, abs(wasserstein1(p, q) - oracles.wasserstein_lp(p, q)))
        assert bhattacharyya(p, p) <= 1e-12
        assert abs(bhattacharyya(p, q) - bhattacharyya(q, p)) <= 1e-12
    assert worst <= 1e-9, worst
    target = target_distribution(EVEN_SOFTMAX, ODD_SOFTMAX)
    np.testing.assert_array_equal(target.support, TARGET_SUPPORT)
    np.testing.assert_allclose(target.probs, TARGET_PROBS, atol=1e-4)
    _passed("distribution metrics", f"200 transport pairs, max dev {worst:.2e}")


def test_degenerate_handling():
    """Uniform logits fall back to the unchanged softmax with the vacuous
    flag; |w| = 500 runs on the sign-only path without overflow."""
    model = LastLayerParams(weights=np.zeros((6, 2)), bias=np.full(6, 3.0))
    probs = softmax(logits(model, [1.0, -1.0]))
    dist = sparsify(model, [1.0, -1.0])
    assert dist.vacuous_fallback
    np.testing.assert_array_equal(dist.dense(), probs)

    extreme = LastLayerParams(weights=np.array([[500.0], [-500.0]]), bias=np.zeros(2))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        big = sparsify(extreme, [1.0])
        report = singleton_mass_signs(EvidentialWeights.from_w(np.array([500.0, -500.0])))
    np.testing.assert_array_equal(big.support, [0])
    np.testing.assert_array_equal(big.probs, [1.0])
    np.testing.assert_array_equal(report.keep_mask, [True, False])
    _passed("degenerate handling", "vacuous fallback + |w|=500 sign-only")


def test_large_scale_reduction_stress():
    """Desk-scale stand-in for the reported large-space reductions: for
    K = 512 random logit vectors the reduction fraction equals
    1 - |{k : logit > mean}| / 512 exactly."""
    rng = np.random.default_rng(416)
    for _ in range(50):
        raw_logits = rng.normal(0, 2, 512)
        model = LastLayerParams(
            weights=raw_logits[:, np.newaxis], bias=np.zeros(512)
        )
        dist = sparsify(model, [1.0])
        size, reduction = support_stats(dist)
        expected_support = np.flatnonzero(raw_logits > raw_logits.mean())
        assert size == expected_support.size
        assert reduction == 1.0 - expected_support.size / 512
        np.testing.assert_array_equal(dist.support, expected_support)
    _passed("large-scale reduction stress", "50 vectors, K=512, exact equality")
