"""Distribution metrics against transport/scalar oracles."""

import numpy as np
import pytest

import oracles
from helpers import EVEN_SOFTMAX, ODD_SOFTMAX, TARGET_PROBS, TARGET_SUPPORT
from evsparse import (
    SparseDistribution,
    ValidationError,
    bhattacharyya,
    support_stats,
    target_distribution,
    wasserstein1,
)


class TestTargetDistribution:
    def test_even_odd_pair(self):
        target = target_distribution(EVEN_SOFTMAX, ODD_SOFTMAX)
        np.testing.assert_array_equal(target.support, TARGET_SUPPORT)
        np.testing.assert_allclose(target.probs, TARGET_PROBS, atol=1e-4)

    def test_equal_pair_is_identity(self, rng):
        p = oracles.random_distribution(rng, 8)
        target = target_distribution(p, p)
        np.testing.assert_allclose(target.dense(), p, atol=1e-15)
        assert target.support_size == 8

    def test_one_hot_versus_uniform(self):
        p = np.array([0.0, 0.0, 1.0, 0.0])
        q = np.full(4, 0.25)
        target = target_distribution(p, q)
        np.testing.assert_array_equal(target.support, [2])
        np.testing.assert_array_equal(target.probs, [1.0])

    def test_idempotent_on_own_support(self, rng):
        p = oracles.random_distribution(rng, 6)
        q = oracles.random_distribution(rng, 6)
        once = target_distribution(p, q)
        twice = target_distribution(once.dense(), np.zeros(6))
        np.testing.assert_array_equal(once.support, twice.support)
        np.testing.assert_allclose(once.probs, twice.probs, atol=1e-12)

    def test_mismatched_lengths_rejected(self):
        with pytest.raises(ValidationError):
            target_distribution(np.full(3, 1 / 3), np.full(4, 0.25))


class TestBhattacharyya:
    def test_identical_is_zero(self, rng):
        p = oracles.random_distribution(rng, 5)
        assert bhattacharyya(p, p) == pytest.approx(0.0, abs=1e-12)

    def test_disjoint_is_infinite(self):
        assert bhattacharyya([1.0, 0.0], [0.0, 1.0]) == np.inf

    def test_scalar_evaluation(self):
        assert bhattacharyya([0.5, 0.5], [1.0, 0.0]) == pytest.approx(
            0.346574, abs=1e-6
        )

    def test_symmetry(self, rng):
        for _ in range(20):
            p = oracles.random_distribution(rng, 6)
            q = oracles.random_distribution(rng, 6)
            assert bhattacharyya(p, q) == pytest.approx(bhattacharyya(q, p), abs=1e-12)
            assert bhattacharyya(p, q) >= 0.0

    def test_smoothing_gives_finite_value(self):
        value = bhattacharyya([1.0, 0.0], [0.0, 1.0], smoothing=1e-6)
        assert np.isfinite(value)

    def test_accepts_sparse_distribution(self):
        sparse = SparseDistribution(support=[0], probs=[1.0], num_classes=2)
        assert bhattacharyya(sparse, [1.0, 0.0]) == pytest.approx(0.0, abs=1e-12)


class TestWasserstein1:
    def test_point_mass_transport(self):
        p = np.array([1.0, 0.0, 0.0, 0.0])
        q = np.array([0.0, 0.0, 0.0, 1.0])
        assert wasserstein1(p, q) == pytest.approx(3.0, abs=1e-12)

    def test_identical_is_zero(self, rng):
        p = oracles.random_distribution(rng, 5)
        assert wasserstein1(p, p) == 0.0

    def test_matches_transport_oracle(self, rng):
        for _ in range(50):
            k = int(rng.integers(2, 7))
            p = oracles.random_distribution(rng, k)
            q = oracles.random_distribution(rng, k)
            assert wasserstein1(p, q) == pytest.approx(
                oracles.wasserstein_lp(p, q), abs=1e-9
            )

    def test_symmetry_and_triangle_inequality(self, rng):
        for _ in range(30):
            p, q, r = (oracles.random_distribution(rng, 6) for _ in range(3))
            assert wasserstein1(p, q) == pytest.approx(wasserstein1(q, p), abs=1e-12)
            assert wasserstein1(p, r) <= wasserstein1(p, q) + wasserstein1(q, r) + 1e-10


class TestSupportStats:
    @pytest.mark.parametrize(
        "support,num_classes,expected",
        [
            (list(range(5)), 10, (5, 0.5)),
            (list(range(25)), 25, (25, 0.0)),
            ([3, 17], 25, (2, 0.92)),
        ],
    )
    def test_reduction_fractions(self, support, num_classes, expected):
        probs = np.full(len(support), 1.0 / len(support))
        dist = SparseDistribution(support=support, probs=probs, num_classes=num_classes)
        size, reduction = support_stats(dist)
        assert size == expected[0]
        assert reduction == pytest.approx(expected[1], abs=1e-15)
