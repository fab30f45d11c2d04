import numpy as np
import pytest

from evsparse import LastLayerParams


@pytest.fixture
def two_class_model():
    """K=2, J=1 layer whose logits at phi=[2] are [2.5, -2.5]."""
    return LastLayerParams(weights=np.array([[1.0], [-1.0]]), bias=np.array([0.5, -0.5]))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
