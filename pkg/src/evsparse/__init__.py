"""Post hoc sparsification of softmax latent distributions.

Reads a trained softmax layer as a fusion of per-feature belief masses,
keeps only the classes that receive direct evidence (positive net
evidential weight), and renormalizes. Includes a brute-force power-set
oracle for validation, sparsemax and softmax baselines, and distribution
metrics.
"""

from .baselines import sparsemax
from .core import (
    alpha_params,
    center_params,
    default_tolerance,
    evidential_weights,
    filter_distribution,
    logits,
    singleton_mass_signs,
    singleton_masses_unnormalized,
    softmax,
    sparsify,
)
from .errors import EvsparseError, NumericalGuardError, ValidationError
from .metrics import bhattacharyya, support_stats, target_distribution, wasserstein1
from .types import (
    CenteredParams,
    EvidentialWeights,
    LastLayerParams,
    SingletonMassReport,
    SparseDistribution,
)

__version__ = "0.1.0"

__all__ = [
    "LastLayerParams",
    "CenteredParams",
    "EvidentialWeights",
    "SingletonMassReport",
    "SparseDistribution",
    "EvsparseError",
    "ValidationError",
    "NumericalGuardError",
    "center_params",
    "logits",
    "softmax",
    "evidential_weights",
    "alpha_params",
    "singleton_mass_signs",
    "singleton_masses_unnormalized",
    "filter_distribution",
    "default_tolerance",
    "sparsify",
    "sparsemax",
    "target_distribution",
    "bhattacharyya",
    "wasserstein1",
    "support_stats",
    "__version__",
]
