"""Shared test data and builders.

The even/odd vectors are the published latent-prior softmax outputs of a
two-query MNIST generator together with their filtered counterparts;
they serve as renormalization fixtures.
"""

import numpy as np

from evsparse import LastLayerParams

EVEN_SOFTMAX = np.array(
    [0.07175066, 0.18762952, 0.12967074, 0.14694512, 0.10367352,
     0.02215276, 0.05927196, 0.05245687, 0.04584087, 0.18060793]
)
EVEN_KEEP = [1, 2, 3, 4, 9]
EVEN_FILTERED = np.array(
    [0.250665, 0.173234596848488, 0.196312427520752, 0.138503417372704,
     0.241284519433975]
)

ODD_SOFTMAX = np.array(
    [0.11829948, 0.0170686, 0.06552684, 0.01989201, 0.16146706,
     0.16441198, 0.2041005, 0.13485213, 0.09432564, 0.02005576]
)
ODD_KEEP = [0, 4, 5, 6, 7, 8]
ODD_FILTERED = np.array(
    [0.134820848703384, 0.184017077088356, 0.187373295426369,
     0.23260460793972, 0.153685212135315, 0.10749889165163]
)

# Sparse reference distribution for the even query against the odd
# complement: keep classes where even >= odd, renormalize the even
# values over that support (derived by elementwise comparison of the
# vectors above; the kept mass is 0.64485331).
TARGET_SUPPORT = [1, 2, 3, 9]
TARGET_PROBS = np.array([0.29096465, 0.20108564, 0.22787372, 0.28007599])


def random_model(rng, num_classes, num_features, scale=2.0):
    return LastLayerParams(
        weights=rng.normal(0.0, scale, (num_classes, num_features)),
        bias=rng.normal(0.0, 1.0, num_classes),
    )
