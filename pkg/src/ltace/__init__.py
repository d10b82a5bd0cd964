"""Clustering ensembles refined by low-rank approximation of a co-association / coherent-link tensor."""

from .basegen import PoolConfig, generate_pool, kmeans, sample_pool
from .consensus import hierarchical_consensus, spectral_consensus
from .ensemble import co_association, coherent_link, coherent_link_from_labels, connective_matrix
from .metrics import evaluate
from .partition import Partition
from .solver import LtaConfig, LtaResult, solve
from .tensor import Orientation, tensor_nuclear_norm, tnn_fourier, tnn_prox, tsvd

__version__ = "0.1.0"

__all__ = [
    "LtaConfig",
    "LtaResult",
    "Orientation",
    "Partition",
    "PoolConfig",
    "co_association",
    "coherent_link",
    "coherent_link_from_labels",
    "connective_matrix",
    "evaluate",
    "generate_pool",
    "hierarchical_consensus",
    "kmeans",
    "sample_pool",
    "solve",
    "spectral_consensus",
    "tensor_nuclear_norm",
    "tnn_fourier",
    "tnn_prox",
    "tsvd",
]
