"""Scale-out feature basis for the parametric runtime models.

Runtime is modeled as a nonnegative combination of a fixed cost, a
perfectly parallel share (data per node), a coordination term that grows
logarithmically with the cluster, and a per-node overhead term.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import ValidationError

FEATURE_NAMES = ("bias", "data_per_node", "log2_nodes", "nodes")


def featurize(scale_out: int, data_size_gb: float) -> np.ndarray:
    """Feature vector (1, data/nodes, log2 nodes, nodes) for one configuration."""
    if scale_out < 1:
        raise ValidationError(f"scale_out must be >= 1, got {scale_out}")
    if data_size_gb < 0:
        raise ValidationError(f"data size must be >= 0, got {data_size_gb}")
    return np.array(
        [1.0, data_size_gb / scale_out, math.log2(scale_out), float(scale_out)]
    )


def design_matrix(scale_outs, data_sizes_gb) -> np.ndarray:
    return np.array([featurize(int(s), float(d)) for s, d in zip(scale_outs, data_sizes_gb)])
