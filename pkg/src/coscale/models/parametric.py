"""Context-agnostic and similarity-weighted linear runtime models."""

from __future__ import annotations

from typing import Iterable, Optional

import numpy as np

from ..errors import NoUsableDataError, UndertrainedError
from ..records import ExecutionContext
from ..similarity import SimilarityWeights, record_weight
from . import base
from .features import design_matrix
from .nnls import DEFAULT_MAX_ITER, DEFAULT_TOL, check_design, solve_nnls

# Rows whose similarity weight falls below this are dropped outright instead
# of entering the solve with near-zero scaling.
WEIGHT_CUTOFF = 0.05


def _design_from_records(records: list) -> tuple[np.ndarray, np.ndarray]:
    X = design_matrix(
        [r.scale_out for r in records], [r.data_size_gb for r in records]
    )
    y = np.array([r.runtime_s for r in records], dtype=float)
    return X, y


def fit_parametric_nnls(
    records: list,
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = DEFAULT_TOL,
) -> base.TrainedModel:
    """Fit the nonnegative scale-out model.

    Context-blind by design: whatever records are passed in are pooled, so
    callers normally pre-filter to a single job.
    """
    X, y = _design_from_records(records)
    check_design(X, [r.scale_out for r in records], base.MIN_RECORDS[base.KIND_PARAMETRIC])
    coef = solve_nnls(X, y, max_iter=max_iter, tol=tol)
    model = base.TrainedModel(
        kind=base.KIND_PARAMETRIC,
        params={"coef": [float(c) for c in coef], "n_train": len(records)},
        training_fingerprint=base.training_fingerprint(records),
    )
    model.val_error = base.evaluate(model, records)
    return model


def fit_similarity_weighted(
    records: list,
    query_context: ExecutionContext,
    weights: Optional[SimilarityWeights] = None,
    catalog: Iterable = (),
    cutoff: float = WEIGHT_CUTOFF,
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = DEFAULT_TOL,
) -> base.TrainedModel:
    """Fit the scale-out model with rows weighted by context similarity to
    the query, boosting records from the querying user's own environment."""
    weights = weights or SimilarityWeights()
    row_weights = np.array(
        [record_weight(r.context, query_context, weights, catalog) for r in records]
    )
    keep = row_weights >= cutoff
    if not keep.any():
        raise NoUsableDataError(
            "no record is similar enough to the query context to train on"
        )
    kept = [r for r, k in zip(records, keep) if k]
    if len(kept) < base.MIN_RECORDS[base.KIND_SIMILARITY]:
        raise UndertrainedError(
            f"only {len(kept)} records pass the similarity cutoff; "
            f"need {base.MIN_RECORDS[base.KIND_SIMILARITY]}"
        )
    X, y = _design_from_records(kept)
    check_design(X, [r.scale_out for r in kept], base.MIN_RECORDS[base.KIND_SIMILARITY])
    coef = solve_nnls(X, y, sample_weight=row_weights[keep], max_iter=max_iter, tol=tol)
    model = base.TrainedModel(
        kind=base.KIND_SIMILARITY,
        params={
            "coef": [float(c) for c in coef],
            "n_train": len(kept),
            "n_dropped": int(len(records) - len(kept)),
            "query_origin": query_context.origin,
        },
        training_fingerprint=base.training_fingerprint(kept),
    )
    model.val_error = base.evaluate(model, kept)
    return model
