"""Cross-validated model selection across the available model kinds."""

from __future__ import annotations

from typing import Iterable, Optional

import numpy as np

from ..errors import CoscaleError, UndertrainedError, ValidationError
from ..records import ExecutionContext
from ..similarity import SimilarityWeights
from . import base, neural, parametric


def _fit_kind(
    kind: str,
    records: list,
    query_context: Optional[ExecutionContext],
    weights: Optional[SimilarityWeights],
    catalog: Iterable,
    seed: int,
    neural_kwargs: dict,
) -> base.TrainedModel:
    if kind == base.KIND_PARAMETRIC:
        return parametric.fit_parametric_nnls(records)
    if kind == base.KIND_SIMILARITY:
        if query_context is None:
            raise ValidationError("similarity_weighted requires a query context")
        return parametric.fit_similarity_weighted(
            records, query_context, weights=weights, catalog=catalog
        )
    if kind == base.KIND_NEURAL:
        return neural.fit_neural(records, seed=seed, catalog=catalog, **neural_kwargs)
    raise ValidationError(f"unknown model kind {kind!r}")


def cross_validate(
    records: list,
    kind: str,
    folds: int = 5,
    seed: int = 42,
    query_context: Optional[ExecutionContext] = None,
    weights: Optional[SimilarityWeights] = None,
    catalog: Iterable = (),
    neural_kwargs: Optional[dict] = None,
) -> dict:
    """k-fold CV of one model kind; fold assignment is shuffled by seed.

    Returns {"mape", "mae", "fold_mape"} or raises the first precondition
    failure encountered.
    """
    if len(records) < folds:
        raise UndertrainedError(f"need at least {folds} records for {folds}-fold CV")
    order = np.random.default_rng(seed).permutation(len(records))
    chunks = np.array_split(order, folds)
    fold_mape, fold_mae = [], []
    for holdout_idx in chunks:
        holdout_set = set(int(i) for i in holdout_idx)
        train = [records[i] for i in range(len(records)) if i not in holdout_set]
        holdout = [records[int(i)] for i in holdout_idx]
        model = _fit_kind(
            kind, train, query_context, weights, catalog, seed, neural_kwargs or {}
        )
        err = base.evaluate(model, holdout, catalog)
        fold_mape.append(err["mape"])
        fold_mae.append(err["mae"])
    return {
        "mape": float(np.mean(fold_mape)),
        "mae": float(np.mean(fold_mae)),
        "fold_mape": fold_mape,
    }


def select_model(
    records: list,
    query_context: Optional[ExecutionContext] = None,
    kinds: Iterable[str] = base.KIND_ORDER,
    folds: int = 5,
    seed: int = 42,
    weights: Optional[SimilarityWeights] = None,
    catalog: Iterable = (),
    neural_kwargs: Optional[dict] = None,
) -> tuple[base.TrainedModel, list]:
    """Pick the kind with minimum CV MAPE, ties going to the simpler kind.

    Kinds whose preconditions fail are skipped with a reason. Returns the
    winning model refit on all records plus a report entry per kind.
    """
    kinds = list(kinds)
    if not kinds:
        raise ValidationError("no model kinds offered")
    report = []
    scored = []
    for kind in kinds:
        try:
            cv = cross_validate(
                records, kind, folds, seed, query_context, weights, catalog, neural_kwargs
            )
        except CoscaleError as exc:
            report.append({"kind": kind, "status": "skipped", "reason": str(exc)})
            continue
        report.append(
            {"kind": kind, "status": "ok", "mape": cv["mape"], "mae": cv["mae"],
             "fold_mape": cv["fold_mape"]}
        )
        scored.append((cv["mape"], base.KIND_ORDER.index(kind), kind, cv))
    if not scored:
        reasons = "; ".join(f"{e['kind']}: {e['reason']}" for e in report)
        raise UndertrainedError(f"every offered model kind failed: {reasons}")
    scored.sort(key=lambda item: (item[0], item[1]))
    _, _, best_kind, best_cv = scored[0]
    model = _fit_kind(
        best_kind, records, query_context, weights, catalog, seed, neural_kwargs or {}
    )
    model.val_error = {"mape": best_cv["mape"], "mae": best_cv["mae"]}
    return model, report
