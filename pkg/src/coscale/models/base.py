"""Trained runtime-prediction models: common container, prediction, metrics."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from ..errors import ValidationError
from ..records import ExecutionContext, ExecutionRecord
from .features import featurize

KIND_PARAMETRIC = "parametric_nnls"
KIND_SIMILARITY = "similarity_weighted"
KIND_NEURAL = "neural"

# Simplest first; used for tie-breaking during model selection.
KIND_ORDER = (KIND_PARAMETRIC, KIND_SIMILARITY, KIND_NEURAL)

MIN_RECORDS = {KIND_PARAMETRIC: 4, KIND_SIMILARITY: 4, KIND_NEURAL: 12}

MODEL_FILE_VERSION = 1


@dataclass
class TrainedModel:
    kind: str
    params: dict
    training_fingerprint: str
    val_error: dict = field(default_factory=lambda: {"mape": 0.0, "mae": 0.0})

    def coefficients(self) -> np.ndarray:
        if self.kind not in (KIND_PARAMETRIC, KIND_SIMILARITY):
            raise ValidationError(f"{self.kind} model has no linear coefficients")
        return np.asarray(self.params["coef"], dtype=float)


def training_fingerprint(records: Iterable[ExecutionRecord]) -> str:
    fps = sorted(r.fingerprint for r in records)
    return hashlib.sha256("\n".join(fps).encode("utf-8")).hexdigest()


def predict_runtime(
    model: TrainedModel,
    context: ExecutionContext,
    candidate,
    data_size_gb: float,
    catalog: Iterable = (),
) -> float:
    """Predicted runtime in seconds for running `context`'s job on the
    candidate (machine, scale_out) configuration."""
    if not isinstance(model, TrainedModel) or not model.params:
        raise ValidationError("model is not trained")
    scale_out = int(candidate.scale_out)
    if scale_out < 1:
        raise ValidationError(f"candidate scale_out must be >= 1, got {scale_out}")
    if model.kind in (KIND_PARAMETRIC, KIND_SIMILARITY):
        value = float(model.coefficients() @ featurize(scale_out, data_size_gb))
        return max(value, 1e-12)
    if model.kind == KIND_NEURAL:
        from . import neural

        return neural.predict(model, context, getattr(candidate, "machine", None), scale_out, data_size_gb, catalog)
    raise ValidationError(f"unknown model kind {model.kind!r}")


def evaluate(model: TrainedModel, holdout: list, catalog: Iterable = ()) -> dict:
    """MAPE (percent) and MAE (seconds) of the model on held-out records."""
    if not holdout:
        raise ValidationError("holdout must be non-empty")
    abs_errors = []
    pct_errors = []
    for record in holdout:
        if record.runtime_s <= 0:
            raise ValidationError("holdout runtimes must be positive")
        pred = predict_runtime(
            model,
            record.context,
            _Candidate(record.context.machine, record.scale_out),
            record.data_size_gb,
            catalog,
        )
        abs_errors.append(abs(pred - record.runtime_s))
        pct_errors.append(abs(pred - record.runtime_s) / record.runtime_s)
    return {
        "mape": 100.0 * float(np.mean(pct_errors)),
        "mae": float(np.mean(abs_errors)),
    }


@dataclass
class _Candidate:
    machine: Optional[str]
    scale_out: int


def save_model(model: TrainedModel, path) -> None:
    payload = {
        "version": MODEL_FILE_VERSION,
        "kind": model.kind,
        "params": model.params,
        "training_fingerprint": model.training_fingerprint,
        "val_error": model.val_error,
    }
    Path(path).write_text(
        json.dumps(payload, sort_keys=True, ensure_ascii=False, separators=(",", ":")) + "\n",
        encoding="utf-8",
    )


def load_model(path) -> TrainedModel:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if data.get("version") != MODEL_FILE_VERSION:
        raise ValidationError(f"unsupported model file version {data.get('version')!r}")
    kind = data.get("kind")
    if kind not in KIND_ORDER:
        raise ValidationError(f"unknown model kind {kind!r}")
    return TrainedModel(
        kind=kind,
        params=data.get("params", {}),
        training_fingerprint=data.get("training_fingerprint", ""),
        val_error=data.get("val_error", {"mape": 0.0, "mae": 0.0}),
    )
