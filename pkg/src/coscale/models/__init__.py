"""Runtime-prediction models: parametric baseline, similarity weighting,
and a pretrain/fine-tune neural context model."""

from .autoencoder import train_autoencoder
from .base import (
    KIND_NEURAL,
    KIND_ORDER,
    KIND_PARAMETRIC,
    KIND_SIMILARITY,
    MIN_RECORDS,
    TrainedModel,
    evaluate,
    load_model,
    predict_runtime,
    save_model,
    training_fingerprint,
)
from .encoding import encode_context
from .features import featurize
from .neural import fit_neural
from .nnls import solve_nnls
from .parametric import fit_parametric_nnls, fit_similarity_weighted
from .selection import cross_validate, select_model

__all__ = [
    "KIND_NEURAL",
    "KIND_ORDER",
    "KIND_PARAMETRIC",
    "KIND_SIMILARITY",
    "MIN_RECORDS",
    "TrainedModel",
    "cross_validate",
    "encode_context",
    "evaluate",
    "featurize",
    "fit_neural",
    "fit_parametric_nnls",
    "fit_similarity_weighted",
    "load_model",
    "predict_runtime",
    "save_model",
    "select_model",
    "solve_nnls",
    "train_autoencoder",
]
