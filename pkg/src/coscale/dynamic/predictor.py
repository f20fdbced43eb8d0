"""Stage-runtime predictors driving barrier rescaling decisions.

Three flavors: an ensemble of per-stage scale-out models, one global model
over all stages keyed by their descriptor features, and a small neural net
on descriptor plus scale-out features. All support online refits at
iteration barriers with doubled weight on the newest runs, and anomaly
screening of observed runs against their predictions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from ..errors import ValidationError
from ..models.autoencoder import sigmoid
from ..models.features import featurize
from ..models.nnls import solve_nnls
from .graph import StageGraph

KIND_PER_STAGE = "per_stage"
KIND_GLOBAL = "global"
KIND_NEURAL = "neural"

RECENCY_WEIGHT = 2.0
ANOMALY_THRESHOLD = 2.0

_NEURAL_HIDDEN = 16
_NEURAL_FIT_EPOCHS = 300
_NEURAL_FIT_LR = 0.05
_NEURAL_UPDATE_EPOCHS = 50
_NEURAL_UPDATE_LR = 0.05


@dataclass
class StageSample:
    stage_id: str
    scale_out: int
    runtime_s: float
    batch: int


class StageRuntimeModel:
    """Predicts stage runtimes as a function of scale-out; refittable online."""

    def __init__(self, graph: StageGraph, data_gb: float, kind: str = KIND_PER_STAGE, seed: int = 42):
        if kind not in (KIND_PER_STAGE, KIND_GLOBAL, KIND_NEURAL):
            raise ValidationError(f"unknown stage model kind {kind!r}")
        self.graph = graph
        self.data_gb = float(data_gb)
        self.kind = kind
        self.seed = seed
        self.samples: list = []
        self.latest_batch = 0
        self.feature_keys = sorted(
            {key for stage in graph.stages for key in stage.features}
        )
        self._per_stage: dict = {}
        self._global_coef: Optional[np.ndarray] = None
        self._net: Optional[dict] = None
        self._fallback = 1.0

    # -- feature construction -------------------------------------------------

    def _descriptor(self, stage_id: str) -> np.ndarray:
        features = self.graph.stage(stage_id).features
        return np.array([1.0] + [float(features.get(k, 0.0)) for k in self.feature_keys])

    def _row(self, stage_id: str, scale_out: int) -> np.ndarray:
        basis = featurize(scale_out, self.data_gb)
        if self.kind == KIND_GLOBAL:
            return np.kron(self._descriptor(stage_id), basis)
        return np.concatenate([self._descriptor(stage_id), basis])

    # -- fitting ---------------------------------------------------------------

    def _weights(self) -> np.ndarray:
        return np.array(
            [RECENCY_WEIGHT if s.batch == self.latest_batch else 1.0 for s in self.samples]
        )

    def fit(self, runs: Iterable, reset: bool = True) -> "StageRuntimeModel":
        """Initial fit from bootstrap stage runs (weight 1 for all)."""
        if reset:
            self.samples = []
            self.latest_batch = 0
        for run in runs:
            self.samples.append(
                StageSample(run.stage_id, run.scale_out, run.runtime_s, batch=0)
            )
        self._refit()
        return self

    def _refit(self) -> None:
        if not self.samples:
            raise ValidationError("cannot fit a stage model without samples")
        weights = self._weights()
        runtimes = np.array([s.runtime_s for s in self.samples])
        self._fallback = float(np.average(runtimes, weights=weights))
        if self.kind == KIND_PER_STAGE:
            self._per_stage = {}
            for stage in self.graph.stages:
                idx = [i for i, s in enumerate(self.samples) if s.stage_id == stage.stage_id]
                if len(idx) < 4 or len({self.samples[i].scale_out for i in idx}) < 2:
                    continue
                X = np.array([featurize(self.samples[i].scale_out, self.data_gb) for i in idx])
                y = runtimes[idx]
                self._per_stage[stage.stage_id] = solve_nnls(X, y, sample_weight=weights[idx])
        elif self.kind == KIND_GLOBAL:
            if len(self.samples) >= 4 and len({s.scale_out for s in self.samples}) >= 2:
                X = np.array([self._row(s.stage_id, s.scale_out) for s in self.samples])
                self._global_coef = solve_nnls(X, runtimes, sample_weight=weights)
            else:
                self._global_coef = None
        else:
            self._refit_neural(weights, runtimes)

    def _refit_neural(self, weights: np.ndarray, runtimes: np.ndarray) -> None:
        X = np.array([self._row(s.stage_id, s.scale_out) for s in self.samples])
        y = np.log(runtimes)
        if self._net is None:
            rng = np.random.default_rng(self.seed)
            std = X.std(axis=0)
            std[std < 1e-9] = 1.0
            in_dim = X.shape[1]
            self._net = {
                "mean": X.mean(axis=0),
                "std": std,
                "w_h": rng.uniform(-1, 1, size=(_NEURAL_HIDDEN, in_dim)) / np.sqrt(in_dim),
                "b_h": np.zeros(_NEURAL_HIDDEN),
                "w_o": rng.uniform(-1, 1, size=_NEURAL_HIDDEN) / np.sqrt(_NEURAL_HIDDEN),
                "b_o": float(y.mean()),
            }
            epochs, lr, train_hidden = _NEURAL_FIT_EPOCHS, _NEURAL_FIT_LR, True
        else:
            # Online update tunes the output layer only, on the union of runs.
            epochs, lr, train_hidden = _NEURAL_UPDATE_EPOCHS, _NEURAL_UPDATE_LR, False
        net = self._net
        Xs = (X - net["mean"]) / net["std"]
        w = weights / weights.sum()
        for _ in range(epochs):
            hidden = sigmoid(Xs @ net["w_h"].T + net["b_h"])
            pred = hidden @ net["w_o"] + net["b_o"]
            d_pred = 2.0 * w * (pred - y)
            net["w_o"] = net["w_o"] - lr * (hidden.T @ d_pred)
            net["b_o"] = net["b_o"] - lr * float(d_pred.sum())
            if train_hidden:
                d_hidden = np.outer(d_pred, net["w_o"]) * hidden * (1.0 - hidden)
                net["w_h"] = net["w_h"] - lr * (d_hidden.T @ Xs)
                net["b_h"] = net["b_h"] - lr * d_hidden.sum(axis=0)

    # -- online updates ----------------------------------------------------

    def observe(self, runs: list, exclude: Optional[list] = None) -> "StageRuntimeModel":
        """Ingest a barrier's runs (minus excluded anomalies) and refit with
        doubled weight on this newest batch."""
        if not runs:
            raise ValidationError("no new runs to learn from")
        if exclude is None:
            exclude = [False] * len(runs)
        kept = [r for r, flag in zip(runs, exclude) if not flag]
        if not kept:
            return self
        self.latest_batch += 1
        for run in kept:
            self.samples.append(
                StageSample(run.stage_id, run.scale_out, run.runtime_s, batch=self.latest_batch)
            )
        self._refit()
        return self

    # -- prediction ----------------------------------------------------------

    def predict_stage(self, stage_id: str, scale_out: int) -> float:
        if self.kind == KIND_PER_STAGE:
            coef = self._per_stage.get(stage_id)
            if coef is None:
                return self._fallback
            return max(float(coef @ featurize(scale_out, self.data_gb)), 1e-12)
        if self.kind == KIND_GLOBAL:
            if self._global_coef is None:
                return self._fallback
            return max(float(self._global_coef @ self._row(stage_id, scale_out)), 1e-12)
        net = self._net
        if net is None:
            return self._fallback
        x = (self._row(stage_id, scale_out) - net["mean"]) / net["std"]
        hidden = sigmoid(net["w_h"] @ x + net["b_h"])
        return float(np.exp(hidden @ net["w_o"] + net["b_o"]))

    def predict_iteration(self, scale_out: int) -> float:
        """Predicted duration of one steady-state iteration at a scale-out:
        critical path over the per-iteration stages."""
        durations = {
            s.stage_id: self.predict_stage(s.stage_id, scale_out)
            for s in self.graph.stages
            if s.per_iteration
        }
        return self.graph.critical_path(durations)


def update_model_online(model: StageRuntimeModel, new_runs: list, exclude: Optional[list] = None) -> StageRuntimeModel:
    """Refit the predictor with a barrier's new runs; anomalous runs are
    dropped before they can contaminate the fit."""
    if not new_runs:
        raise ValidationError("no new runs to learn from")
    return model.observe(new_runs, exclude)


def detect_anomaly(recent_runs: list, model: StageRuntimeModel, threshold: float = ANOMALY_THRESHOLD) -> list:
    """Flag runs whose observed runtime exceeds threshold x prediction."""
    flags = []
    for run in recent_runs:
        predicted = model.predict_stage(run.stage_id, run.scale_out)
        flags.append(run.runtime_s > threshold * predicted)
    return flags
