"""Neural runtime model: hashed-context encoder plus a small prediction head.

The encoder compresses a context bit vector into a latent code; the head maps
latent code and scale-out features through one logistic hidden layer to the
log runtime. Trained from scratch or pretrained on global data, after which
the encoder is frozen and only the head is tuned on local records.
"""

from __future__ import annotations

import dataclasses
from typing import Iterable, Optional

import numpy as np

from ..errors import UndertrainedError, ValidationError
from ..records import ExecutionContext
from . import autoencoder, base
from .encoding import DEFAULT_INPUT_DIM, DEFAULT_LATENT_DIM, encode_context
from .features import design_matrix, featurize

MODE_SCRATCH = "scratch"
MODE_PRETRAIN = "pretrain"
MODE_FINE_TUNE = "fine_tune"

DEFAULT_HIDDEN_DIM = 16
DEFAULT_EPOCHS = 500
DEFAULT_LR = 0.1
MIN_RECORDS_FULL = 12
MIN_RECORDS_FINE_TUNE = 3


def _sigmoid(z):
    return autoencoder.sigmoid(z)


def head_forward(head: dict, inputs: np.ndarray) -> np.ndarray:
    hidden = _sigmoid(inputs @ head["w_h"].T + head["b_h"])
    return hidden @ head["w_o"] + head["b_o"]


def loss_and_grads(
    encoder: dict,
    head: dict,
    ctx_vectors: np.ndarray,
    features: np.ndarray,
    targets: np.ndarray,
    train_encoder: bool,
) -> tuple[float, dict, dict]:
    """Squared-error loss on log runtimes with backprop gradients.

    Returns (loss, encoder grads, head grads); encoder grads are zero when
    the encoder is frozen.
    """
    n = ctx_vectors.shape[0]
    latent = _sigmoid(ctx_vectors @ encoder["w_enc"].T + encoder["b_enc"])
    inputs = np.concatenate([latent, features], axis=1)
    hidden = _sigmoid(inputs @ head["w_h"].T + head["b_h"])
    pred = hidden @ head["w_o"] + head["b_o"]
    diff = pred - targets
    loss = float(np.mean(diff**2))
    d_pred = (2.0 / n) * diff
    d_hidden = np.outer(d_pred, head["w_o"]) * hidden * (1.0 - hidden)
    head_grads = {
        "w_o": hidden.T @ d_pred,
        "b_o": float(d_pred.sum()),
        "w_h": d_hidden.T @ inputs,
        "b_h": d_hidden.sum(axis=0),
    }
    enc_grads = {"w_enc": np.zeros_like(encoder["w_enc"]), "b_enc": np.zeros_like(encoder["b_enc"])}
    if train_encoder:
        latent_dim = latent.shape[1]
        d_inputs = d_hidden @ head["w_h"]
        d_latent = d_inputs[:, :latent_dim] * latent * (1.0 - latent)
        enc_grads = {"w_enc": d_latent.T @ ctx_vectors, "b_enc": d_latent.sum(axis=0)}
    return loss, enc_grads, head_grads


def _init_head(latent_dim: int, hidden_dim: int, target_mean: float, rng: np.random.Generator) -> dict:
    in_dim = latent_dim + 4
    return {
        "w_h": rng.uniform(-1.0, 1.0, size=(hidden_dim, in_dim)) / np.sqrt(in_dim),
        "b_h": np.zeros(hidden_dim),
        "w_o": rng.uniform(-1.0, 1.0, size=hidden_dim) / np.sqrt(hidden_dim),
        "b_o": float(target_mean),
    }


def _fit_scaler(features: np.ndarray) -> dict:
    std = features.std(axis=0)
    std[std < 1e-9] = 1.0
    return {"mean": features.mean(axis=0), "std": std}


def _apply_scaler(scaler: dict, features: np.ndarray) -> np.ndarray:
    return (features - np.asarray(scaler["mean"])) / np.asarray(scaler["std"])


def _train(
    encoder: dict,
    head: dict,
    ctx_vectors: np.ndarray,
    features: np.ndarray,
    targets: np.ndarray,
    epochs: int,
    lr: float,
    train_encoder: bool,
) -> list:
    history = []
    for _ in range(epochs):
        loss, enc_grads, head_grads = loss_and_grads(
            encoder, head, ctx_vectors, features, targets, train_encoder
        )
        history.append(loss)
        for key in head:
            head[key] = head[key] - lr * head_grads[key]
        if train_encoder:
            for key in encoder:
                encoder[key] = encoder[key] - lr * enc_grads[key]
    return history


def _records_to_arrays(records: list, input_dim: int, catalog: Iterable) -> tuple:
    ctx_vectors = np.array([encode_context(r.context, input_dim, catalog) for r in records])
    features = design_matrix([r.scale_out for r in records], [r.data_size_gb for r in records])
    targets = np.log(np.array([r.runtime_s for r in records], dtype=float))
    return ctx_vectors, features, targets


def _pack(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    return value


def _params_to_json(encoder: dict, head: dict, scaler: dict) -> dict:
    return {
        "encoder": {k: _pack(v) for k, v in encoder.items()},
        "head": {k: _pack(v) for k, v in head.items()},
        "scaler": {k: _pack(v) for k, v in scaler.items()},
    }


def _unpack_block(block: dict) -> dict:
    return {
        k: (np.asarray(v, dtype=float) if isinstance(v, list) else float(v))
        for k, v in block.items()
    }


def fit_neural(
    records: list,
    pretrained: Optional[base.TrainedModel] = None,
    mode: str = MODE_SCRATCH,
    seed: int = 42,
    catalog: Iterable = (),
    input_dim: int = DEFAULT_INPUT_DIM,
    latent_dim: int = DEFAULT_LATENT_DIM,
    hidden_dim: int = DEFAULT_HIDDEN_DIM,
    epochs: int = DEFAULT_EPOCHS,
    lr: float = DEFAULT_LR,
    autoencoder_epochs: int = autoencoder.DEFAULT_EPOCHS,
    min_records: Optional[int] = None,
) -> base.TrainedModel:
    """Train the neural runtime model.

    scratch and pretrain train encoder and head jointly (the encoder is
    warm-started by the autoencoder when enough distinct contexts exist);
    fine_tune freezes a pretrained encoder and tunes the head on new records.
    """
    if mode not in (MODE_SCRATCH, MODE_PRETRAIN, MODE_FINE_TUNE):
        raise ValidationError(f"unknown mode {mode!r}")
    if mode == MODE_FINE_TUNE:
        if pretrained is None or pretrained.kind != base.KIND_NEURAL:
            raise ValidationError("fine_tune requires a pretrained neural model")
        needed = MIN_RECORDS_FINE_TUNE if min_records is None else min_records
    else:
        needed = MIN_RECORDS_FULL if min_records is None else min_records
    if len(records) < needed:
        raise UndertrainedError(f"{mode} needs at least {needed} records, got {len(records)}")

    rng = np.random.default_rng(seed)
    if mode == MODE_FINE_TUNE:
        dims = pretrained.params["dims"]
        input_dim, latent_dim = dims["input"], dims["latent"]
        encoder = _unpack_block(pretrained.params["encoder"])
        head = _unpack_block(pretrained.params["head"])
        ctx_vectors, features, targets = _records_to_arrays(records, input_dim, catalog)
        # The frozen encoder is what transfers; the feature scaler must match
        # the data the head is being tuned on or the hidden layer saturates.
        scaler = _fit_scaler(features)
        history = _train(
            encoder, head, ctx_vectors, _apply_scaler(scaler, features), targets,
            epochs, lr, train_encoder=False,
        )
        dims = dict(dims)
    else:
        ctx_vectors, features, targets = _records_to_arrays(records, input_dim, catalog)
        distinct = len({tuple(v) for v in ctx_vectors})
        if distinct >= autoencoder.MIN_DISTINCT_VECTORS:
            ae_params, _ = autoencoder.train_autoencoder(
                ctx_vectors, latent_dim, epochs=autoencoder_epochs, rng=rng
            )
            encoder = {"w_enc": ae_params["w_enc"], "b_enc": ae_params["b_enc"]}
        else:
            ae_params = autoencoder.init_params(input_dim, latent_dim, rng)
            encoder = {"w_enc": ae_params["w_enc"], "b_enc": ae_params["b_enc"]}
        scaler = _fit_scaler(features)
        head = _init_head(latent_dim, hidden_dim, float(targets.mean()), rng)
        history = _train(
            encoder, head, ctx_vectors, _apply_scaler(scaler, features), targets,
            epochs, lr, train_encoder=True,
        )
        dims = {"input": input_dim, "latent": latent_dim, "hidden": hidden_dim}

    params = {
        "dims": dims,
        "seed": seed,
        "mode": mode,
        "final_loss": history[-1] if history else 0.0,
        **_params_to_json(encoder, head, scaler),
    }
    model = base.TrainedModel(
        kind=base.KIND_NEURAL,
        params=params,
        training_fingerprint=base.training_fingerprint(records),
    )
    model.val_error = base.evaluate(model, records, catalog)
    return model


def predict(
    model: base.TrainedModel,
    context: ExecutionContext,
    machine: Optional[str],
    scale_out: int,
    data_size_gb: float,
    catalog: Iterable = (),
) -> float:
    """Runtime prediction; the candidate machine substitutes the context's
    machine so the encoding reflects the configuration being scored."""
    params = model.params
    if machine is not None and machine != context.machine:
        context = dataclasses.replace(context, machine=machine)
    vector = encode_context(context, params["dims"]["input"], catalog)[None, :]
    encoder = _unpack_block(params["encoder"])
    head = _unpack_block(params["head"])
    scaler = _unpack_block(params["scaler"])
    features = _apply_scaler(scaler, featurize(scale_out, data_size_gb)[None, :])
    latent = _sigmoid(vector @ encoder["w_enc"].T + encoder["b_enc"])
    log_pred = head_forward(head, np.concatenate([latent, features], axis=1))
    return float(np.exp(log_pred[0]))
