"""Single-hidden-layer autoencoder trained from scratch with numpy.

Compresses hashed context vectors into a low-dimensional latent code. Both
layers use logistic activations; training is full-batch gradient descent on
the mean squared reconstruction error, bitwise reproducible for a fixed seed.
"""

from __future__ import annotations

import warnings
from typing import Optional

import numpy as np

from ..errors import ValidationError

DEFAULT_EPOCHS = 2000
DEFAULT_LR = 0.5
MIN_DISTINCT_VECTORS = 8

_LOGIT_CLIP = 1e-6


def sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def init_params(input_dim: int, latent_dim: int, rng: np.random.Generator) -> dict:
    bound_in = 1.0 / np.sqrt(input_dim)
    bound_lat = 1.0 / np.sqrt(latent_dim)
    return {
        "w_enc": rng.uniform(-bound_in, bound_in, size=(latent_dim, input_dim)),
        "b_enc": np.zeros(latent_dim),
        "w_dec": rng.uniform(-bound_lat, bound_lat, size=(input_dim, latent_dim)),
        "b_dec": np.zeros(input_dim),
    }


def encode(params: dict, vectors: np.ndarray) -> np.ndarray:
    return sigmoid(vectors @ params["w_enc"].T + params["b_enc"])


def reconstruct(params: dict, vectors: np.ndarray) -> np.ndarray:
    return sigmoid(encode(params, vectors) @ params["w_dec"].T + params["b_dec"])


def loss_and_grads(params: dict, vectors: np.ndarray) -> tuple[float, dict]:
    """Mean squared reconstruction error and its gradients (backprop)."""
    n, dim = vectors.shape
    latent = encode(params, vectors)
    output = sigmoid(latent @ params["w_dec"].T + params["b_dec"])
    diff = output - vectors
    loss = float(np.mean(diff**2))
    # d loss / d output, then through the logistic nonlinearities.
    d_out = (2.0 / (n * dim)) * diff * output * (1.0 - output)
    d_latent = d_out @ params["w_dec"] * latent * (1.0 - latent)
    grads = {
        "w_dec": d_out.T @ latent,
        "b_dec": d_out.sum(axis=0),
        "w_enc": d_latent.T @ vectors,
        "b_enc": d_latent.sum(axis=0),
    }
    return loss, grads


def train_autoencoder(
    vectors: np.ndarray,
    latent_dim: int = 8,
    seed: int = 42,
    epochs: int = DEFAULT_EPOCHS,
    lr: float = DEFAULT_LR,
    rng: Optional[np.random.Generator] = None,
) -> tuple[dict, list]:
    """Train on a stack of input vectors; returns (params, loss history).

    All-identical inputs are degenerate: a warning is issued and trivially
    fitted parameters reproducing the constant vector are returned.
    """
    vectors = np.asarray(vectors, dtype=float)
    if vectors.ndim != 2:
        raise ValidationError("vectors must be a 2-d array")
    n, dim = vectors.shape
    distinct = len({tuple(v) for v in vectors})
    if distinct < 2:
        warnings.warn("all context vectors are identical; returning trivially fitted params")
        mean = np.clip(vectors.mean(axis=0), _LOGIT_CLIP, 1.0 - _LOGIT_CLIP)
        params = {
            "w_enc": np.zeros((latent_dim, dim)),
            "b_enc": np.zeros(latent_dim),
            "w_dec": np.zeros((dim, latent_dim)),
            "b_dec": np.log(mean / (1.0 - mean)),
        }
        loss, _ = loss_and_grads(params, vectors)
        return params, [loss]
    if distinct < MIN_DISTINCT_VECTORS:
        raise ValidationError(
            f"need at least {MIN_DISTINCT_VECTORS} distinct vectors, got {distinct}"
        )
    params = init_params(dim, latent_dim, rng or np.random.default_rng(seed))
    history = []
    for _ in range(epochs):
        loss, grads = loss_and_grads(params, vectors)
        history.append(loss)
        for key in params:
            params[key] = params[key] - lr * grads[key]
    history.append(loss_and_grads(params, vectors)[0])
    return params, history
