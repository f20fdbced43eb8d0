"""Hashing-based binary encoding of execution contexts.

Descriptive strings of a context are tokenized and hashed into a fixed-width
bit vector, which the neural model's encoder compresses into a dense latent
representation. Numeric parameter values are bucketed by decade so nearby
settings share a token.
"""

from __future__ import annotations

import hashlib
import math
from typing import Iterable

import numpy as np

from ..records import ExecutionContext

DEFAULT_INPUT_DIM = 64
DEFAULT_LATENT_DIM = 8


def _bucket(value) -> str:
    if isinstance(value, str):
        return value
    if value == 0:
        return "0"
    magnitude = int(math.floor(math.log10(abs(value))))
    return f"{'-' if value < 0 else ''}e{magnitude}"


def context_tokens(context: ExecutionContext, catalog: Iterable = ()) -> list:
    tokens = [f"alg:{context.job.algorithm}"]
    for key in sorted(context.job.params):
        tokens.append(f"param:{key}={_bucket(context.job.params[key])}")
    tokens.append(f"machine:{context.machine}")
    for machine in catalog:
        if machine.name == context.machine:
            tokens.append(f"cat:{machine.category}")
            break
    tokens.append(f"origin:{context.origin}")
    return tokens


def _token_bit(token: str, dim: int) -> int:
    digest = hashlib.sha256(token.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") % dim


def encode_context(
    context: ExecutionContext, dim: int = DEFAULT_INPUT_DIM, catalog: Iterable = ()
) -> np.ndarray:
    """Deterministic 0/1 vector of width `dim` for a context."""
    vector = np.zeros(dim)
    for token in context_tokens(context, catalog):
        vector[_token_bit(token, dim)] = 1.0
    return vector
