"""Nonnegative least squares via preconditioned projected gradient descent.

The iteration is accelerated with Nesterov momentum (restarted whenever it
would overshoot) on a column-normalized system, and terminates early once a
KKT-verified active-set solve reproduces the iterate exactly. Plain projected
gradient on the raw system stalls far from the optimum on the badly scaled
scale-out basis, which the recovery tests would catch.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from ..errors import UndertrainedError

DEFAULT_MAX_ITER = 10_000
DEFAULT_TOL = 1e-10


def solve_nnls(
    X: np.ndarray,
    y: np.ndarray,
    sample_weight: Optional[np.ndarray] = None,
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = DEFAULT_TOL,
    polish_every: int = 25,
) -> np.ndarray:
    """Minimize ||X theta - y||_2 subject to theta >= 0.

    Rows may carry nonnegative sample weights (applied as sqrt-weight row
    scaling). Deterministic; returns the coefficient vector.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise ValueError(f"incompatible shapes {X.shape} and {y.shape}")
    if sample_weight is not None:
        w = np.asarray(sample_weight, dtype=float)
        if (w < 0).any():
            raise ValueError("sample weights must be nonnegative")
        root = np.sqrt(w)
        X = X * root[:, None]
        y = y * root

    col_scale = np.linalg.norm(X, axis=0)
    col_scale[col_scale == 0.0] = 1.0
    Xs = X / col_scale
    gram = Xs.T @ Xs
    moment = Xs.T @ y
    step_bound = float(np.linalg.norm(gram, "fro"))
    n_coef = Xs.shape[1]
    if step_bound == 0.0:
        return np.zeros(n_coef)
    y_norm2 = float(y @ y)
    grad_scale = max(1.0, float(np.abs(moment).max()))

    def objective(theta: np.ndarray) -> float:
        return float(theta @ gram @ theta - 2.0 * moment @ theta + y_norm2)

    def polish(theta: np.ndarray) -> Optional[np.ndarray]:
        # Exact solve on the predicted active set; accepted only if the
        # KKT conditions hold, in which case it is the global optimum.
        grad = gram @ theta - moment
        free = (theta > 0.0) | (grad < 0.0)
        candidate = np.zeros(n_coef)
        if free.any():
            sol, *_ = np.linalg.lstsq(Xs[:, free], y, rcond=None)
            if (sol < -1e-9 * max(1.0, float(np.abs(sol).max()))).any():
                return None
            candidate[free] = np.maximum(sol, 0.0)
        grad_c = gram @ candidate - moment
        zero = candidate == 0.0
        if (grad_c[zero] < -1e-8 * grad_scale).any():
            return None
        if (~zero).any() and float(np.abs(grad_c[~zero]).max()) > 1e-8 * grad_scale:
            return None
        if objective(candidate) > objective(theta) + 1e-12 * max(1.0, y_norm2):
            return None
        return candidate

    theta = np.zeros(n_coef)
    lookahead = theta.copy()
    momentum = 1.0
    obj = objective(theta)
    for it in range(max_iter):
        grad = gram @ lookahead - moment
        nxt = np.maximum(lookahead - grad / step_bound, 0.0)
        new_obj = objective(nxt)
        if new_obj > obj:
            grad = gram @ theta - moment
            nxt = np.maximum(theta - grad / step_bound, 0.0)
            new_obj = objective(nxt)
            momentum = 1.0
            lookahead = theta.copy()
        next_momentum = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * momentum * momentum))
        lookahead = nxt + ((momentum - 1.0) / next_momentum) * (nxt - theta)
        theta = nxt
        momentum = next_momentum
        stalled = abs(obj - new_obj) / max(abs(obj), 1e-30) < tol
        obj = new_obj
        if stalled or (it + 1) % polish_every == 0:
            candidate = polish(theta)
            if candidate is not None:
                return candidate / col_scale
    candidate = polish(theta)
    if candidate is not None:
        theta = candidate
    return theta / col_scale


def check_design(X: np.ndarray, scale_outs, min_records: int) -> None:
    """Reject training sets too small or too degenerate to identify the basis."""
    n = X.shape[0]
    if n < min_records:
        raise UndertrainedError(f"need at least {min_records} records, got {n}")
    if len(set(int(s) for s in scale_outs)) < 2:
        raise UndertrainedError("need at least 2 distinct scale-outs to fit scaling behavior")
