"""Data-driven model of the time cost of changing the scale-out mid-job."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Conservative defaults used until enough rescale events are observed.
PRIOR_ALPHA = 30.0
PRIOR_BETA = 2.0
MIN_OBSERVATIONS = 3


@dataclass
class OverheadModel:
    alpha: float
    beta: float
    n_observations: int = 0

    def predict(self, s_from: int, s_to: int) -> float:
        if s_from == s_to:
            return 0.0
        return max(0.0, self.alpha + self.beta * abs(s_to - s_from))


def learn_overhead(history: list, prior: tuple = (PRIOR_ALPHA, PRIOR_BETA)) -> OverheadModel:
    """Least-squares fit of overhead = alpha + beta * |delta scale-out| on
    observed rescale events, falling back to the prior below 3 observations."""
    events = [e for e in history if e.from_scale_out != e.to_scale_out]
    if len(events) < MIN_OBSERVATIONS:
        return OverheadModel(alpha=prior[0], beta=prior[1], n_observations=len(events))
    deltas = np.array([abs(e.to_scale_out - e.from_scale_out) for e in events], dtype=float)
    observed = np.array([e.overhead_s for e in events], dtype=float)
    X = np.column_stack([np.ones_like(deltas), deltas])
    coef, *_ = np.linalg.lstsq(X, observed, rcond=None)
    return OverheadModel(alpha=float(coef[0]), beta=float(coef[1]), n_observations=len(events))
