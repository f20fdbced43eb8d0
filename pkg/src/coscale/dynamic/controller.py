"""Barrier-triggered rescaling policies for the simulator."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..optimizer import RuntimeTarget
from .graph import SimState
from .overhead import OverheadModel, learn_overhead
from .predictor import StageRuntimeModel, detect_anomaly, update_model_online

SAFETY_MARGIN = 0.1


def rescale_decision(
    state: SimState,
    model: StageRuntimeModel,
    overhead_model: OverheadModel,
    target: RuntimeTarget,
    bounds: tuple,
    step: int = 1,
    safety_margin: float = SAFETY_MARGIN,
) -> int:
    """Scale-out to use for the remaining iterations.

    Picks the smallest candidate whose predicted remaining time (including
    the overhead of changing, if any) fits the remaining budget minus a
    safety margin; if none fits, the candidate minimizing predicted
    remaining time, keeping the current scale-out on ties.
    """
    budget = target.target_s - state.elapsed_s
    lo, hi = bounds
    candidates = sorted(set(range(lo, hi + 1, step)) | {state.scale_out})
    remaining = {}
    for s in candidates:
        predicted = model.predict_iteration(s) * state.remaining_iterations
        if s != state.scale_out:
            predicted += overhead_model.predict(state.scale_out, s)
        remaining[s] = predicted
    cushion = budget - safety_margin * budget
    fits = [s for s in candidates if remaining[s] <= cushion]
    if fits:
        return min(fits)
    best = min(remaining.values())
    if remaining[state.scale_out] == best:
        return state.scale_out
    return min(s for s in candidates if remaining[s] == best)


class StaticPolicy:
    """Baseline: never rescale."""

    def on_barrier(self, state: SimState, last_runs: list, iteration: int) -> int:
        return state.scale_out


@dataclass
class DetectionLog:
    flagged: list = field(default_factory=list)
    actual: list = field(default_factory=list)

    def precision(self) -> float:
        tp = sum(1 for f, a in zip(self.flagged, self.actual) if f and a)
        fp = sum(1 for f, a in zip(self.flagged, self.actual) if f and not a)
        return tp / (tp + fp) if tp + fp else 1.0

    def recall(self) -> float:
        tp = sum(1 for f, a in zip(self.flagged, self.actual) if f and a)
        fn = sum(1 for f, a in zip(self.flagged, self.actual) if not f and a)
        return tp / (tp + fn) if tp + fn else 1.0


class BarrierRescalePolicy:
    """Monitors runs, maintains the stage model and overhead model online,
    and re-decides the scale-out at every synchronization barrier."""

    def __init__(
        self,
        model: StageRuntimeModel,
        target: RuntimeTarget,
        bounds: tuple,
        step: int = 1,
        safety_margin: float = SAFETY_MARGIN,
        anomaly_threshold: float = 2.0,
        eval_every: int = 1,
    ):
        self.model = model
        self.target = target
        self.bounds = bounds
        self.step = step
        self.safety_margin = safety_margin
        self.anomaly_threshold = anomaly_threshold
        self.eval_every = max(1, eval_every)
        self.detections = DetectionLog()
        self.overhead_model: Optional[OverheadModel] = None

    def on_barrier(self, state: SimState, last_runs: list, iteration: int) -> int:
        flags = detect_anomaly(last_runs, self.model, self.anomaly_threshold)
        self.detections.flagged.extend(flags)
        self.detections.actual.extend(run.anomalous for run in last_runs)
        if not all(flags):
            update_model_online(self.model, last_runs, exclude=flags)
        self.overhead_model = learn_overhead(state.rescales)
        # Anomalies force an evaluation even on barriers the cadence would skip.
        if (iteration + 1) % self.eval_every != 0 and not any(flags):
            return state.scale_out
        return rescale_decision(
            state, self.model, self.overhead_model, self.target,
            self.bounds, self.step, self.safety_margin,
        )
