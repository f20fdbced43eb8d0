"""Paired dynamic-vs-static simulation experiments with anomaly injection."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..optimizer import RuntimeTarget
from .controller import BarrierRescalePolicy, StaticPolicy
from .predictor import StageRuntimeModel
from .sim import SimResult, bootstrap_runs, simulate

BOOTSTRAP_SCALE_OUTS = (4, 12, 24, 36)


@dataclass
class PairedOutcome:
    seed: int
    static_elapsed_s: float
    dynamic_elapsed_s: float
    static_met: bool
    dynamic_met: bool
    flagged: list
    actual: list
    dynamic_result: SimResult
    static_result: SimResult


@dataclass
class ExperimentSummary:
    outcomes: list = field(default_factory=list)

    @property
    def static_met(self) -> int:
        return sum(1 for o in self.outcomes if o.static_met)

    @property
    def dynamic_met(self) -> int:
        return sum(1 for o in self.outcomes if o.dynamic_met)

    def _counts(self) -> tuple:
        tp = fp = fn = 0
        for o in self.outcomes:
            for f, a in zip(o.flagged, o.actual):
                tp += f and a
                fp += f and not a
                fn += (not f) and a
        return tp, fp, fn

    def precision(self) -> float:
        tp, fp, _ = self._counts()
        return tp / (tp + fp) if tp + fp else 1.0

    def recall(self) -> float:
        tp, _, fn = self._counts()
        return tp / (tp + fn) if tp + fn else 1.0

    def to_dict(self) -> dict:
        return {
            "runs": len(self.outcomes),
            "static_met_target": self.static_met,
            "dynamic_met_target": self.dynamic_met,
            "detector_precision": self.precision(),
            "detector_recall": self.recall(),
        }


def run_paired_experiment(
    spec: dict,
    runs: int = 65,
    base_seed: int = 42,
    model_kind: str = "per_stage",
) -> ExperimentSummary:
    """Simulate each seed twice, with the barrier controller and with the
    static baseline, under identical noise and anomaly schedules."""
    graph = spec["graph"]
    truth = spec["truth"]
    target = RuntimeTarget(target_s=spec["target_s"], hard=spec["hard"])
    bounds = spec["bounds"]
    initial = spec["initial_scale_out"]
    summary = ExperimentSummary()
    for i in range(runs):
        seed = base_seed + i
        static_result = simulate(graph, truth, StaticPolicy(), initial, seed=seed, bounds=bounds)
        history = bootstrap_runs(graph, truth, list(BOOTSTRAP_SCALE_OUTS), seed=seed)
        model = StageRuntimeModel(graph, truth.data_gb, kind=model_kind, seed=seed).fit(history)
        policy = BarrierRescalePolicy(model, target, bounds)
        dynamic_result = simulate(graph, truth, policy, initial, seed=seed, bounds=bounds)
        summary.outcomes.append(
            PairedOutcome(
                seed=seed,
                static_elapsed_s=static_result.elapsed_s,
                dynamic_elapsed_s=dynamic_result.elapsed_s,
                static_met=static_result.elapsed_s <= target.target_s,
                dynamic_met=dynamic_result.elapsed_s <= target.target_s,
                flagged=list(policy.detections.flagged),
                actual=list(policy.detections.actual),
                dynamic_result=dynamic_result,
                static_result=static_result,
            )
        )
    return summary
