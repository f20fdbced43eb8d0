"""Candidate enumeration, cost estimation, and configuration recommendation."""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import ValidationError
from .models import TrainedModel, predict_runtime
from .records import ExecutionContext, MachineType

OBJECTIVE_MIN_COST = "min_cost"
OBJECTIVE_MIN_RUNTIME = "min_runtime"

DEFAULT_SCALE_OUT_MIN = 4
DEFAULT_SCALE_OUT_MAX = 36

CSV_HEADER = "machine,scale_out,predicted_runtime_s,predicted_cost,feasible"


@dataclass
class CandidateConfig:
    machine: str
    scale_out: int


@dataclass
class RuntimeTarget:
    target_s: float
    hard: bool = False

    def validate(self) -> None:
        if not self.target_s > 0:
            raise ValidationError(f"target_s must be > 0, got {self.target_s!r}")


@dataclass
class RankedCandidate:
    candidate: CandidateConfig
    predicted_runtime_s: float
    predicted_cost: float
    feasible: bool


@dataclass
class Recommendation:
    chosen: Optional[CandidateConfig]
    predicted_runtime_s: Optional[float]
    predicted_cost: Optional[float]
    feasible: bool
    ranking: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "chosen": None
            if self.chosen is None
            else {"machine": self.chosen.machine, "scale_out": self.chosen.scale_out},
            "predicted_runtime_s": self.predicted_runtime_s,
            "predicted_cost": self.predicted_cost,
            "feasible": self.feasible,
            "ranking": [
                {
                    "machine": r.candidate.machine,
                    "scale_out": r.candidate.scale_out,
                    "predicted_runtime_s": r.predicted_runtime_s,
                    "predicted_cost": r.predicted_cost,
                    "feasible": r.feasible,
                }
                for r in self.ranking
            ],
        }


def enumerate_candidates(
    catalog: list,
    scale_out_min: int = DEFAULT_SCALE_OUT_MIN,
    scale_out_max: int = DEFAULT_SCALE_OUT_MAX,
    step: int = 1,
) -> list:
    """Cartesian product of machine types and scale-outs, in catalog order
    then ascending scale-out."""
    if not catalog:
        raise ValidationError("catalog must not be empty")
    if step < 1 or scale_out_max < scale_out_min or scale_out_min < 1:
        raise ValidationError(
            f"invalid scale-out range {scale_out_min}..{scale_out_max} step {step}"
        )
    scale_outs = range(scale_out_min, scale_out_max + 1, step)
    return [
        CandidateConfig(machine=m.name, scale_out=s) for m in catalog for s in scale_outs
    ]


def estimate_cost(
    candidate: CandidateConfig, predicted_runtime_s: float, catalog: Iterable[MachineType]
) -> float:
    """Cost in catalog units: hourly price x nodes x predicted hours."""
    if predicted_runtime_s <= 0:
        raise ValidationError(f"predicted runtime must be > 0, got {predicted_runtime_s!r}")
    for machine in catalog:
        if machine.name == candidate.machine:
            return machine.price_per_hour * candidate.scale_out * predicted_runtime_s / 3600.0
    raise ValidationError(f"unknown machine type {candidate.machine!r}")


def recommend(
    model: TrainedModel,
    context: ExecutionContext,
    data_size_gb: float,
    candidates: list,
    target: RuntimeTarget,
    objective: str = OBJECTIVE_MIN_COST,
    catalog: Iterable[MachineType] = (),
) -> Recommendation:
    """Score every candidate and pick the best under the runtime target.

    min_cost prefers the cheapest feasible candidate (ties: lower runtime,
    then lower scale-out, then enumeration order); min_runtime the fastest
    (ties: lower cost, then lower scale-out, then enumeration order). With a
    hard target and nothing feasible there is no choice; with a soft target
    the candidate minimizing predicted runtime is returned instead.
    """
    if not candidates:
        raise ValidationError("candidates must not be empty")
    if objective not in (OBJECTIVE_MIN_COST, OBJECTIVE_MIN_RUNTIME):
        raise ValidationError(f"unknown objective {objective!r}")
    target.validate()
    catalog = list(catalog)

    ranked = []
    for candidate in candidates:
        runtime = predict_runtime(model, context, candidate, data_size_gb, catalog)
        cost = estimate_cost(candidate, runtime, catalog)
        ranked.append(
            RankedCandidate(
                candidate=candidate,
                predicted_runtime_s=runtime,
                predicted_cost=cost,
                feasible=runtime <= target.target_s,
            )
        )

    def objective_key(idx: int):
        r = ranked[idx]
        if objective == OBJECTIVE_MIN_COST:
            return (r.predicted_cost, r.predicted_runtime_s, r.candidate.scale_out, idx)
        return (r.predicted_runtime_s, r.predicted_cost, r.candidate.scale_out, idx)

    order = sorted(range(len(ranked)), key=lambda i: (not ranked[i].feasible,) + objective_key(i))
    ranking = [ranked[i] for i in order]

    feasible_idx = [i for i in range(len(ranked)) if ranked[i].feasible]
    if feasible_idx:
        best = min(feasible_idx, key=objective_key)
    elif target.hard:
        return Recommendation(
            chosen=None, predicted_runtime_s=None, predicted_cost=None,
            feasible=False, ranking=ranking,
        )
    else:
        best = min(
            range(len(ranked)),
            key=lambda i: (
                ranked[i].predicted_runtime_s,
                ranked[i].predicted_cost,
                ranked[i].candidate.scale_out,
                i,
            ),
        )
    chosen = ranked[best]
    return Recommendation(
        chosen=chosen.candidate,
        predicted_runtime_s=chosen.predicted_runtime_s,
        predicted_cost=chosen.predicted_cost,
        feasible=bool(feasible_idx),
        ranking=ranking,
    )


def ranking_csv(recommendation: Recommendation) -> str:
    """CSV rendering of the ranking, one row per candidate."""
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for r in recommendation.ranking:
        buf.write(
            f"{r.candidate.machine},{r.candidate.scale_out},"
            f"{r.predicted_runtime_s!r},{r.predicted_cost!r},{str(r.feasible).lower()}\n"
        )
    return buf.getvalue()
