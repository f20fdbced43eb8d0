"""Simulation of iterative jobs and barrier-triggered dynamic rescaling."""

from .controller import BarrierRescalePolicy, StaticPolicy, rescale_decision
from .experiments import ExperimentSummary, run_paired_experiment
from .graph import (
    AnomalyEvent,
    GroundTruthSpec,
    RescaleEvent,
    SimState,
    StageGraph,
    StageSpec,
    StageTruth,
    load_sim_spec,
    save_sim_spec,
)
from .overhead import OverheadModel, learn_overhead
from .predictor import StageRuntimeModel, detect_anomaly, update_model_online
from .sim import SimResult, bootstrap_runs, simulate, trace_csv

__all__ = [
    "AnomalyEvent",
    "BarrierRescalePolicy",
    "ExperimentSummary",
    "GroundTruthSpec",
    "OverheadModel",
    "RescaleEvent",
    "SimResult",
    "SimState",
    "StageGraph",
    "StageRuntimeModel",
    "StageSpec",
    "StageTruth",
    "StaticPolicy",
    "bootstrap_runs",
    "detect_anomaly",
    "learn_overhead",
    "load_sim_spec",
    "rescale_decision",
    "run_paired_experiment",
    "save_sim_spec",
    "simulate",
    "trace_csv",
    "update_model_online",
]
