"""Stage graphs, latent ground-truth runtime functions, and simulator state.

A job is a DAG of stages repeated over a number of iterations. Ground truth
assigns each stage a latent runtime function of the scale-out, multiplicative
lognormal noise, and an anomaly schedule of stage slowdowns; controllers see
only the observed stage runs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from ..errors import ValidationError
from ..records import StageRun


@dataclass
class StageSpec:
    stage_id: str
    features: dict = field(default_factory=dict)
    per_iteration: bool = True


@dataclass
class StageGraph:
    stages: list
    edges: list
    iterations: int

    def validate(self) -> None:
        if not self.stages:
            raise ValidationError("graph needs at least one stage")
        ids = [s.stage_id for s in self.stages]
        if len(set(ids)) != len(ids):
            raise ValidationError("stage ids must be unique")
        if self.iterations < 0:
            raise ValidationError(f"iterations must be >= 0, got {self.iterations}")
        known = set(ids)
        for src, dst in self.edges:
            if src not in known or dst not in known:
                raise ValidationError(f"edge ({src!r}, {dst!r}) references unknown stage")
        self.topo_order()

    def stage(self, stage_id: str) -> StageSpec:
        for s in self.stages:
            if s.stage_id == stage_id:
                return s
        raise ValidationError(f"unknown stage {stage_id!r}")

    def topo_order(self) -> list:
        incoming = {s.stage_id: 0 for s in self.stages}
        for _, dst in self.edges:
            incoming[dst] += 1
        ready = [s.stage_id for s in self.stages if incoming[s.stage_id] == 0]
        order = []
        while ready:
            node = ready.pop(0)
            order.append(node)
            for src, dst in self.edges:
                if src == node:
                    incoming[dst] -= 1
                    if incoming[dst] == 0:
                        ready.append(dst)
        if len(order) != len(self.stages):
            raise ValidationError("stage graph contains a cycle")
        return order

    def iteration_stages(self, iteration: int) -> list:
        """Stage ids executing in this iteration, topologically ordered.
        One-time stages run only in iteration 0."""
        active = {s.stage_id for s in self.stages if s.per_iteration or iteration == 0}
        return [sid for sid in self.topo_order() if sid in active]

    def critical_path(self, durations: dict) -> float:
        """Longest-path makespan over the stages present in `durations`;
        edges to or from absent stages are ignored."""
        finish: dict = {}
        for sid in self.topo_order():
            if sid not in durations:
                continue
            upstream = max(
                (finish.get(src, 0.0) for src, dst in self.edges if dst == sid and src in durations),
                default=0.0,
            )
            finish[sid] = upstream + durations[sid]
        return max(finish.values(), default=0.0)


@dataclass
class StageTruth:
    base_s: float
    work_s: float
    log_coef: float = 0.0

    def runtime(self, scale_out: int, data_gb: float) -> float:
        return self.base_s + self.work_s * data_gb / scale_out + self.log_coef * math.log2(scale_out)


@dataclass
class AnomalyEvent:
    iteration: int
    stage_id: str
    slowdown: float

    def validate(self) -> None:
        if self.slowdown < 1.0:
            raise ValidationError(f"slowdown must be >= 1, got {self.slowdown}")


@dataclass
class GroundTruthSpec:
    stage_truth: dict
    data_gb: float
    noise_sigma: float = 0.0
    anomalies: list = field(default_factory=list)
    random_anomalies: Optional[dict] = None
    overhead_alpha: float = 30.0
    overhead_beta: float = 2.0

    def validate(self, graph: StageGraph) -> None:
        if self.noise_sigma < 0:
            raise ValidationError(f"noise sigma must be >= 0, got {self.noise_sigma}")
        if self.data_gb < 0:
            raise ValidationError(f"data_gb must be >= 0, got {self.data_gb}")
        for s in graph.stages:
            if s.stage_id not in self.stage_truth:
                raise ValidationError(f"no ground truth for stage {s.stage_id!r}")
        for event in self.anomalies:
            event.validate()
            graph.stage(event.stage_id)

    def stage_runtime(self, stage_id: str, scale_out: int) -> float:
        return self.stage_truth[stage_id].runtime(scale_out, self.data_gb)

    def overhead(self, s_from: int, s_to: int) -> float:
        if s_from == s_to:
            return 0.0
        return max(0.0, self.overhead_alpha + self.overhead_beta * abs(s_to - s_from))


def stage_rng(seed: int, iteration: int, stage_index: int) -> np.random.Generator:
    """Substream keyed by (iteration, stage), so draws do not depend on the
    controller's decisions and policies can be compared on common noise."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(iteration, stage_index)))


def resolve_anomalies(graph: StageGraph, truth: GroundTruthSpec, seed: int) -> dict:
    """Materialize the anomaly schedule as {(iteration, stage_id): slowdown}."""
    schedule = {(e.iteration, e.stage_id): e.slowdown for e in truth.anomalies}
    cfg = truth.random_anomalies
    if cfg:
        probability = cfg.get("probability", 0.0)
        slowdown = cfg.get("slowdown", 3.0)
        start = cfg.get("start_iteration", 0)
        if slowdown < 1.0:
            raise ValidationError(f"slowdown must be >= 1, got {slowdown}")
        order = graph.topo_order()
        for iteration in range(start, graph.iterations):
            for idx, stage_id in enumerate(order):
                rng = stage_rng(seed, iteration, idx)
                rng.standard_normal()  # keep position 0 for the noise draw
                if rng.uniform() < probability:
                    schedule[(iteration, stage_id)] = slowdown
    return schedule


@dataclass
class RescaleEvent:
    iteration: int
    from_scale_out: int
    to_scale_out: int
    overhead_s: float


@dataclass
class SimState:
    scale_out: int
    remaining_iterations: int
    bounds: tuple
    elapsed_s: float = 0.0
    runs: list = field(default_factory=list)
    rescales: list = field(default_factory=list)


# --- sim_spec.json -----------------------------------------------------------


def sim_spec_to_dict(graph: StageGraph, truth: GroundTruthSpec, target_s: float,
                     hard: bool, initial_scale_out: int, bounds: tuple) -> dict:
    return {
        "graph": {
            "stages": [
                {"stage_id": s.stage_id, "features": s.features, "per_iteration": s.per_iteration}
                for s in graph.stages
            ],
            "edges": [[a, b] for a, b in graph.edges],
            "iterations": graph.iterations,
        },
        "truth": {
            "stages": {
                sid: {"base_s": t.base_s, "work_s": t.work_s, "log_coef": t.log_coef}
                for sid, t in sorted(truth.stage_truth.items())
            },
            "data_gb": truth.data_gb,
            "noise_sigma": truth.noise_sigma,
            "anomalies": [
                {"iteration": e.iteration, "stage_id": e.stage_id, "slowdown": e.slowdown}
                for e in truth.anomalies
            ],
            "random_anomalies": truth.random_anomalies,
            "overhead_alpha": truth.overhead_alpha,
            "overhead_beta": truth.overhead_beta,
        },
        "target_s": target_s,
        "hard": hard,
        "initial_scale_out": initial_scale_out,
        "bounds": {"min": bounds[0], "max": bounds[1]},
    }


def sim_spec_from_dict(data: dict) -> dict:
    g = data["graph"]
    graph = StageGraph(
        stages=[
            StageSpec(
                stage_id=s["stage_id"],
                features=dict(s.get("features", {})),
                per_iteration=bool(s.get("per_iteration", True)),
            )
            for s in g["stages"]
        ],
        edges=[(a, b) for a, b in g.get("edges", [])],
        iterations=int(g["iterations"]),
    )
    t = data["truth"]
    truth = GroundTruthSpec(
        stage_truth={
            sid: StageTruth(
                base_s=float(v["base_s"]),
                work_s=float(v["work_s"]),
                log_coef=float(v.get("log_coef", 0.0)),
            )
            for sid, v in t["stages"].items()
        },
        data_gb=float(t.get("data_gb", 0.0)),
        noise_sigma=float(t.get("noise_sigma", 0.0)),
        anomalies=[
            AnomalyEvent(int(e["iteration"]), e["stage_id"], float(e["slowdown"]))
            for e in t.get("anomalies", [])
        ],
        random_anomalies=t.get("random_anomalies"),
        overhead_alpha=float(t.get("overhead_alpha", 30.0)),
        overhead_beta=float(t.get("overhead_beta", 2.0)),
    )
    graph.validate()
    truth.validate(graph)
    bounds = (int(data["bounds"]["min"]), int(data["bounds"]["max"]))
    return {
        "graph": graph,
        "truth": truth,
        "target_s": float(data["target_s"]),
        "hard": bool(data.get("hard", True)),
        "initial_scale_out": int(data["initial_scale_out"]),
        "bounds": bounds,
    }


def load_sim_spec(path) -> dict:
    return sim_spec_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def save_sim_spec(spec: dict, path) -> None:
    payload = sim_spec_to_dict(
        spec["graph"], spec["truth"], spec["target_s"], spec["hard"],
        spec["initial_scale_out"], spec["bounds"],
    )
    Path(path).write_text(
        json.dumps(payload, sort_keys=True, ensure_ascii=False, indent=2) + "\n",
        encoding="utf-8",
    )
