"""Discrete-event simulation of iterative stage-structured jobs.

Each iteration executes the stage DAG at the current scale-out; stage
runtimes come from the latent ground truth with multiplicative noise and
scheduled anomalies. The controller is consulted only at the barriers
between iterations, where rescaling costs the ground-truth overhead.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

from ..errors import ValidationError
from ..records import StageRun
from .graph import (
    GroundTruthSpec,
    RescaleEvent,
    SimState,
    StageGraph,
    resolve_anomalies,
    stage_rng,
)

TRACE_HEADER = "run_id,iteration,stage_id,scale_out,runtime_s,anomalous,elapsed_s"


@dataclass
class SimResult:
    runs: list
    finish_s: list
    state: SimState

    @property
    def elapsed_s(self) -> float:
        return self.state.elapsed_s


def simulate(
    graph: StageGraph,
    truth: GroundTruthSpec,
    policy,
    initial_scale_out: int,
    seed: int = 42,
    bounds: tuple = (4, 36),
) -> SimResult:
    """Run one job to completion under a rescaling policy.

    Deterministic for fixed (spec, policy, seed); noise and anomaly draws
    are keyed by (iteration, stage) so different policies see the same
    conditions.
    """
    graph.validate()
    truth.validate(graph)
    lo, hi = bounds
    if not lo <= initial_scale_out <= hi:
        raise ValidationError(
            f"initial scale_out {initial_scale_out} outside bounds [{lo}, {hi}]"
        )
    anomalies = resolve_anomalies(graph, truth, seed)
    topo = graph.topo_order()
    stage_index = {sid: i for i, sid in enumerate(topo)}
    state = SimState(
        scale_out=initial_scale_out,
        remaining_iterations=graph.iterations,
        bounds=bounds,
    )
    runs: list = []
    finishes: list = []
    for iteration in range(graph.iterations):
        active = graph.iteration_stages(iteration)
        durations = {}
        iteration_runs = []
        for sid in active:
            base = truth.stage_runtime(sid, state.scale_out)
            if base <= 0:
                raise ValidationError(f"ground truth runtime for {sid!r} must be > 0")
            noise = 1.0
            if truth.noise_sigma > 0 or truth.random_anomalies:
                z = float(stage_rng(seed, iteration, stage_index[sid]).standard_normal())
                noise = math.exp(truth.noise_sigma * z)
            slowdown = anomalies.get((iteration, sid), 1.0)
            runtime = base * noise * slowdown
            work = truth.stage_truth[sid].work_s * truth.data_gb / state.scale_out
            run = StageRun(
                stage_id=sid,
                iteration=iteration,
                scale_out=state.scale_out,
                runtime_s=runtime,
                metrics={"cpu_util": min(1.0, work / runtime)},
                anomalous=slowdown > 1.0,
            )
            durations[sid] = runtime
            iteration_runs.append(run)
        iteration_start = state.elapsed_s
        state.elapsed_s += graph.critical_path(durations)
        # Per-stage completion offsets within the iteration, for the trace.
        finish_at: dict = {}
        for sid in active:
            upstream = max(
                (finish_at.get(src, 0.0) for src, dst in graph.edges if dst == sid and src in durations),
                default=0.0,
            )
            finish_at[sid] = upstream + durations[sid]
        for run in iteration_runs:
            finishes.append(iteration_start + finish_at[run.stage_id])
        runs.extend(iteration_runs)
        state.runs = runs
        state.remaining_iterations -= 1
        if policy is not None and iteration < graph.iterations - 1:
            decided = int(policy.on_barrier(state, iteration_runs, iteration))
            decided = max(lo, min(hi, decided))
            if decided != state.scale_out:
                paid = truth.overhead(state.scale_out, decided)
                state.rescales.append(
                    RescaleEvent(iteration, state.scale_out, decided, paid)
                )
                state.elapsed_s += paid
                state.scale_out = decided
    return SimResult(runs=runs, finish_s=finishes, state=state)


def bootstrap_runs(
    graph: StageGraph,
    truth: GroundTruthSpec,
    scale_outs: list,
    seed: int = 42,
) -> list:
    """Historical anomaly-free stage runs at a few scale-outs, for warming up
    a stage model before a simulated job starts."""
    clean = GroundTruthSpec(
        stage_truth=truth.stage_truth,
        data_gb=truth.data_gb,
        noise_sigma=truth.noise_sigma,
        overhead_alpha=truth.overhead_alpha,
        overhead_beta=truth.overhead_beta,
    )
    runs = []
    for i, s in enumerate(scale_outs):
        probe = StageGraph(stages=graph.stages, edges=graph.edges, iterations=2)
        result = simulate(probe, clean, None, int(s), seed=seed + 7919 * i, bounds=(1, 10**6))
        runs.extend(result.runs)
    return runs


def trace_csv(results: list, run_ids: list = None) -> str:
    """CSV trace of one or more simulations, ordered by run id."""
    if run_ids is None:
        run_ids = list(range(len(results)))
    buf = io.StringIO()
    buf.write(TRACE_HEADER + "\n")
    for run_id, result in sorted(zip(run_ids, results), key=lambda p: p[0]):
        for run, finish in zip(result.runs, result.finish_s):
            buf.write(
                f"{run_id},{run.iteration},{run.stage_id},{run.scale_out},"
                f"{run.runtime_s!r},{str(run.anomalous).lower()},{finish!r}\n"
            )
    return buf.getvalue()
