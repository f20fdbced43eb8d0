"""Synthetic catalogs, repositories, and simulation specs.

Everything downstream (model training, recommendation, rescaling) is
exercised against data with planted, recoverable structure: per-algorithm
scale-out functions with lognormal noise, a two-population split of local
and dissimilar global contexts, and iterative jobs with injected slowdowns.
"""

from __future__ import annotations

import numpy as np

from .dynamic.graph import GroundTruthSpec, StageGraph, StageSpec, StageTruth
from .records import (
    DatasetDescriptor,
    ExecutionContext,
    ExecutionRecord,
    JobSignature,
    MachineType,
    finalize_record,
)
from .repository import Repository, repository_from_records

DEFAULT_JOB_COUNT = 930
SCALE_OUT_RANGE = (4, 36)

_BASE_MINUTE = "2024-01-01T{hh:02d}:{mm:02d}:{ss:02d}+00:00"

# (base_s, work_s, log_coef, per-node_s) per algorithm, before machine and
# parameter scaling.
_ALGORITHM_COEF = {
    "kmeans": (20.0, 60.0, 4.0, 0.0),
    "grep": (5.0, 25.0, 1.0, 0.0),
    "sort": (10.0, 40.0, 6.0, 0.1),
    "pagerank": (30.0, 80.0, 8.0, 0.0),
    "regression": (15.0, 50.0, 3.0, 0.0),
}

_ORIGINS = ("hpc-lab", "cloud-team", "analytics-org")


def default_catalog() -> list:
    """Nine machine types: categories c/m/r in sizes large/xlarge/2xlarge."""
    sizes = [("large", 2), ("xlarge", 4), ("2xlarge", 8)]
    gb_per_vcpu = {"c": 2.0, "m": 4.0, "r": 8.0}
    hourly_per_vcpu = {"c": 0.0425, "m": 0.048, "r": 0.063}
    catalog = []
    for category in ("c", "m", "r"):
        for size, vcpus in sizes:
            catalog.append(
                MachineType(
                    name=f"{category}.{size}",
                    category=category,
                    vcpus=vcpus,
                    memory_gb=gb_per_vcpu[category] * vcpus,
                    price_per_hour=round(hourly_per_vcpu[category] * vcpus, 4),
                )
            )
    return catalog


def _timestamp(index: int) -> str:
    hh, rem = divmod(index % 86_400, 3600)
    mm, ss = divmod(rem, 60)
    return _BASE_MINUTE.format(hh=hh, mm=mm, ss=ss)


def _machine_factor(machine: MachineType) -> float:
    return float((4.0 / machine.vcpus) ** 0.5)


def planted_runtime(
    coef: tuple, scale_out: int, data_gb: float, factor: float = 1.0
) -> float:
    base, work, log_c, per_node = coef
    value = base + work * data_gb / scale_out + log_c * np.log2(scale_out) + per_node * scale_out
    return float(value * factor)


def _record(
    algorithm: str,
    params: dict,
    size_bytes: int,
    machine: MachineType,
    origin: str,
    scale_out: int,
    runtime_s: float,
    index: int,
    sys_config: dict | None = None,
) -> ExecutionRecord:
    context = ExecutionContext(
        job=JobSignature(algorithm=algorithm, params=params),
        dataset=DatasetDescriptor(size_bytes=size_bytes),
        machine=machine.name,
        sys_config=sys_config or {"memory_per_node_gb": machine.memory_gb},
        origin=origin,
    )
    return finalize_record(
        ExecutionRecord(
            context=context,
            scale_out=scale_out,
            runtime_s=runtime_s,
            timestamp=_timestamp(index),
        )
    )


def _draw_params(algorithm: str, rng: np.random.Generator) -> tuple[dict, float]:
    """Algorithm parameters and the work multiplier they imply."""
    if algorithm == "kmeans":
        k = int(rng.integers(5, 51))
        return {"k": k}, float((k / 10.0) ** 0.5)
    if algorithm == "grep":
        return {"pattern": f"p{int(rng.integers(0, 40)):02d}"}, 1.0
    if algorithm == "sort":
        return {}, 1.0
    if algorithm == "pagerank":
        iters = int(rng.integers(5, 40))
        return {"iterations": iters}, float(iters / 10.0)
    features = int(rng.integers(5, 200))
    return {"features": features}, float((features / 10.0) ** 0.3)


def generate_repository(
    jobs: int = DEFAULT_JOB_COUNT,
    seed: int = 42,
    noise_sigma: float = 0.05,
    catalog: list | None = None,
) -> Repository:
    """Repository of unique job runs across algorithms, machines, datasets,
    origins, and scale-outs, with planted scale-out behavior."""
    catalog = catalog or default_catalog()
    rng = np.random.default_rng(seed)
    algorithms = sorted(_ALGORITHM_COEF)
    records = []
    seen = set()
    attempts = 0
    while len(records) < jobs:
        attempts += 1
        if attempts > 50 * jobs:
            raise RuntimeError("generator failed to produce enough unique records")
        algorithm = algorithms[int(rng.integers(len(algorithms)))]
        params, work_factor = _draw_params(algorithm, rng)
        machine = catalog[int(rng.integers(len(catalog)))]
        origin = _ORIGINS[int(rng.integers(len(_ORIGINS)))]
        scale_out = int(rng.integers(SCALE_OUT_RANGE[0], SCALE_OUT_RANGE[1] + 1))
        size_bytes = int(10 ** rng.uniform(9.3, 11.3))
        data_gb = size_bytes / 1e9
        base, work, log_c, per_node = _ALGORITHM_COEF[algorithm]
        clean = planted_runtime(
            (base, work * work_factor, log_c, per_node),
            scale_out,
            data_gb,
            _machine_factor(machine),
        )
        runtime = clean * float(np.exp(rng.normal(0.0, noise_sigma)))
        record = _record(
            algorithm, params, size_bytes, machine, origin, scale_out, runtime, len(records)
        )
        if record.fingerprint in seen:
            continue
        seen.add(record.fingerprint)
        records.append(record)
    return repository_from_records(records, catalog)


# --- two-population split for context-awareness experiments -------------------

LOCAL_ORIGIN = "local-lab"
LOCAL_COEF = (20.0, 60.0, 4.0, 0.0)
GLOBAL_COEF = (60.0, 180.0, 12.0, 0.0)


def _local_record(rng: np.random.Generator, catalog: list, index: int, noise_sigma: float) -> ExecutionRecord:
    machine = next(m for m in catalog if m.name == "c.large")
    scale_out = int(rng.integers(SCALE_OUT_RANGE[0], SCALE_OUT_RANGE[1] + 1))
    size_bytes = int(rng.uniform(3e10, 8e10))
    clean = planted_runtime(LOCAL_COEF, scale_out, size_bytes / 1e9)
    runtime = clean * float(np.exp(rng.normal(0.0, noise_sigma)))
    return _record(
        "kmeans", {"k": 10}, size_bytes, machine, LOCAL_ORIGIN, scale_out, runtime, index
    )


def two_population(
    seed: int = 42,
    n_global: int = 400,
    n_local: int = 40,
    n_holdout: int = 40,
    noise_sigma: float = 0.03,
) -> dict:
    """Local records plus a large pool of dissimilar global records.

    Global contexts differ in algorithm, machine (the opposite catalog
    extreme), dataset scale (seven decades below), and origin, and follow a
    three-times-slower runtime regime with the same basis shape.
    """
    catalog = default_catalog()
    rng = np.random.default_rng(seed)
    global_machine = next(m for m in catalog if m.name == "r.2xlarge")
    records = []
    for i in range(n_global):
        scale_out = int(rng.integers(SCALE_OUT_RANGE[0], SCALE_OUT_RANGE[1] + 1))
        size_bytes = int(rng.uniform(2e3, 9e3))
        clean = planted_runtime(GLOBAL_COEF, scale_out, size_bytes / 1e9)
        runtime = clean * float(np.exp(rng.normal(0.0, noise_sigma)))
        records.append(
            _record(
                "pagerank",
                {"iterations": int(rng.integers(5, 40))},
                size_bytes,
                global_machine,
                "org-a" if i % 2 == 0 else "org-b",
                scale_out,
                runtime,
                i,
            )
        )
    local = [
        _local_record(rng, catalog, n_global + i, noise_sigma) for i in range(n_local)
    ]
    holdout = [
        _local_record(rng, catalog, n_global + n_local + i, noise_sigma)
        for i in range(n_holdout)
    ]
    query_context = ExecutionContext(
        job=JobSignature(algorithm="kmeans", params={"k": 10}),
        dataset=DatasetDescriptor(size_bytes=int(5e10)),
        machine="c.large",
        sys_config={"memory_per_node_gb": 4.0},
        origin=LOCAL_ORIGIN,
    )
    return {
        "catalog": catalog,
        "global_records": records,
        "local_records": local,
        "holdout_records": holdout,
        "query_context": query_context,
    }


# --- simulation specs ---------------------------------------------------------


def default_sim_spec(
    iterations: int = 12,
    data_gb: float = 60.0,
    noise_sigma: float = 0.08,
    anomaly_probability: float = 0.06,
    anomaly_slowdown: float = 3.0,
    initial_scale_out: int = 12,
    target_slack: float = 1.18,
    bounds: tuple = SCALE_OUT_RANGE,
) -> dict:
    """Iterative job spec with random stage slowdowns and a runtime target
    set just above the anomaly-free runtime at the initial scale-out."""
    graph = StageGraph(
        stages=[
            StageSpec("load", {"compute": 0.4, "shuffle": 1.0}, per_iteration=False),
            StageSpec("map", {"compute": 1.0, "shuffle": 0.2}),
            StageSpec("shuffle", {"compute": 0.3, "shuffle": 1.0}),
            StageSpec("update", {"compute": 0.8, "shuffle": 0.4}),
        ],
        edges=[("load", "map"), ("map", "shuffle"), ("shuffle", "update")],
        iterations=iterations,
    )
    truth = GroundTruthSpec(
        stage_truth={
            "load": StageTruth(base_s=8.0, work_s=1.5, log_coef=0.5),
            "map": StageTruth(base_s=4.0, work_s=6.0, log_coef=0.8),
            "shuffle": StageTruth(base_s=3.0, work_s=2.5, log_coef=2.0),
            "update": StageTruth(base_s=3.5, work_s=4.0, log_coef=1.0),
        },
        data_gb=data_gb,
        noise_sigma=noise_sigma,
        random_anomalies={
            "probability": anomaly_probability,
            "slowdown": anomaly_slowdown,
            "start_iteration": 2,
        },
        overhead_alpha=12.0,
        overhead_beta=1.0,
    )
    per_iter = sum(
        truth.stage_runtime(s.stage_id, initial_scale_out)
        for s in graph.stages
        if s.per_iteration
    )
    setup = truth.stage_runtime("load", initial_scale_out)
    target_s = target_slack * (setup + per_iter * iterations)
    return {
        "graph": graph,
        "truth": truth,
        "target_s": float(target_s),
        "hard": True,
        "initial_scale_out": initial_scale_out,
        "bounds": tuple(bounds),
    }
