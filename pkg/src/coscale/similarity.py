"""Similarity of execution contexts and grouping of catalog resources.

Scores quantify how transferable a runtime observation from one context is
to a prediction task in another, so globally shared records can be weighted
against local ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .errors import ValidationError
from .records import ExecutionContext, JobSignature, MachineType

MATCH_EXACT = "exact"
MATCH_SAME_ALGORITHM = "same_algorithm"
MATCH_NONE = "none"

# Dataset sizes span orders of magnitude; distances are taken on a log10
# scale and normalized over this many decades.
_SIZE_DECADES = 6.0


@dataclass
class SimilarityWeights:
    w_job: float = 0.5
    w_dataset: float = 0.25
    w_machine: float = 0.25
    local_boost: float = 2.0

    def validate(self) -> None:
        for label, w in (("w_job", self.w_job), ("w_dataset", self.w_dataset), ("w_machine", self.w_machine)):
            if not 0.0 <= w <= 1.0:
                raise ValidationError(f"{label} must be in [0,1], got {w!r}")
        if abs(self.w_job + self.w_dataset + self.w_machine - 1.0) > 1e-9:
            raise ValidationError("similarity weights must sum to 1")
        if self.local_boost < 1.0:
            raise ValidationError(f"local_boost must be >= 1, got {self.local_boost!r}")


@dataclass
class ResourceGroup:
    group_id: int
    members: list
    centroid: list


def _catalog_bounds(catalog: Iterable[MachineType]) -> tuple[np.ndarray, np.ndarray]:
    vectors = np.array([m.feature_vector() for m in catalog], dtype=float)
    if vectors.size == 0:
        raise ValidationError("catalog must not be empty")
    return vectors.min(axis=0), vectors.max(axis=0)


def _normalize(vector: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    span = hi - lo
    out = np.zeros_like(vector)
    nonflat = span > 0
    out[nonflat] = (vector[nonflat] - lo[nonflat]) / span[nonflat]
    return out


def machine_similarity(a: MachineType, b: MachineType, catalog: Iterable[MachineType]) -> float:
    """1 minus the normalized Euclidean distance over min-max-scaled
    (vcpus, memory_gb, price_per_hour); bounds come from the active catalog."""
    if a.name == b.name and a == b:
        return 1.0
    lo, hi = _catalog_bounds(catalog)
    va = _normalize(np.array(a.feature_vector()), lo, hi)
    vb = _normalize(np.array(b.feature_vector()), lo, hi)
    distance = float(np.linalg.norm(va - vb)) / math.sqrt(3.0)
    return min(1.0, max(0.0, 1.0 - distance))


def _numbers_close(x, y) -> bool:
    if x == y:
        return True
    return abs(x - y) <= 0.1 * max(abs(x), abs(y))


def _param_similarity(a: JobSignature, b: JobSignature) -> float:
    keys = set(a.params) | set(b.params)
    if not keys:
        return 1.0
    matched = 0
    for key in keys:
        if key not in a.params or key not in b.params:
            continue
        va, vb = a.params[key], b.params[key]
        if isinstance(va, str) or isinstance(vb, str):
            if va == vb:
                matched += 1
        elif _numbers_close(va, vb):
            matched += 1
    return matched / len(keys)


def job_match_level(a: JobSignature, b: JobSignature) -> tuple[str, float]:
    """Classify how well two job signatures match.

    Returns the match level and the fraction of union params whose values
    agree (numbers within 10% relative difference).
    """
    if a.plan_fingerprint is not None and a.plan_fingerprint == b.plan_fingerprint:
        return MATCH_EXACT, 1.0
    if a.algorithm != b.algorithm:
        return MATCH_NONE, 0.0
    if a.params == b.params:
        return MATCH_EXACT, 1.0
    return MATCH_SAME_ALGORITHM, _param_similarity(a, b)


def _dataset_similarity(size_a: int, size_b: int) -> float:
    gap = abs(math.log10(size_a + 1) - math.log10(size_b + 1)) / _SIZE_DECADES
    return min(1.0, max(0.0, 1.0 - gap))


def context_similarity(
    a: ExecutionContext,
    b: ExecutionContext,
    weights: Optional[SimilarityWeights] = None,
    catalog: Iterable[MachineType] = (),
) -> float:
    """Weighted blend of job, dataset, and machine similarity in [0,1]."""
    weights = weights or SimilarityWeights()
    weights.validate()
    machines = {m.name: m for m in catalog}
    for ctx in (a, b):
        if ctx.machine not in machines:
            raise ValidationError(f"unknown machine type {ctx.machine!r}")
    level, param_sim = job_match_level(a.job, b.job)
    if level == MATCH_EXACT:
        job_score = 1.0
    elif level == MATCH_SAME_ALGORITHM:
        job_score = 0.5 * param_sim
    else:
        job_score = 0.0
    dataset_score = _dataset_similarity(a.dataset.size_bytes, b.dataset.size_bytes)
    machine_score = machine_similarity(machines[a.machine], machines[b.machine], machines.values())
    score = weights.w_job * job_score + weights.w_dataset * dataset_score + weights.w_machine * machine_score
    return min(1.0, max(0.0, score))


def record_weight(
    record_context: ExecutionContext,
    query_context: ExecutionContext,
    weights: Optional[SimilarityWeights] = None,
    catalog: Iterable[MachineType] = (),
) -> float:
    """Training weight of a record for a query: context similarity, boosted
    when the record comes from the querying user's own environment."""
    weights = weights or SimilarityWeights()
    score = context_similarity(record_context, query_context, weights, catalog)
    if record_context.origin == query_context.origin:
        score *= weights.local_boost
    return score


def _kmeans_once(vectors: np.ndarray, k: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray, float]:
    n = vectors.shape[0]
    # k-means++ seeding
    centers = np.empty((k, vectors.shape[1]))
    centers[0] = vectors[rng.integers(n)]
    closest = np.full(n, np.inf)
    for j in range(1, k):
        dist = np.sum((vectors - centers[j - 1]) ** 2, axis=1)
        closest = np.minimum(closest, dist)
        total = closest.sum()
        if total <= 0:
            centers[j] = vectors[rng.integers(n)]
            continue
        centers[j] = vectors[rng.choice(n, p=closest / total)]
    assign = np.zeros(n, dtype=int)
    for _ in range(100):
        dists = np.linalg.norm(vectors[:, None, :] - centers[None, :, :], axis=2)
        new_assign = dists.argmin(axis=1)
        for j in range(k):
            members = new_assign == j
            if members.any():
                centers[j] = vectors[members].mean(axis=0)
            else:
                # Re-seed an empty cluster from the point farthest from its center.
                worst = np.argmax(dists[np.arange(n), new_assign])
                centers[j] = vectors[worst]
                new_assign[worst] = j
        if (new_assign == assign).all():
            assign = new_assign
            break
        assign = new_assign
    sse = float(sum(np.sum((vectors[assign == j] - centers[j]) ** 2) for j in range(k)))
    return assign, centers, sse


def group_resources(catalog: list, k: int, seed: int = 42, restarts: int = 10) -> list:
    """Partition the catalog into k groups by k-means over min-max-normalized
    static features. Deterministic for a fixed seed."""
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    if k > len(catalog):
        raise ValidationError(f"k={k} exceeds catalog size {len(catalog)}")
    ordered = sorted(catalog, key=lambda m: m.name)
    lo, hi = _catalog_bounds(ordered)
    vectors = np.array([_normalize(np.array(m.feature_vector()), lo, hi) for m in ordered])
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(restarts):
        assign, centers, sse = _kmeans_once(vectors, k, rng)
        if best is None or sse < best[2] - 1e-12:
            best = (assign, centers, sse)
    assign, centers, _ = best
    groups = []
    for j in range(k):
        members = [ordered[i].name for i in range(len(ordered)) if assign[i] == j]
        groups.append(ResourceGroup(group_id=j, members=members, centroid=[float(c) for c in centers[j]]))
    # Stable group numbering independent of seeding order.
    groups.sort(key=lambda g: g.members[0])
    for new_id, group in enumerate(groups):
        group.group_id = new_id
    return groups
