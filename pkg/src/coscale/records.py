"""Domain types for shared runtime records and their content fingerprints.

A record captures one observed run of a distributed data-parallel job:
the execution context (job signature, dataset, machine type, system
configuration, contributing environment), the scale-out it ran at, and
the measured runtime. Records are identified by a fingerprint over a
canonical serialization so independently produced copies deduplicate.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from datetime import datetime
from typing import Any, Optional

from .errors import ValidationError

MACHINE_CATEGORIES = ("c", "m", "r", "other")

# Bytes per canonical data-size unit (decimal gigabyte).
BYTES_PER_GB = 1_000_000_000.0


def _check_finite_number(value: Any, label: str) -> None:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{label} must be a number, got {type(value).__name__}")
    if isinstance(value, float) and not math.isfinite(value):
        raise ValidationError(f"{label} must be finite, got {value!r}")


def canonical_json(value: Any) -> str:
    """Render a JSON-like value canonically: UTF-8, keys sorted, reals at
    12 significant digits. Stable across runs and implementations."""
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValidationError(f"cannot canonicalize non-finite number {value!r}")
        return format(value, ".12g")
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, dict):
        parts = []
        for key in sorted(value):
            if not isinstance(key, str):
                raise ValidationError(f"canonical keys must be strings, got {key!r}")
            parts.append(f"{json.dumps(key, ensure_ascii=False)}:{canonical_json(value[key])}")
        return "{" + ",".join(parts) + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(canonical_json(v) for v in value) + "]"
    raise ValidationError(f"cannot canonicalize value of type {type(value).__name__}")


@dataclass
class MachineType:
    name: str
    category: str
    vcpus: int
    memory_gb: float
    price_per_hour: float

    def validate(self) -> None:
        if not self.name:
            raise ValidationError("machine type name must be non-empty")
        if self.category not in MACHINE_CATEGORIES:
            raise ValidationError(
                f"machine category must be one of {MACHINE_CATEGORIES}, got {self.category!r}"
            )
        if not isinstance(self.vcpus, int) or isinstance(self.vcpus, bool) or self.vcpus < 1:
            raise ValidationError(f"vcpus must be a positive integer, got {self.vcpus!r}")
        _check_finite_number(self.memory_gb, "memory_gb")
        if self.memory_gb <= 0:
            raise ValidationError(f"memory_gb must be > 0, got {self.memory_gb!r}")
        _check_finite_number(self.price_per_hour, "price_per_hour")
        if self.price_per_hour < 0:
            raise ValidationError(f"price_per_hour must be >= 0, got {self.price_per_hour!r}")

    def feature_vector(self) -> tuple[float, float, float]:
        return (float(self.vcpus), float(self.memory_gb), float(self.price_per_hour))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "category": self.category,
            "vcpus": self.vcpus,
            "memory_gb": self.memory_gb,
            "price_per_hour": self.price_per_hour,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MachineType":
        mt = cls(
            name=data.get("name", ""),
            category=data.get("category", ""),
            vcpus=data.get("vcpus", 0),
            memory_gb=data.get("memory_gb", 0.0),
            price_per_hour=data.get("price_per_hour", 0.0),
        )
        mt.validate()
        return mt


@dataclass
class JobSignature:
    algorithm: str
    params: dict = field(default_factory=dict)
    plan_fingerprint: Optional[str] = None

    def validate(self) -> None:
        if not self.algorithm:
            raise ValidationError("job algorithm must be non-empty")
        for key, value in self.params.items():
            if not isinstance(key, str):
                raise ValidationError(f"param keys must be strings, got {key!r}")
            if isinstance(value, str):
                continue
            _check_finite_number(value, f"param {key!r}")

    def to_dict(self) -> dict:
        out: dict = {"algorithm": self.algorithm, "params": dict(self.params)}
        if self.plan_fingerprint is not None:
            out["plan_fingerprint"] = self.plan_fingerprint
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "JobSignature":
        sig = cls(
            algorithm=data.get("algorithm", ""),
            params=dict(data.get("params", {})),
            plan_fingerprint=data.get("plan_fingerprint"),
        )
        sig.validate()
        return sig

    def hash_payload(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "params": self.params,
            "plan_fingerprint": self.plan_fingerprint,
        }


@dataclass
class DatasetDescriptor:
    size_bytes: int = 0
    records: Optional[int] = None
    features: Optional[int] = None
    extra: dict = field(default_factory=dict)

    def validate(self) -> None:
        if not isinstance(self.size_bytes, int) or isinstance(self.size_bytes, bool) or self.size_bytes < 0:
            raise ValidationError(f"size_bytes must be a non-negative integer, got {self.size_bytes!r}")
        for label, value in (("records", self.records), ("features", self.features)):
            if value is None:
                continue
            if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                raise ValidationError(f"{label} must be a non-negative integer, got {value!r}")
        for key, value in self.extra.items():
            _check_finite_number(value, f"dataset extra {key!r}")

    @property
    def size_gb(self) -> float:
        return self.size_bytes / BYTES_PER_GB

    def to_dict(self) -> dict:
        out: dict = {"size_bytes": self.size_bytes}
        if self.records is not None:
            out["records"] = self.records
        if self.features is not None:
            out["features"] = self.features
        if self.extra:
            out["extra"] = dict(self.extra)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "DatasetDescriptor":
        ds = cls(
            size_bytes=data.get("size_bytes", 0),
            records=data.get("records"),
            features=data.get("features"),
            extra=dict(data.get("extra", {})),
        )
        ds.validate()
        return ds

    def hash_payload(self) -> dict:
        return {
            "size_bytes": self.size_bytes,
            "records": self.records,
            "features": self.features,
            "extra": self.extra,
        }


@dataclass
class ExecutionContext:
    job: JobSignature
    dataset: DatasetDescriptor
    machine: str
    sys_config: dict = field(default_factory=dict)
    origin: str = ""
    # Derived at query time against the querying user's origin; never stored.
    is_local: bool = field(default=False, compare=False)
    extra_fields: dict = field(default_factory=dict, compare=False)

    def validate(self) -> None:
        self.job.validate()
        self.dataset.validate()
        if not self.machine:
            raise ValidationError("context machine reference must be non-empty")
        for key, value in self.sys_config.items():
            _check_finite_number(value, f"sys_config {key!r}")

    def to_dict(self) -> dict:
        out: dict = {
            "job": self.job.to_dict(),
            "dataset": self.dataset.to_dict(),
            "machine": self.machine,
            "sys_config": dict(self.sys_config),
            "origin": self.origin,
        }
        out.update(self.extra_fields)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ExecutionContext":
        known = {"job", "dataset", "machine", "sys_config", "origin", "is_local"}
        ctx = cls(
            job=JobSignature.from_dict(data.get("job", {})),
            dataset=DatasetDescriptor.from_dict(data.get("dataset", {})),
            machine=data.get("machine", ""),
            sys_config=dict(data.get("sys_config", {})),
            origin=data.get("origin", ""),
            extra_fields={k: v for k, v in data.items() if k not in known},
        )
        ctx.validate()
        return ctx

    def hash_payload(self) -> dict:
        return {
            "job": self.job.hash_payload(),
            "dataset": self.dataset.hash_payload(),
            "machine": self.machine,
            "sys_config": self.sys_config,
            "origin": self.origin,
        }


@dataclass
class StageRun:
    stage_id: str
    iteration: int
    scale_out: int
    runtime_s: float
    metrics: dict = field(default_factory=dict)
    # Ground-truth label from the simulator; hidden from controllers.
    anomalous: bool = False

    def validate(self) -> None:
        if not self.stage_id:
            raise ValidationError("stage_id must be non-empty")
        if not isinstance(self.iteration, int) or self.iteration < 0:
            raise ValidationError(f"iteration must be a non-negative integer, got {self.iteration!r}")
        if not isinstance(self.scale_out, int) or self.scale_out < 1:
            raise ValidationError(f"stage scale_out must be >= 1, got {self.scale_out!r}")
        _check_finite_number(self.runtime_s, "stage runtime_s")
        if self.runtime_s <= 0:
            raise ValidationError(f"stage runtime_s must be > 0, got {self.runtime_s!r}")
        for key, value in self.metrics.items():
            _check_finite_number(value, f"stage metric {key!r}")

    def to_dict(self) -> dict:
        return {
            "stage_id": self.stage_id,
            "iteration": self.iteration,
            "scale_out": self.scale_out,
            "runtime_s": self.runtime_s,
            "metrics": dict(self.metrics),
            "anomalous": self.anomalous,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "StageRun":
        run = cls(
            stage_id=data.get("stage_id", ""),
            iteration=data.get("iteration", 0),
            scale_out=data.get("scale_out", 1),
            runtime_s=data.get("runtime_s", 0.0),
            metrics=dict(data.get("metrics", {})),
            anomalous=bool(data.get("anomalous", False)),
        )
        run.validate()
        return run

    def hash_payload(self) -> dict:
        return {
            "stage_id": self.stage_id,
            "iteration": self.iteration,
            "scale_out": self.scale_out,
            "runtime_s": self.runtime_s,
            "metrics": self.metrics,
            "anomalous": self.anomalous,
        }


@dataclass
class ExecutionRecord:
    context: ExecutionContext
    scale_out: int
    runtime_s: float
    stage_runs: Optional[list] = None
    timestamp: str = "1970-01-01T00:00:00+00:00"
    fingerprint: str = ""
    extra_fields: dict = field(default_factory=dict, compare=False)

    def validate(self) -> None:
        self.context.validate()
        if not isinstance(self.scale_out, int) or isinstance(self.scale_out, bool) or self.scale_out < 1:
            raise ValidationError(f"scale_out must be a positive integer, got {self.scale_out!r}")
        _check_finite_number(self.runtime_s, "runtime_s")
        if self.runtime_s <= 0:
            raise ValidationError(f"runtime_s must be > 0, got {self.runtime_s!r}")
        try:
            self.timestamp_value()
        except ValueError as exc:
            raise ValidationError(f"timestamp is not ISO-8601: {self.timestamp!r}") from exc
        if self.stage_runs is not None:
            for run in self.stage_runs:
                run.validate()

    def timestamp_value(self) -> datetime:
        return datetime.fromisoformat(self.timestamp)

    @property
    def data_size_gb(self) -> float:
        return self.context.dataset.size_gb

    def to_dict(self) -> dict:
        out: dict = {
            "context": self.context.to_dict(),
            "scale_out": self.scale_out,
            "runtime_s": self.runtime_s,
            "timestamp": self.timestamp,
            "fingerprint": self.fingerprint,
        }
        if self.stage_runs is not None:
            out["stage_runs"] = [run.to_dict() for run in self.stage_runs]
        out.update(self.extra_fields)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ExecutionRecord":
        known = {"context", "scale_out", "runtime_s", "stage_runs", "timestamp", "fingerprint"}
        stage_runs = data.get("stage_runs")
        record = cls(
            context=ExecutionContext.from_dict(data.get("context", {})),
            scale_out=data.get("scale_out", 0),
            runtime_s=data.get("runtime_s", 0.0),
            stage_runs=None if stage_runs is None else [StageRun.from_dict(r) for r in stage_runs],
            timestamp=data.get("timestamp", "1970-01-01T00:00:00+00:00"),
            extra_fields={k: v for k, v in data.items() if k not in known},
        )
        record.validate()
        record.fingerprint = record_fingerprint(record)
        stored = data.get("fingerprint")
        if stored and stored != record.fingerprint:
            raise ValidationError(
                f"stored fingerprint {stored} does not match recomputed {record.fingerprint}"
            )
        return record


def record_fingerprint(record: ExecutionRecord) -> str:
    """Content hash of a record over its canonical serialization.

    The timestamp and any unknown pass-through fields are excluded, so two
    observations of the same run made at different times agree.
    """
    payload = {
        "context": record.context.hash_payload(),
        "scale_out": record.scale_out,
        "runtime_s": record.runtime_s,
        "stage_runs": None
        if record.stage_runs is None
        else [run.hash_payload() for run in record.stage_runs],
    }
    text = canonical_json(payload)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def finalize_record(record: ExecutionRecord) -> ExecutionRecord:
    """Validate a record and stamp its fingerprint in place."""
    record.validate()
    record.fingerprint = record_fingerprint(record)
    return record
