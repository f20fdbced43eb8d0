"""Portable repositories of runtime records: append, merge, query, JSONL IO.

Repositories are treated as immutable values; every operation returns a new
one, so queries are safe to evaluate concurrently and callers mutate by
replacing their reference.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Optional

from .errors import MergeConflictError, ValidationError
from .records import ExecutionRecord, MachineType

RecordPredicate = Callable[[ExecutionRecord], bool]


@dataclass
class Repository:
    records: dict = field(default_factory=dict)  # fingerprint -> ExecutionRecord
    catalog: dict = field(default_factory=dict)  # name -> MachineType

    def __len__(self) -> int:
        return len(self.records)

    def machine_for(self, name: str) -> MachineType:
        try:
            return self.catalog[name]
        except KeyError:
            raise ValidationError(f"unknown machine type {name!r}") from None

    def machines(self) -> list:
        return [self.catalog[name] for name in sorted(self.catalog)]


def _earlier(a: ExecutionRecord, b: ExecutionRecord) -> ExecutionRecord:
    # Dedup keeps the earliest-timestamped copy for provenance stability.
    return a if a.timestamp_value() <= b.timestamp_value() else b


def append_record(
    repo: Repository, record: ExecutionRecord, machine: Optional[MachineType] = None
) -> tuple[Repository, bool]:
    """Insert a record, deduplicating by fingerprint.

    The record's machine reference must resolve in the repository catalog,
    unless the machine type is supplied alongside. Returns the new repository
    and whether the record was actually inserted.
    """
    record.validate()
    if not record.fingerprint:
        raise ValidationError("record has no fingerprint; call finalize_record first")
    catalog = dict(repo.catalog)
    name = record.context.machine
    if name not in catalog:
        if machine is None or machine.name != name:
            raise ValidationError(f"unknown machine type {name!r}; supply it or import a catalog")
        machine.validate()
        catalog[name] = machine
    records = dict(repo.records)
    existing = records.get(record.fingerprint)
    if existing is not None:
        records[record.fingerprint] = _earlier(existing, record)
        return Repository(records=records, catalog=catalog), False
    records[record.fingerprint] = record
    return Repository(records=records, catalog=catalog), True


def merge_repositories(a: Repository, b: Repository) -> Repository:
    """Union of two repositories: records by fingerprint, catalog by name.

    Catalog entries sharing a name must be field-identical, otherwise the
    merge is rejected with the conflicting names.
    """
    conflicts = [
        name
        for name in set(a.catalog) & set(b.catalog)
        if a.catalog[name] != b.catalog[name]
    ]
    if conflicts:
        raise MergeConflictError(conflicts)
    catalog = dict(a.catalog)
    catalog.update(b.catalog)
    records = dict(a.records)
    for fp, record in b.records.items():
        records[fp] = record if fp not in records else _earlier(records[fp], record)
    return Repository(records=records, catalog=catalog)


def query(repo: Repository, predicate: Optional[RecordPredicate] = None) -> list:
    """All records matching the predicate, ordered by fingerprint."""
    out = []
    for fp in sorted(repo.records):
        record = repo.records[fp]
        if predicate is None or predicate(record):
            out.append(record)
    return out


def mark_locality(records: Iterable[ExecutionRecord], origin: str) -> list:
    """Set the query-time locality flag against the querying user's origin."""
    out = list(records)
    for record in out:
        record.context.is_local = record.context.origin == origin
    return out


def repository_from_records(
    records: Iterable[ExecutionRecord], catalog: Iterable[MachineType]
) -> Repository:
    repo = Repository(catalog={m.name: m for m in catalog})
    for m in repo.catalog.values():
        m.validate()
    for record in records:
        repo, _ = append_record(repo, record)
    return repo


def _dump_line(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def save_catalog(machines: Iterable[MachineType], path) -> None:
    lines = [_dump_line(m.to_dict()) for m in sorted(machines, key=lambda m: m.name)]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def load_catalog(path) -> list:
    machines = []
    seen = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        machine = MachineType.from_dict(json.loads(line))
        if machine.name in seen:
            raise ValidationError(f"duplicate machine type {machine.name!r} in {path}")
        seen.add(machine.name)
        machines.append(machine)
    return machines


def save_repository(repo: Repository, path, catalog_path=None) -> None:
    """Write records as one JSON object per line, ordered by fingerprint."""
    lines = [_dump_line(repo.records[fp].to_dict()) for fp in sorted(repo.records)]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
    if catalog_path is not None:
        save_catalog(repo.catalog.values(), catalog_path)


def load_records(path) -> list:
    records = []
    for idx, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines()):
        if not line.strip():
            continue
        try:
            records.append(ExecutionRecord.from_dict(json.loads(line)))
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}:{idx + 1}: invalid JSON: {exc}") from exc
    return records


def load_repository(path, catalog: Iterable[MachineType]) -> Repository:
    return repository_from_records(load_records(path), catalog)
