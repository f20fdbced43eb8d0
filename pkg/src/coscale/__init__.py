"""Collaborative cluster configuration toolkit.

Shares runtime records of distributed data-parallel jobs across execution
contexts, trains context-aware runtime predictors on local and global data,
recommends (machine type, scale-out) configurations under runtime targets,
and rescales simulated iterative jobs at synchronization barriers.
"""

from .errors import (
    CoscaleError,
    MergeConflictError,
    NoUsableDataError,
    UndertrainedError,
    ValidationError,
)
from .records import (
    DatasetDescriptor,
    ExecutionContext,
    ExecutionRecord,
    JobSignature,
    MachineType,
    StageRun,
    finalize_record,
    record_fingerprint,
)
from .repository import (
    Repository,
    append_record,
    load_catalog,
    load_records,
    load_repository,
    merge_repositories,
    query,
    repository_from_records,
    save_catalog,
    save_repository,
)
from .similarity import (
    ResourceGroup,
    SimilarityWeights,
    context_similarity,
    group_resources,
    job_match_level,
    machine_similarity,
)

__version__ = "0.1.0"
