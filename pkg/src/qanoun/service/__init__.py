from .core import (
    Disagreement,
    ReconciliationDecision,
    ReconciliationRejected,
    compute_disagreements,
    reconcile_records,
)
from .store import ProjectStore, ProjectState, TargetState, target_key

__all__ = [
    "Disagreement",
    "ReconciliationDecision",
    "ReconciliationRejected",
    "compute_disagreements",
    "reconcile_records",
    "ProjectStore",
    "ProjectState",
    "TargetState",
    "target_key",
]
