"""Event-sourced persistence for annotation projects.

Each project lives under <data_dir>/<project_id>/ as an append-only
events.jsonl plus a periodic snapshot.json.  Every event is validated
before it is appended and fsynced, so a crash at any point leaves either a
fully applied event or no event; a torn trailing line is truncated on load.
Writes to one project are serialized through a per-project lock.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Literal, Sequence

from ..corpus import (
    HeuristicTagger,
    NounTagger,
    dataset_record_to_dict,
    record_from_dict,
    record_to_dict,
)
from ..errors import AuthorizationError, ConfigurationError, NotReadyError, UsageError
from ..metrics import UAScores, iaa
from ..model import (
    AnnotationRecord,
    DatasetRecord,
    NounTarget,
    Sentence,
    TargetEntry,
    TokenSpan,
)
from ..validation import Violation, validate_record
from .core import Disagreement, ReconciliationDecision, compute_disagreements, reconcile_records

Policy = Literal["single", "paired"]

SNAPSHOT_EVERY = 100


def target_key(sentence_id: str, token_index: int) -> str:
    return f"{sentence_id}:{token_index}"


@dataclass
class TargetState:
    target: NounTarget
    assigned: tuple[str, ...]
    submissions: dict[str, list[AnnotationRecord]] = field(default_factory=dict)
    consolidated: AnnotationRecord | None = None
    consolidation_meta: dict | None = None

    def current_records(self) -> list[AnnotationRecord]:
        return [history[-1] for _, history in sorted(self.submissions.items())]

    @property
    def status(self) -> str:
        if self.consolidated is not None:
            return "done"
        submitted = len(self.submissions)
        if submitted == 0:
            return "pending"
        if submitted < len(self.assigned):
            return "in_progress"
        return "ready_to_reconcile"


@dataclass
class ProjectState:
    project_id: str
    roster: tuple[str, ...]
    policy: Policy
    split: str
    sentence_order: list[str]
    sentences: dict[str, Sentence]
    targets: dict[str, TargetState]


def _sentence_to_dict(s: Sentence) -> dict:
    return {
        "id": s.id,
        "text": s.text,
        "tokens": [{"start": t.start_char, "end": t.end_char} for t in s.tokens],
    }


def _sentence_from_dict(obj: dict) -> Sentence:
    return Sentence(
        id=obj["id"],
        text=obj["text"],
        tokens=tuple(TokenSpan(t["start"], t["end"]) for t in obj["tokens"]),
    )


def _state_to_dict(state: ProjectState) -> dict:
    return {
        "project_id": state.project_id,
        "roster": list(state.roster),
        "policy": state.policy,
        "split": state.split,
        "sentence_order": state.sentence_order,
        "sentences": {sid: _sentence_to_dict(s) for sid, s in state.sentences.items()},
        "targets": {
            key: {
                "sentence_id": ts.target.sentence_id,
                "token_index": ts.target.token_index,
                "assigned": list(ts.assigned),
                "submissions": {
                    annotator: [record_to_dict(r) for r in history]
                    for annotator, history in ts.submissions.items()
                },
                "consolidated": record_to_dict(ts.consolidated)
                if ts.consolidated
                else None,
                "consolidation_meta": ts.consolidation_meta,
            }
            for key, ts in state.targets.items()
        },
    }


def _state_from_dict(obj: dict) -> ProjectState:
    sentences = {sid: _sentence_from_dict(s) for sid, s in obj["sentences"].items()}
    targets = {}
    for key, ts in obj["targets"].items():
        sentence = sentences[ts["sentence_id"]]
        target = NounTarget(
            sentence_id=ts["sentence_id"],
            token_index=ts["token_index"],
            surface=sentence.token_text(ts["token_index"]),
        )
        targets[key] = TargetState(
            target=target,
            assigned=tuple(ts["assigned"]),
            submissions={
                annotator: [record_from_dict(r, target) for r in history]
                for annotator, history in ts["submissions"].items()
            },
            consolidated=record_from_dict(ts["consolidated"], target)
            if ts["consolidated"]
            else None,
            consolidation_meta=ts.get("consolidation_meta"),
        )
    return ProjectState(
        project_id=obj["project_id"],
        roster=tuple(obj["roster"]),
        policy=obj["policy"],
        split=obj["split"],
        sentence_order=list(obj["sentence_order"]),
        sentences=sentences,
        targets=targets,
    )


class EventLog:
    """Append-only JSONL file with torn-tail recovery."""

    def __init__(self, path: Path):
        self.path = path

    def append(self, event: dict) -> None:
        line = json.dumps(event, ensure_ascii=False, sort_keys=True) + "\n"
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(line)
            fh.flush()
            os.fsync(fh.fileno())

    def read_all(self) -> list[dict]:
        """All complete events; truncates a torn trailing line in place."""
        if not self.path.exists():
            return []
        events = []
        good_end = 0
        with open(self.path, "rb") as fh:
            data = fh.read()
        pos = 0
        while pos < len(data):
            newline = data.find(b"\n", pos)
            if newline == -1:
                break  # torn tail: no terminating newline
            line = data[pos : newline]
            try:
                events.append(json.loads(line.decode("utf-8")))
            except (json.JSONDecodeError, UnicodeDecodeError):
                break  # torn or corrupt: drop this line and everything after
            pos = newline + 1
            good_end = pos
        if good_end < len(data):
            with open(self.path, "r+b") as fh:
                fh.truncate(good_end)
        return events


class ProjectStore:
    """All persisted projects under one data directory."""

    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._projects: dict[str, ProjectState] = {}
        self._event_counts: dict[str, int] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    # -- lifecycle -----------------------------------------------------------

    def list_projects(self) -> list[str]:
        on_disk = {
            p.name for p in self.data_dir.iterdir() if (p / "events.jsonl").exists()
        }
        return sorted(on_disk | set(self._projects))

    def reload(self) -> None:
        """Drop all in-memory state; next access replays from disk."""
        with self._registry_lock:
            self._projects.clear()
            self._event_counts.clear()

    def _lock(self, project_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(project_id, threading.Lock())

    def _project_dir(self, project_id: str) -> Path:
        return self.data_dir / project_id

    def _log(self, project_id: str) -> EventLog:
        return EventLog(self._project_dir(project_id) / "events.jsonl")

    def get_project(self, project_id: str) -> ProjectState:
        if project_id not in self._projects:
            self._load(project_id)
        return self._projects[project_id]

    def _load(self, project_id: str) -> None:
        log = self._log(project_id)
        if not log.path.exists():
            raise UsageError(f"unknown project {project_id!r}")
        events = log.read_all()
        state: ProjectState | None = None
        start = 0
        snapshot_path = self._project_dir(project_id) / "snapshot.json"
        if snapshot_path.exists():
            try:
                snap = json.loads(snapshot_path.read_text("utf-8"))
                if snap["event_count"] <= len(events):
                    state = _state_from_dict(snap["state"])
                    start = snap["event_count"]
            except (json.JSONDecodeError, KeyError, ValueError):
                state = None  # corrupt snapshot: fall back to full replay
        for event in events[start:]:
            state = self._apply(state, event)
        if state is None:
            raise UsageError(f"project {project_id!r} has no creation event")
        with self._registry_lock:
            self._projects[project_id] = state
            self._event_counts[project_id] = len(events)

    def _maybe_snapshot(self, project_id: str) -> None:
        count = self._event_counts.get(project_id, 0)
        if count == 0 or count % SNAPSHOT_EVERY != 0:
            return
        state = self._projects[project_id]
        payload = json.dumps(
            {"event_count": count, "state": _state_to_dict(state)},
            ensure_ascii=False,
            sort_keys=True,
        )
        path = self._project_dir(project_id) / "snapshot.json"
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(payload, encoding="utf-8")
        os.replace(tmp, path)

    def _commit(self, project_id: str, event: dict) -> None:
        """Durably append, then apply in memory (apply cannot fail post-validation)."""
        self._log(project_id).append(event)
        state = self._projects.get(project_id)
        self._projects[project_id] = self._apply(state, event)
        self._event_counts[project_id] = self._event_counts.get(project_id, 0) + 1
        self._maybe_snapshot(project_id)

    # -- event application ---------------------------------------------------

    def _apply(self, state: ProjectState | None, event: dict) -> ProjectState:
        kind = event["type"]
        if kind == "project_created":
            p = event["project"]
            sentences = {
                s["id"]: _sentence_from_dict(s) for s in p["sentences"]
            }
            targets = {}
            for t in p["targets"]:
                sentence = sentences[t["sentence_id"]]
                target = NounTarget(
                    sentence_id=t["sentence_id"],
                    token_index=t["token_index"],
                    surface=sentence.token_text(t["token_index"]),
                )
                targets[target_key(t["sentence_id"], t["token_index"])] = TargetState(
                    target=target, assigned=tuple(t["assigned"])
                )
            return ProjectState(
                project_id=p["project_id"],
                roster=tuple(p["roster"]),
                policy=p["policy"],
                split=p["split"],
                sentence_order=[s["id"] for s in p["sentences"]],
                sentences=sentences,
                targets=targets,
            )
        assert state is not None, "event stream must start with project_created"
        if kind == "record_submitted":
            ts = state.targets[event["target"]]
            record = record_from_dict(event["record"], ts.target)
            ts.submissions.setdefault(record.annotator_id, []).append(record)
            return state
        if kind == "reconciled":
            ts = state.targets[event["target"]]
            ts.consolidated = record_from_dict(event["record"], ts.target)
            ts.consolidation_meta = {
                "actor": event["actor"],
                "co_sign": event.get("co_sign"),
                "note": event.get("note", ""),
            }
            return state
        raise UsageError(f"unknown event type {kind!r}")

    # -- operations ----------------------------------------------------------

    def create_project(
        self,
        project_id: str,
        sentences: Sequence[Sentence],
        roster: Sequence[str],
        policy: Policy = "paired",
        split: str = "test",
        tagger: NounTagger | None = None,
        explicit_targets: dict[str, list[int]] | None = None,
    ) -> ProjectState:
        """Detect targets, assign annotators per policy, persist atomically."""
        if not sentences:
            raise ConfigurationError("project needs at least one sentence")
        if not roster:
            raise ConfigurationError("project needs at least one annotator")
        if policy == "paired" and len(roster) < 2:
            raise ConfigurationError("paired policy needs a roster of at least 2")
        if policy not in ("single", "paired"):
            raise ConfigurationError(f"unknown assignment policy {policy!r}")
        with self._lock(project_id):
            if self._project_dir(project_id).joinpath("events.jsonl").exists():
                raise UsageError(f"project {project_id!r} already exists")
            tagger = tagger or HeuristicTagger()
            pairs = list(combinations(roster, 2))
            target_dicts = []
            index = 0
            for sentence in sentences:
                if explicit_targets is not None:
                    indices = explicit_targets.get(sentence.id, [])
                else:
                    indices = tagger.noun_indices(sentence)
                for token_index in indices:
                    if policy == "paired":
                        assigned = list(pairs[index % len(pairs)])
                    else:
                        assigned = [roster[index % len(roster)]]
                    target_dicts.append(
                        {
                            "sentence_id": sentence.id,
                            "token_index": token_index,
                            "assigned": assigned,
                        }
                    )
                    index += 1
            event = {
                "type": "project_created",
                "project": {
                    "project_id": project_id,
                    "roster": list(roster),
                    "policy": policy,
                    "split": split,
                    "sentences": [_sentence_to_dict(s) for s in sentences],
                    "targets": target_dicts,
                },
            }
            self._project_dir(project_id).mkdir(parents=True, exist_ok=True)
            self._commit(project_id, event)
            return self._projects[project_id]

    def assignments_for(self, project_id: str, annotator_id: str) -> list[str]:
        state = self.get_project(project_id)
        return [
            key for key, ts in sorted(state.targets.items()) if annotator_id in ts.assigned
        ]

    def submit_annotation(
        self, project_id: str, key: str, record: AnnotationRecord
    ) -> list[Violation]:
        """Validate and persist one independent annotation; returns violations
        (empty on acceptance).  Resubmission appends to the version history."""
        with self._lock(project_id):
            state = self.get_project(project_id)
            if key not in state.targets:
                raise UsageError(f"unknown target {key!r}")
            ts = state.targets[key]
            if record.annotator_id not in ts.assigned:
                raise AuthorizationError(
                    f"annotator {record.annotator_id!r} is not assigned to {key}"
                )
            if record.phase != "independent":
                raise UsageError("submissions must be in the independent phase")
            if record.target != ts.target:
                raise UsageError("record target does not match the assignment")
            sentence = state.sentences[ts.target.sentence_id]
            violations = validate_record(record, sentence)
            if violations:
                return violations
            self._commit(
                project_id,
                {"type": "record_submitted", "target": key, "record": record_to_dict(record)},
            )
            return []

    def disagreements(self, project_id: str, key: str) -> list[Disagreement]:
        state = self.get_project(project_id)
        ts = state.targets.get(key)
        if ts is None:
            raise UsageError(f"unknown target {key!r}")
        records = ts.current_records()
        if len(ts.assigned) != 2:
            raise UsageError("disagreements require a paired assignment")
        if len(records) < 2:
            raise NotReadyError(f"target {key} has {len(records)} of 2 records")
        return compute_disagreements(records[0], records[1])

    def reconcile(
        self,
        project_id: str,
        key: str,
        decisions: Sequence[ReconciliationDecision],
        actor: str,
        co_sign: str | None = None,
        note: str = "",
    ) -> AnnotationRecord:
        with self._lock(project_id):
            state = self.get_project(project_id)
            ts = state.targets.get(key)
            if ts is None:
                raise UsageError(f"unknown target {key!r}")
            if actor not in ts.assigned:
                raise AuthorizationError(f"actor {actor!r} is not assigned to {key}")
            records = ts.current_records()
            if len(records) < 2:
                raise NotReadyError(f"target {key} is not ready to reconcile")
            sentence = state.sentences[ts.target.sentence_id]
            consolidated = reconcile_records(
                sentence, records[0], records[1], decisions, actor
            )
            self._commit(
                project_id,
                {
                    "type": "reconciled",
                    "target": key,
                    "record": record_to_dict(consolidated),
                    "actor": actor,
                    "co_sign": co_sign,
                    "note": note,
                },
            )
            return consolidated

    # -- export --------------------------------------------------------------

    def export(
        self, project_id: str, allow_partial: bool = False
    ) -> tuple[list[DatasetRecord], dict]:
        """Dataset records in the corpus file shape, plus an IAA summary."""
        state = self.get_project(project_id)
        pending = [k for k, ts in state.targets.items() if ts.status != "done"]
        if pending and not allow_partial:
            raise NotReadyError(
                f"{len(pending)} targets not consolidated; pass allow_partial to export anyway"
            )

        dataset: list[DatasetRecord] = []
        for sid in state.sentence_order:
            sentence = state.sentences[sid]
            entries = []
            for key, ts in sorted(
                state.targets.items(), key=lambda kv: kv[1].target.token_index
            ):
                if ts.target.sentence_id != sid:
                    continue
                records = tuple(ts.current_records()) + (
                    (ts.consolidated,) if ts.consolidated else ()
                )
                if not records:
                    continue
                entries.append(
                    TargetEntry(token_index=ts.target.token_index, records=records)
                )
            dataset.append(
                DatasetRecord(
                    sentence=sentence, split=state.split, targets=tuple(entries)
                )
            )

        pairs = [
            (recs[0], recs[1])
            for ts in state.targets.values()
            if len(recs := ts.current_records()) == 2
        ]
        summary: dict = {
            "targets": len(state.targets),
            "consolidated": sum(
                1 for ts in state.targets.values() if ts.status == "done"
            ),
        }
        if pairs:
            scores: UAScores = iaa(pairs)
            summary["iaa_macro_f1"] = f"{float(scores.f1):.4f}"
            summary["iaa_macro_precision"] = f"{float(scores.precision):.4f}"
            summary["iaa_macro_recall"] = f"{float(scores.recall):.4f}"
        return dataset, summary

    def target_iaa(self, project_id: str, key: str) -> float:
        """Agreement for one target: 1.0 once consolidated, else pairwise F1."""
        state = self.get_project(project_id)
        ts = state.targets[key]
        if ts.consolidated is not None:
            return 1.0
        records = ts.current_records()
        if len(records) < 2:
            raise NotReadyError(f"target {key} has fewer than 2 records")
        return float(iaa([(records[0], records[1])]).f1)
