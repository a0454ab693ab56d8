"""HTTP API for the annotation workflow.

Resource-oriented routes over the project store; payloads reuse the dataset
file format's object shapes.  Authentication is a bearer token resolved to
an annotator id through a token table (file or dict); the service has no
user management beyond the roster.
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi import Depends, FastAPI, Header, HTTPException, Query
from fastapi.responses import JSONResponse

from ..corpus import dataset_record_to_dict, qa_from_dict, qa_to_dict, record_from_dict
from ..errors import (
    AuthorizationError,
    IngestionError,
    NotReadyError,
    QANounError,
    UsageError,
)
from ..model import Sentence, TokenSpan, tokenize
from .core import Disagreement, ReconciliationDecision, ReconciliationRejected
from .store import ProjectStore, TargetState


def load_token_table(path: str | Path) -> dict[str, str]:
    """Token file: JSON object mapping opaque token -> annotator id."""
    return json.loads(Path(path).read_text("utf-8"))


def _disagreement_to_dict(d: Disagreement) -> dict:
    return {
        "id": d.id,
        "kind": d.kind,
        "left_qa_index": d.left_qa_index,
        "right_qa_index": d.right_qa_index,
        "left_qa": qa_to_dict(d.left_qa) if d.left_qa else None,
        "right_qa": qa_to_dict(d.right_qa) if d.right_qa else None,
    }


def _target_summary(key: str, ts: TargetState) -> dict:
    return {
        "key": key,
        "sentence_id": ts.target.sentence_id,
        "token_index": ts.target.token_index,
        "surface": ts.target.surface,
        "assigned": list(ts.assigned),
        "status": ts.status,
    }


def create_app(store: ProjectStore, tokens: dict[str, str]) -> FastAPI:
    app = FastAPI(title="qanoun-annotation-service")

    def annotator(authorization: str = Header(default="")) -> str:
        token = authorization.removeprefix("Bearer ").strip()
        if token not in tokens:
            raise HTTPException(status_code=401, detail="unknown or missing token")
        return tokens[token]

    @app.exception_handler(QANounError)
    async def _domain_error(request, exc: QANounError):
        status = 400
        if isinstance(exc, AuthorizationError):
            status = 403
        elif isinstance(exc, NotReadyError):
            status = 409
        body = {"detail": str(exc)}
        if isinstance(exc, ReconciliationRejected):
            status = 422
            body["violations"] = [
                {"rule": v.rule, "qa_index": v.qa_index, "message": v.message}
                for v in exc.violations
            ]
        return JSONResponse(status_code=status, content=body)

    @app.post("/projects")
    def create_project(payload: dict, actor: str = Depends(annotator)):
        sentences = []
        for s in payload["sentences"]:
            if "tokens" in s:
                sentences.append(
                    Sentence(
                        id=s["id"],
                        text=s["text"],
                        tokens=tuple(
                            TokenSpan(t["start"], t["end"]) for t in s["tokens"]
                        ),
                    )
                )
            else:
                sentences.append(tokenize(s["text"], sentence_id=s["id"]))
        explicit = payload.get("targets")
        state = store.create_project(
            project_id=payload["project_id"],
            sentences=sentences,
            roster=payload["roster"],
            policy=payload.get("policy", "paired"),
            split=payload.get("split", "test"),
            explicit_targets=explicit,
        )
        return {
            "project_id": state.project_id,
            "targets": [
                _target_summary(k, ts) for k, ts in sorted(state.targets.items())
            ],
        }

    @app.get("/projects/{project_id}")
    def get_project(project_id: str, actor: str = Depends(annotator)):
        state = store.get_project(project_id)
        return {
            "project_id": state.project_id,
            "roster": list(state.roster),
            "policy": state.policy,
            "split": state.split,
            "targets": [
                _target_summary(k, ts) for k, ts in sorted(state.targets.items())
            ],
        }

    @app.get("/projects/{project_id}/assignments")
    def assignments(project_id: str, actor: str = Depends(annotator)):
        keys = store.assignments_for(project_id, actor)
        state = store.get_project(project_id)
        return {
            "annotator": actor,
            "assignments": [_target_summary(k, state.targets[k]) for k in keys],
        }

    @app.get("/projects/{project_id}/targets/{key}")
    def get_target(project_id: str, key: str, actor: str = Depends(annotator)):
        state = store.get_project(project_id)
        if key not in state.targets:
            raise HTTPException(status_code=404, detail=f"unknown target {key}")
        ts = state.targets[key]
        sentence = state.sentences[ts.target.sentence_id]
        mine = ts.submissions.get(actor, [])
        return {
            **_target_summary(key, ts),
            "sentence": {
                "id": sentence.id,
                "text": sentence.text,
                "tokens": [
                    {"start": t.start_char, "end": t.end_char} for t in sentence.tokens
                ],
            },
            "my_record": {
                "annotator": actor,
                "phase": "independent",
                "qas": [qa_to_dict(q) for q in mine[-1].qas],
            }
            if mine
            else None,
            "my_versions": len(mine),
        }

    @app.post("/projects/{project_id}/targets/{key}/records")
    def submit_record(
        project_id: str, key: str, payload: dict, actor: str = Depends(annotator)
    ):
        state = store.get_project(project_id)
        if key not in state.targets:
            raise HTTPException(status_code=404, detail=f"unknown target {key}")
        ts = state.targets[key]
        try:
            record = record_from_dict(
                {"annotator": actor, "phase": "independent", "qas": payload["qas"]},
                ts.target,
            )
        except IngestionError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        violations = store.submit_annotation(project_id, key, record)
        return {
            "accepted": not violations,
            "violations": [
                {"rule": v.rule, "qa_index": v.qa_index, "message": v.message}
                for v in violations
            ],
        }

    @app.get("/projects/{project_id}/targets/{key}/disagreements")
    def disagreements(project_id: str, key: str, actor: str = Depends(annotator)):
        items = store.disagreements(project_id, key)
        return {"disagreements": [_disagreement_to_dict(d) for d in items]}

    @app.post("/projects/{project_id}/targets/{key}/decisions")
    def decide(
        project_id: str, key: str, payload: dict, actor: str = Depends(annotator)
    ):
        state = store.get_project(project_id)
        if key not in state.targets:
            raise HTTPException(status_code=404, detail=f"unknown target {key}")
        ts = state.targets[key]
        decisions = []
        for d in payload.get("decisions", []):
            qa = qa_from_dict(d["qa"], ts.target) if d.get("qa") else None
            decisions.append(
                ReconciliationDecision(
                    disagreement_id=d.get("disagreement_id"),
                    action=d["action"],
                    qa=qa,
                    note=d.get("note", ""),
                )
            )
        record = store.reconcile(
            project_id,
            key,
            decisions,
            actor=actor,
            co_sign=payload.get("co_sign"),
            note=payload.get("note", ""),
        )
        return {
            "consolidated": {
                "annotator": record.annotator_id,
                "phase": record.phase,
                "qas": [qa_to_dict(q) for q in record.qas],
            }
        }

    @app.get("/projects/{project_id}/targets/{key}/iaa")
    def target_iaa(project_id: str, key: str, actor: str = Depends(annotator)):
        return {"iaa_f1": store.target_iaa(project_id, key)}

    @app.get("/projects/{project_id}/export")
    def export(
        project_id: str,
        partial: bool = Query(default=False),
        actor: str = Depends(annotator),
    ):
        records, summary = store.export(project_id, allow_partial=partial)
        return {
            "records": [dataset_record_to_dict(r) for r in records],
            "summary": summary,
        }

    return app
