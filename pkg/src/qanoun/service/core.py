"""Disagreement computation and reconciliation between two annotators.

A matched QA pair can disagree along two independent dimensions, role
(question form) and extent (span boundaries); each dimension is emitted as
its own entry so adjudication resolves them explicitly.  Unmatched QAs are
coverage disagreements.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

from ..errors import UsageError
from ..grammar import render_question
from ..matching import match_arguments
from ..model import AnnotationRecord, AnswerSpan, QAPair, Sentence
from ..validation import Violation, validate_record

DisagreementKind = Literal["role", "extent", "coverage"]
DecisionAction = Literal["keep_left", "keep_right", "edit", "add", "drop"]


@dataclass(frozen=True)
class Disagreement:
    id: str
    kind: DisagreementKind
    left_qa_index: int | None
    right_qa_index: int | None
    left_qa: QAPair | None
    right_qa: QAPair | None


@dataclass(frozen=True)
class ReconciliationDecision:
    """One adjudication act; `qa` carries the replacement for edit/add."""

    disagreement_id: str | None  # None only for standalone adds
    action: DecisionAction
    qa: QAPair | None = None
    note: str = ""  # free-text dissent record when annotators still disagree


class ReconciliationRejected(UsageError):
    def __init__(self, violations: Sequence[Violation]):
        super().__init__(
            "consolidated record failed validation: "
            + "; ".join(str(v) for v in violations)
        )
        self.violations = list(violations)


def compute_disagreements(
    left: AnnotationRecord, right: AnnotationRecord
) -> list[Disagreement]:
    """Align the two QA sets and classify every mismatch.

    Symmetric up to left/right labeling: swapping the records swaps the
    entries' sides but preserves kinds and pairings.
    """
    if left.target != right.target:
        raise UsageError("records annotate different targets")
    result = match_arguments(left.answer_spans(), right.answer_spans())
    matched_left = {li for li, _, _ in result.pairs}
    matched_right = {ri for _, ri, _ in result.pairs}

    out: list[Disagreement] = []
    for li, ri, _ in result.pairs:
        lqa, rqa = left.qas[li], right.qas[ri]
        if lqa.form != rqa.form:
            out.append(
                Disagreement(f"role:{li}:{ri}", "role", li, ri, lqa, rqa)
            )
        if lqa.answer != rqa.answer:
            out.append(
                Disagreement(f"extent:{li}:{ri}", "extent", li, ri, lqa, rqa)
            )
    for li, lqa in enumerate(left.qas):
        if li not in matched_left:
            out.append(Disagreement(f"coverage:l{li}", "coverage", li, None, lqa, None))
    for ri, rqa in enumerate(right.qas):
        if ri not in matched_right:
            out.append(Disagreement(f"coverage:r{ri}", "coverage", None, ri, None, rqa))
    return out


def _rebuild(qa_template: QAPair, form, answer: AnswerSpan, sentence: Sentence) -> QAPair:
    return QAPair(
        target=qa_template.target,
        form=form,
        answer=answer,
        answer_text=sentence.span_text(answer.first_token, answer.last_token),
        question=render_question(form, qa_template.target.surface),
    )


def reconcile_records(
    sentence: Sentence,
    left: AnnotationRecord,
    right: AnnotationRecord,
    decisions: Sequence[ReconciliationDecision],
    consolidator_id: str,
) -> AnnotationRecord:
    """Apply decisions to produce the consolidated record.

    Every disagreement must be addressed.  For a matched pair, the role
    decision selects the question form and the extent decision selects the
    span; a drop on either dimension drops the whole QA.  Deterministic for
    a fixed decision set, hence idempotent.
    """
    disagreements = compute_disagreements(left, right)
    by_id = {d.id: d for d in disagreements}
    decided = {d.disagreement_id for d in decisions if d.disagreement_id is not None}
    unknown = decided - set(by_id)
    if unknown:
        raise UsageError(f"decisions reference unknown disagreements: {sorted(unknown)}")
    missing = set(by_id) - decided
    if missing:
        raise UsageError(f"unaddressed disagreements: {sorted(missing)}")

    decision_for = {
        d.disagreement_id: d for d in decisions if d.disagreement_id is not None
    }

    result = match_arguments(left.answer_spans(), right.answer_spans())
    qas: list[QAPair] = []
    for li, ri, _ in result.pairs:
        lqa, rqa = left.qas[li], right.qas[ri]
        form, answer = lqa.form, lqa.answer
        dropped = False
        role_d = decision_for.get(f"role:{li}:{ri}")
        if role_d is not None:
            if role_d.action == "drop":
                dropped = True
            elif role_d.action == "keep_right":
                form = rqa.form
            elif role_d.action == "edit":
                if role_d.qa is None:
                    raise UsageError(f"edit decision for role:{li}:{ri} carries no QA")
                form = role_d.qa.form
            elif role_d.action != "keep_left":
                raise UsageError(f"invalid action {role_d.action!r} for a role entry")
        extent_d = decision_for.get(f"extent:{li}:{ri}")
        if extent_d is not None:
            if extent_d.action == "drop":
                dropped = True
            elif extent_d.action == "keep_right":
                answer = rqa.answer
            elif extent_d.action == "edit":
                if extent_d.qa is None:
                    raise UsageError(f"edit decision for extent:{li}:{ri} carries no QA")
                answer = extent_d.qa.answer
            elif extent_d.action != "keep_left":
                raise UsageError(f"invalid action {extent_d.action!r} for an extent entry")
        if not dropped:
            qas.append(_rebuild(lqa, form, answer, sentence))

    for d in disagreements:
        if d.kind != "coverage":
            continue
        decision = decision_for[d.id]
        present = d.left_qa if d.left_qa is not None else d.right_qa
        assert present is not None
        if decision.action == "drop":
            continue
        if decision.action in ("keep_left", "keep_right"):
            expected = "keep_left" if d.left_qa is not None else "keep_right"
            if decision.action != expected:
                raise UsageError(
                    f"coverage entry {d.id} has only one side; use {expected} or drop"
                )
            qas.append(_rebuild(present, present.form, present.answer, sentence))
        elif decision.action == "edit":
            if decision.qa is None:
                raise UsageError(f"edit decision for {d.id} carries no QA")
            qas.append(
                _rebuild(decision.qa, decision.qa.form, decision.qa.answer, sentence)
            )
        else:
            raise UsageError(f"invalid action {decision.action!r} for a coverage entry")

    for decision in decisions:
        if decision.disagreement_id is None:
            if decision.action != "add" or decision.qa is None:
                raise UsageError("standalone decisions must be adds carrying a QA")
            qas.append(
                _rebuild(decision.qa, decision.qa.form, decision.qa.answer, sentence)
            )

    consolidated = AnnotationRecord(
        target=left.target,
        annotator_id=consolidator_id,
        phase="consolidated",
        qas=tuple(qas),
    )
    violations = validate_record(consolidated, sentence)
    if violations:
        raise ReconciliationRejected(violations)
    return consolidated
