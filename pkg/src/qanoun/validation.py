"""Guideline-derived validation of annotation records.

Violations are data, not exceptions: validate_record reports every broken
rule with the offending QA index so callers (service, CLI, UI) can surface
them all at once.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import FormError
from .model import AnnotationRecord, Sentence


@dataclass(frozen=True)
class Violation:
    rule: str
    qa_index: int | None
    message: str

    def __str__(self) -> str:
        where = f"qa[{self.qa_index}]" if self.qa_index is not None else "record"
        return f"{self.rule} at {where}: {self.message}"


def validate_record(record: AnnotationRecord, sentence: Sentence) -> list[Violation]:
    """Check a record against the sentence and the annotation guidelines.

    Rules checked: target grounding, slot-grammar validity of every form,
    in-bounds contiguous answer spans, answer_text integrity, and the
    no-duplicate-answer guideline.  Idempotent and order-insensitive.
    """
    violations: list[Violation] = []

    try:
        record.target.check_against(sentence)
    except ValueError as exc:
        violations.append(Violation("target-mismatch", None, str(exc)))
        return violations

    seen_spans: dict[tuple[int, int], int] = {}
    for i, qa in enumerate(record.qas):
        try:
            qa.form.validate()
        except FormError as exc:
            violations.append(Violation("form-invalid", i, str(exc)))

        span = qa.answer
        if span.last_token >= len(sentence.tokens):
            violations.append(
                Violation(
                    "answer-out-of-bounds",
                    i,
                    f"span [{span.first_token}, {span.last_token}] exceeds "
                    f"{len(sentence.tokens)} tokens",
                )
            )
            continue

        covered = sentence.span_text(span.first_token, span.last_token)
        if qa.answer_text != covered:
            violations.append(
                Violation(
                    "text-mismatch",
                    i,
                    f"answer_text {qa.answer_text!r} != covered text {covered!r}",
                )
            )

        key = (span.first_token, span.last_token)
        if key in seen_spans:
            violations.append(
                Violation(
                    "duplicate-answer",
                    i,
                    f"same answer span as qa[{seen_spans[key]}]",
                )
            )
        else:
            seen_spans[key] = i

    return violations
