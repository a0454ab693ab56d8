"""Parsing model output in the three-line QA block format.

Blocks look like:

    QAs:
    Question template number: 2
    Question: Whose articles?
    Answer: She

Malformed blocks become diagnostics instead of aborting the parse, and
every surviving QA is grounded to a contiguous token range so it already
satisfies the record validation rules.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

from ..errors import UnparseableQuestionError
from ..grammar import parse_question
from ..model import AnswerSpan, NounTarget, QAPair, Sentence, tokenize
from .prompts import NO_QAS_SENTINEL

_TEMPLATE_LINE = re.compile(r"question template number:\s*(\d+)\s*$", re.IGNORECASE)
_QUESTION_LINE = re.compile(r"question:\s*(.+?)\s*$", re.IGNORECASE)
_ANSWER_LINE = re.compile(r"answer:\s*(.+?)\s*$", re.IGNORECASE)


@dataclass(frozen=True)
class ParseNote:
    kind: str
    detail: str
    block: str = ""


@dataclass(frozen=True)
class ParseOutcome:
    qas: tuple[QAPair, ...]
    raw_text: str
    diagnostics: tuple[ParseNote, ...]


def ground_answer(
    answer: str, sentence: Sentence
) -> tuple[AnswerSpan | None, int]:
    """First token range whose texts match the answer's tokens, plus the
    total number of occurrences (for ambiguity diagnostics)."""
    answer_tokens = tokenize(answer).token_texts()
    if not answer_tokens:
        return None, 0
    sent_tokens = sentence.token_texts()
    k = len(answer_tokens)
    first_span = None
    occurrences = 0
    for i in range(len(sent_tokens) - k + 1):
        if sent_tokens[i : i + k] == answer_tokens:
            occurrences += 1
            if first_span is None:
                first_span = AnswerSpan(i, i + k - 1)
    return first_span, occurrences


def format_output(qas: Sequence[QAPair]) -> str:
    """Serialize a QA set into the three-line block format (or the sentinel)."""
    if not qas:
        return NO_QAS_SENTINEL
    lines = ["QAs:"]
    for qa in sorted(qas, key=lambda q: (int(q.form.template), q.answer.first_token)):
        lines.append(f"Question template number: {int(qa.form.template)}")
        lines.append(f"Question: {qa.rendered_question()}")
        lines.append(f"Answer: {qa.answer_text}")
    return "\n".join(lines)


def parse_output(raw: str, sentence: Sentence, target: NounTarget) -> ParseOutcome:
    """Recover grounded QAPairs from raw model output."""
    qas: list[QAPair] = []
    notes: list[ParseNote] = []

    if NO_QAS_SENTINEL.rstrip(".").lower() in raw.strip().rstrip(".").lower():
        if raw.strip() != NO_QAS_SENTINEL:
            notes.append(ParseNote("noisy-sentinel", "sentinel with surrounding text"))
        return ParseOutcome(qas=(), raw_text=raw, diagnostics=tuple(notes))

    lines = [ln.strip() for ln in raw.splitlines() if ln.strip()]
    i = 0
    while i < len(lines):
        m = _TEMPLATE_LINE.fullmatch(lines[i])
        if m is None:
            if lines[i].lower().rstrip(":") != "qas":
                notes.append(ParseNote("unrecognized-line", lines[i]))
            i += 1
            continue
        block = "\n".join(lines[i : i + 3])
        if i + 2 >= len(lines):
            notes.append(ParseNote("truncated-block", "missing question/answer lines", block))
            break
        qm = _QUESTION_LINE.fullmatch(lines[i + 1])
        am = _ANSWER_LINE.fullmatch(lines[i + 2])
        i += 3
        if qm is None or am is None:
            notes.append(ParseNote("malformed-block", "expected Question/Answer lines", block))
            continue
        template_num, question, answer = int(m.group(1)), qm.group(1), am.group(1)
        try:
            form = parse_question(question, target.surface)
        except UnparseableQuestionError as exc:
            notes.append(ParseNote("unparseable-question", str(exc), block))
            continue
        if int(form.template) != template_num:
            notes.append(
                ParseNote(
                    "template-number-mismatch",
                    f"stated {template_num}, question is template {int(form.template)}",
                    block,
                )
            )
            continue
        span, occurrences = ground_answer(answer, sentence)
        if span is None:
            notes.append(ParseNote("ungrounded-answer", f"answer {answer!r} not in sentence", block))
            continue
        if occurrences > 1:
            notes.append(
                ParseNote(
                    "ambiguous-answer",
                    f"answer {answer!r} occurs {occurrences} times; using first",
                    block,
                )
            )
        qas.append(
            QAPair(
                target=target,
                form=form,
                answer=span,
                answer_text=sentence.span_text(span.first_token, span.last_token),
                question=question,
            )
        )
    return ParseOutcome(qas=tuple(qas), raw_text=raw, diagnostics=tuple(notes))
