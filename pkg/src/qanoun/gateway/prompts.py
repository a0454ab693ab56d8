"""Few-shot prompt assembly for the QA generation task.

The instruction block is a versioned fixture loaded from package data;
build_prompt is a pure function of its inputs so prompts are byte-stable
and can be cited by hash.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from importlib import resources

from ..errors import ConfigurationError
from ..grammar import TemplateId
from ..model import NounTarget, Sentence

NO_QAS_SENTINEL = "There are no QAs generated."
MIN_EXAMPLES_PER_TEMPLATE = 2


def _fixture(name: str) -> str:
    return (
        resources.files("qanoun.gateway").joinpath(f"fixtures/{name}").read_text("utf-8")
    )


def generation_instructions() -> str:
    return _fixture("generation_instructions.txt").rstrip("\n")


def judge_prompt_template() -> str:
    return _fixture("entailment_judge.txt").rstrip("\n")


def prompt_hash(text: str) -> str:
    """Stable short hash used to cite the exact prompt in reports."""
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:12]


@dataclass(frozen=True)
class ExemplarQA:
    template: int
    question: str
    answer: str


@dataclass(frozen=True)
class Exemplar:
    """A worked example: sentence with the target marked, plus its QAs."""

    marked_sentence: str
    qas: tuple[ExemplarQA, ...]


def mark_noun(sentence: Sentence, target: NounTarget) -> str:
    """Wrap the target token in <f></f> markers within the sentence text."""
    target.check_against(sentence)
    span = sentence.tokens[target.token_index]
    return (
        sentence.text[: span.start_char]
        + "<f>"
        + sentence.text[span.start_char : span.end_char]
        + "</f>"
        + sentence.text[span.end_char :]
    )


def format_exemplar_qas(qas: tuple[ExemplarQA, ...]) -> str:
    if not qas:
        return NO_QAS_SENTINEL
    lines = ["QAs:"]
    for qa in sorted(qas, key=lambda q: q.template):
        lines.append(f"Question template number: {qa.template}")
        lines.append(f"Question: {qa.question}")
        lines.append(f"Answer: {qa.answer}")
    return "\n".join(lines)


def check_exemplar_coverage(exemplars: tuple[Exemplar, ...]) -> None:
    counts = {t: 0 for t in TemplateId}
    for ex in exemplars:
        for qa in ex.qas:
            counts[TemplateId(qa.template)] += 1
    short = [t.name for t in TemplateId if counts[t] < MIN_EXAMPLES_PER_TEMPLATE]
    if short:
        raise ConfigurationError(
            "exemplar set needs at least "
            f"{MIN_EXAMPLES_PER_TEMPLATE} examples per template; short on: "
            + ", ".join(short)
        )


def build_prompt(
    sentence: Sentence, target: NounTarget, exemplars: tuple[Exemplar, ...]
) -> str:
    """Instruction block, worked exemplars, then the query sentence."""
    check_exemplar_coverage(exemplars)
    parts = [generation_instructions()]
    for ex in exemplars:
        parts.append(f"Sentence: {ex.marked_sentence}\n{format_exemplar_qas(ex.qas)}")
    parts.append(f"Sentence: {mark_noun(sentence, target)}")
    return "\n\n".join(parts) + "\n"
