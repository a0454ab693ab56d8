"""Entailment judging of QA pairs against their source sentence."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from ..errors import IndeterminateVerdictError
from ..model import QAPair, Sentence
from .endpoint import ChatClient
from .prompts import judge_prompt_template, prompt_hash

_REPROMPT_SUFFIX = "\n\nAnswer strictly with one word, either yes or no."


@dataclass(frozen=True)
class EntailmentVerdict:
    question: str
    answer: str
    entailed: bool
    judge_model: str
    raw_response: str
    reprompted: bool = False


def _judge_prompt(sentence: Sentence, question: str, answer: str) -> str:
    return judge_prompt_template().format(
        sentence=sentence.text, question=question, answer=answer
    )


def judge_prompt_version() -> str:
    """Hash of the judge prompt fixture, cited in reports."""
    return prompt_hash(judge_prompt_template())


def _extract_verdict(response: str) -> bool | None:
    word = response.strip().strip(".!,\"'").lower()
    if word in ("yes", "no"):
        return word == "yes"
    return None


def judge_entailment(
    sentence: Sentence,
    qa: QAPair,
    client: ChatClient,
    judge_model: str = "unknown",
) -> EntailmentVerdict:
    """Ask the judge whether the QA pair is entailed by the sentence.

    Transport failures propagate from the client per its retry policy.  A
    non-yes/no response triggers exactly one stricter reprompt before the
    verdict is declared indeterminate.
    """
    question = qa.rendered_question()
    prompt = _judge_prompt(sentence, question, qa.answer_text)
    first = client.complete(prompt)
    verdict = _extract_verdict(first)
    if verdict is not None:
        return EntailmentVerdict(
            question=question,
            answer=qa.answer_text,
            entailed=verdict,
            judge_model=judge_model,
            raw_response=first,
        )
    second = client.complete(prompt + _REPROMPT_SUFFIX)
    verdict = _extract_verdict(second)
    if verdict is None:
        raise IndeterminateVerdictError([first, second])
    return EntailmentVerdict(
        question=question,
        answer=qa.answer_text,
        entailed=verdict,
        judge_model=judge_model,
        raw_response=second,
        reprompted=True,
    )


def judge_many(
    sentence: Sentence,
    qas: Sequence[QAPair],
    client: ChatClient,
    judge_model: str = "unknown",
    max_in_flight: int = 1,
) -> list[EntailmentVerdict]:
    """Judge a batch concurrently; results preserve input order."""
    if max_in_flight <= 1 or len(qas) <= 1:
        return [judge_entailment(sentence, qa, client, judge_model) for qa in qas]
    with ThreadPoolExecutor(max_workers=max_in_flight) as pool:
        return list(
            pool.map(lambda qa: judge_entailment(sentence, qa, client, judge_model), qas)
        )
