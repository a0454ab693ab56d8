"""Sentence decomposition into atomic meaning units and atomicity reporting.

Noun-centered and verb-centered QA units are pooled per sentence, redundant
(paraphrastic) units are clustered by mutual entailment seeded with a
span-overlap pre-filter, and surviving units are judged for source
entailment.  Per-sentence (generated, non-redundant, entailed) triples feed
the corpus report with a bootstrap CI on the entailed mean.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Literal, Protocol, Sequence

from .bootstrap import BootstrapCI, bootstrap_ci
from .errors import QANounError
from .gateway.endpoint import ChatClient
from .gateway.parse import ground_answer, parse_output
from .gateway.prompts import Exemplar, build_prompt, judge_prompt_template
from .matching import IOU_THRESHOLD, token_iou
from .model import AnswerSpan, NounTarget, Sentence
from .corpus import HeuristicTagger, NounTagger

log = logging.getLogger(__name__)

UnitSourceTag = Literal["noun", "verb"]


@dataclass(frozen=True)
class RawUnit:
    """An ungrounded unit as produced by a parser backend."""

    question: str
    answer_text: str
    predicate: str


@dataclass(frozen=True)
class MeaningUnit:
    """One grounded QA unit treated as an atomic sub-claim."""

    id: int
    source: UnitSourceTag
    question: str
    answer: AnswerSpan
    answer_text: str
    predicate: str
    sentence_id: str


class NounUnitSource(Protocol):
    def generate(self, sentence: Sentence, target: NounTarget) -> list[RawUnit]: ...


class VerbUnitSource(Protocol):
    def generate(self, sentence: Sentence) -> list[RawUnit]: ...


class PromptNounParser:
    """Noun unit source backed by the few-shot prompt pipeline."""

    def __init__(self, client: ChatClient, exemplars: tuple[Exemplar, ...]):
        self.client = client
        self.exemplars = exemplars

    def generate(self, sentence: Sentence, target: NounTarget) -> list[RawUnit]:
        raw = self.client.complete(build_prompt(sentence, target, self.exemplars))
        outcome = parse_output(raw, sentence, target)
        return [
            RawUnit(
                question=qa.rendered_question(),
                answer_text=qa.answer_text,
                predicate=target.surface,
            )
            for qa in outcome.qas
        ]


class HttpVerbUnitAdapter:
    """Adapter for an external verbal QA parser service.

    Expects a JSON API: POST {base_url}/parse with {"text": ...} returning
    {"qas": [{"question", "answer", "predicate"?}]}.
    """

    def __init__(self, base_url: str, timeout_seconds: float = 60.0):
        self.base_url = base_url.rstrip("/")
        self.timeout_seconds = timeout_seconds

    def generate(self, sentence: Sentence) -> list[RawUnit]:
        import httpx

        from .errors import TransportError

        try:
            resp = httpx.post(
                f"{self.base_url}/parse",
                json={"text": sentence.text},
                timeout=self.timeout_seconds,
            )
            resp.raise_for_status()
            payload = resp.json()
        except httpx.HTTPError as exc:
            raise TransportError(f"verb unit source failed: {exc}") from exc
        return [
            RawUnit(
                question=qa["question"],
                answer_text=qa["answer"],
                predicate=qa.get("predicate", ""),
            )
            for qa in payload.get("qas", [])
        ]


class PromptVerbUnitAdapter:
    """Prompt-based verbal unit source for deployments without a parser service."""

    _PROMPT = (
        "List every verb in the sentence below, and for each verb write "
        "question-answer pairs covering its arguments. Answers must be exact "
        "contiguous spans from the sentence.\n"
        "Format, one pair per two lines:\n"
        "Question: <the question>\nAnswer: <the answer>\n\n"
        "Sentence: {sentence}\n"
    )

    def __init__(self, client: ChatClient):
        self.client = client

    def generate(self, sentence: Sentence) -> list[RawUnit]:
        raw = self.client.complete(self._PROMPT.format(sentence=sentence.text))
        units = []
        question = None
        for line in raw.splitlines():
            line = line.strip()
            if line.lower().startswith("question:"):
                question = line.split(":", 1)[1].strip()
            elif line.lower().startswith("answer:") and question:
                units.append(
                    RawUnit(
                        question=question,
                        answer_text=line.split(":", 1)[1].strip(),
                        predicate="",
                    )
                )
                question = None
        return units


class ScriptedNounSource:
    """Test stub keyed by (sentence_id, target token index)."""

    def __init__(self, units: dict[tuple[str, int], list[RawUnit]]):
        self.units = units

    def generate(self, sentence: Sentence, target: NounTarget) -> list[RawUnit]:
        return list(self.units.get((sentence.id, target.token_index), []))


class ScriptedVerbSource:
    def __init__(self, units: dict[str, list[RawUnit]]):
        self.units = units

    def generate(self, sentence: Sentence) -> list[RawUnit]:
        return list(self.units.get(sentence.id, []))


def decompose(
    sentence: Sentence,
    noun_source: NounUnitSource,
    verb_source: VerbUnitSource,
    tagger: NounTagger | None = None,
) -> list[MeaningUnit]:
    """All grounded units for one sentence, noun targets first.

    Ungrounded answers are dropped with a log note; counts are therefore
    insensitive to unit-source ordering beyond id assignment.
    """
    tagger = tagger or HeuristicTagger()
    raw: list[tuple[UnitSourceTag, RawUnit]] = []
    for index in tagger.noun_indices(sentence):
        target = NounTarget(
            sentence_id=sentence.id, token_index=index, surface=sentence.token_text(index)
        )
        for unit in noun_source.generate(sentence, target):
            raw.append(("noun", unit))
    for unit in verb_source.generate(sentence):
        raw.append(("verb", unit))

    units: list[MeaningUnit] = []
    for source, item in raw:
        span, _ = ground_answer(item.answer_text, sentence)
        if span is None:
            log.warning(
                "dropping ungrounded %s unit %r on sentence %s",
                source,
                item.answer_text,
                sentence.id,
            )
            continue
        units.append(
            MeaningUnit(
                id=len(units),
                source=source,
                question=item.question,
                answer=span,
                answer_text=sentence.span_text(span.first_token, span.last_token),
                predicate=item.predicate,
                sentence_id=sentence.id,
            )
        )
    return units


class PairJudge(Protocol):
    """Directional entailment between two units of the same sentence."""

    def entails(self, sentence: Sentence, a: MeaningUnit, b: MeaningUnit) -> bool: ...


class UnitJudge(Protocol):
    """Entailment of a unit by its source sentence."""

    def entailed(self, sentence: Sentence, unit: MeaningUnit) -> bool: ...


class ChatUnitJudge:
    """LLM-backed judge for both unit-vs-sentence and unit-vs-unit checks."""

    _PAIR_PROMPT = (
        "Fact A is expressed as a question-answer pair, and so is Fact B.\n"
        "Fact A question: {qa}\nFact A answer: {aa}\n"
        "Fact B question: {qb}\nFact B answer: {ab}\n"
        "Given the sentence: {sentence}\n"
        "Does Fact A express the same information as, or strictly more than, "
        "Fact B? Reply with a single word: yes or no."
    )

    def __init__(self, client: ChatClient, model_name: str = "unknown"):
        self.client = client
        self.model_name = model_name

    def _yes(self, response: str) -> bool:
        return response.strip().strip(".!,\"'").lower() == "yes"

    def entailed(self, sentence: Sentence, unit: MeaningUnit) -> bool:
        prompt = judge_prompt_template().format(
            sentence=sentence.text, question=unit.question, answer=unit.answer_text
        )
        return self._yes(self.client.complete(prompt))

    def entails(self, sentence: Sentence, a: MeaningUnit, b: MeaningUnit) -> bool:
        prompt = self._PAIR_PROMPT.format(
            qa=a.question,
            aa=a.answer_text,
            qb=b.question,
            ab=b.answer_text,
            sentence=sentence.text,
        )
        return self._yes(self.client.complete(prompt))


class ScriptedPairJudge:
    """Stub: entails(a, b) is true iff (a.question, b.question) is scripted."""

    def __init__(self, entailing: set[tuple[str, str]]):
        self.entailing = entailing

    def entails(self, sentence: Sentence, a: MeaningUnit, b: MeaningUnit) -> bool:
        return (a.question, b.question) in self.entailing


class ScriptedUnitJudge:
    def __init__(self, entailed_questions: set[str] | None = None, default: bool = True):
        self.entailed_questions = entailed_questions
        self.default = default

    def entailed(self, sentence: Sentence, unit: MeaningUnit) -> bool:
        if self.entailed_questions is None:
            return self.default
        return unit.question in self.entailed_questions


@dataclass(frozen=True)
class RedundancyCluster:
    member_ids: tuple[int, ...]
    representative_id: int
    evidence: tuple[str, ...] = ()

    def __post_init__(self):
        if self.representative_id not in self.member_ids:
            raise ValueError("representative must be a cluster member")


def filter_redundant(
    sentence: Sentence,
    units: Sequence[MeaningUnit],
    judge: PairJudge,
    within_source: bool = False,
) -> tuple[list[RedundancyCluster], list[MeaningUnit]]:
    """Cluster mutually entailing units; keep one representative per cluster.

    Stage 1 marks candidate pairs: answer-span IoU > 1/2 and, unless
    within_source is set, units from different sources.  Stage 2 merges the
    pairs the judge declares mutually entailing, then takes the transitive
    closure.  Judge failures leave the pair unmerged.  The representative is
    the noun-sourced member when present (lowest id), else the lowest id.
    """
    parent = {u.id: u.id for u in units}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    evidence: dict[int, list[str]] = {u.id: [] for u in units}
    for i, a in enumerate(units):
        for b in units[i + 1 :]:
            if not within_source and a.source == b.source:
                continue
            if token_iou(a.answer, b.answer) <= IOU_THRESHOLD:
                continue
            try:
                mutual = judge.entails(sentence, a, b) and judge.entails(sentence, b, a)
            except QANounError as exc:
                log.warning("judge failed on pair (%d, %d): %s", a.id, b.id, exc)
                continue
            if mutual:
                evidence[a.id].append(f"mutual-entailment with {b.id}")
                evidence[b.id].append(f"mutual-entailment with {a.id}")
                parent[find(a.id)] = find(b.id)

    groups: dict[int, list[MeaningUnit]] = {}
    for u in units:
        groups.setdefault(find(u.id), []).append(u)

    by_id = {u.id: u for u in units}
    clusters = []
    kept_ids = []
    for members in groups.values():
        members.sort(key=lambda u: u.id)
        noun_members = [u for u in members if u.source == "noun"]
        rep = (noun_members or members)[0].id
        ev = tuple(note for u in members for note in evidence[u.id])
        clusters.append(
            RedundancyCluster(
                member_ids=tuple(u.id for u in members),
                representative_id=rep,
                evidence=ev,
            )
        )
        kept_ids.append(rep)
    clusters.sort(key=lambda c: c.member_ids[0])
    kept = [by_id[i] for i in sorted(kept_ids)]
    return clusters, kept


@dataclass(frozen=True)
class SentenceCounts:
    sentence_id: str
    generated: int
    non_redundant: int
    entailed: int
    error: str | None = None

    def __post_init__(self):
        if self.error is None and not (
            self.entailed <= self.non_redundant <= self.generated
        ):
            raise ValueError(
                f"count monotonicity violated for {self.sentence_id}: "
                f"{self.entailed} <= {self.non_redundant} <= {self.generated}"
            )


@dataclass(frozen=True)
class DecompReport:
    per_sentence: tuple[SentenceCounts, ...]
    mean_generated: float
    mean_non_redundant: float
    mean_entailed: float
    entailed_ci: BootstrapCI
    errors: tuple[str, ...] = ()


def process_sentence(
    sentence: Sentence,
    noun_source: NounUnitSource,
    verb_source: VerbUnitSource,
    pair_judge: PairJudge,
    unit_judge: UnitJudge,
    tagger: NounTagger | None = None,
    within_source: bool = False,
) -> SentenceCounts:
    units = decompose(sentence, noun_source, verb_source, tagger)
    _, kept = filter_redundant(sentence, units, pair_judge, within_source)
    entailed = 0
    for unit in kept:
        try:
            if unit_judge.entailed(sentence, unit):
                entailed += 1
        except QANounError as exc:
            log.warning("entailment judge failed on unit %d: %s", unit.id, exc)
    return SentenceCounts(
        sentence_id=sentence.id,
        generated=len(units),
        non_redundant=len(kept),
        entailed=entailed,
    )


def run_pipeline(
    sentences: Sequence[Sentence],
    noun_source: NounUnitSource,
    verb_source: VerbUnitSource,
    pair_judge: PairJudge,
    unit_judge: UnitJudge,
    tagger: NounTagger | None = None,
    within_source: bool = False,
) -> list[SentenceCounts]:
    """Per-sentence counts; a failing sentence is recorded, not fatal."""
    results = []
    for sentence in sentences:
        try:
            results.append(
                process_sentence(
                    sentence,
                    noun_source,
                    verb_source,
                    pair_judge,
                    unit_judge,
                    tagger,
                    within_source,
                )
            )
        except QANounError as exc:
            log.error("sentence %s failed: %s", sentence.id, exc)
            results.append(
                SentenceCounts(
                    sentence_id=sentence.id,
                    generated=0,
                    non_redundant=0,
                    entailed=0,
                    error=str(exc),
                )
            )
    return results


def decomp_report(
    results: Sequence[SentenceCounts],
    replicates: int = 200_000,
    level: float = 0.95,
    seed: int | None = None,
) -> DecompReport:
    """Corpus means over successful sentences plus a CI on the entailed mean."""
    ok = [r for r in results if r.error is None]
    errors = tuple(f"{r.sentence_id}: {r.error}" for r in results if r.error is not None)
    if not ok:
        raise QANounError("no successfully processed sentences to report on")
    n = len(ok)
    ci = bootstrap_ci(
        [r.entailed for r in ok], replicates=replicates, level=level, seed=seed
    )
    return DecompReport(
        per_sentence=tuple(results),
        mean_generated=sum(r.generated for r in ok) / n,
        mean_non_redundant=sum(r.non_redundant for r in ok) / n,
        mean_entailed=sum(r.entailed for r in ok) / n,
        entailed_ci=ci,
        errors=errors,
    )
