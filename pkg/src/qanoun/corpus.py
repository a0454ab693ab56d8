"""Dataset file IO (line-delimited JSON), statistics, and target detection.

One JSON object per sentence:

    {id, text, tokens:[{start,end}], split,
     targets:[{token_index, records:[{annotator, phase, qas:[...]}]}]}

Unknown fields are ignored on read but preserved on rewrite, so corpora can
carry provenance metadata through a round trip unchanged.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Protocol

from .errors import IngestionError
from .grammar import QuestionForm, TemplateId, render_question
from .model import (
    AnnotationRecord,
    AnswerSpan,
    DatasetRecord,
    NounTarget,
    QAPair,
    Sentence,
    TargetEntry,
    TokenSpan,
)

_SENTENCE_KEYS = {"id", "text", "tokens", "split", "targets"}
_TARGET_KEYS = {"token_index", "records"}
_RECORD_KEYS = {"annotator", "phase", "qas"}
_QA_KEYS = {
    "template",
    "property",
    "wh",
    "part_member",
    "much_many",
    "article",
    "question",
    "answer",
    "answer_text",
}


def qa_to_dict(qa: QAPair) -> dict:
    form = qa.form
    out: dict = {"template": int(form.template)}
    if form.property_word is not None:
        out["property"] = form.property_word
    if form.wh_choice is not None:
        out["wh"] = form.wh_choice
    if form.part_member_choice is not None:
        out["part_member"] = form.part_member_choice
    if form.amount_choice is not None:
        out["much_many"] = form.amount_choice
    out["article"] = form.use_article
    out["question"] = qa.rendered_question()
    out["answer"] = {"first_token": qa.answer.first_token, "last_token": qa.answer.last_token}
    out["answer_text"] = qa.answer_text
    return out


def qa_from_dict(obj: dict, target: NounTarget) -> QAPair:
    try:
        template = TemplateId(int(obj["template"]))
        form = QuestionForm(
            template=template,
            property_word=obj.get("property"),
            wh_choice=obj.get("wh"),
            part_member_choice=obj.get("part_member"),
            amount_choice=obj.get("much_many"),
            use_article=bool(obj.get("article", False)),
        )
        answer = obj["answer"]
        span = AnswerSpan(int(answer["first_token"]), int(answer["last_token"]))
        question = obj.get("question") or render_question(form, target.surface)
        return QAPair(
            target=target,
            form=form,
            answer=span,
            answer_text=obj["answer_text"],
            question=question,
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise IngestionError(f"malformed qa object: {exc}") from exc


def record_to_dict(record: AnnotationRecord) -> dict:
    return {
        "annotator": record.annotator_id,
        "phase": record.phase,
        "qas": [qa_to_dict(qa) for qa in record.qas],
    }


def record_from_dict(obj: dict, target: NounTarget) -> AnnotationRecord:
    try:
        phase = obj["phase"]
        if phase not in ("independent", "consolidated"):
            raise IngestionError(f"unknown phase {phase!r}")
        return AnnotationRecord(
            target=target,
            annotator_id=str(obj["annotator"]),
            phase=phase,
            qas=tuple(qa_from_dict(q, target) for q in obj["qas"]),
        )
    except (KeyError, TypeError) as exc:
        raise IngestionError(f"malformed record object: {exc}") from exc


def dataset_record_to_dict(rec: DatasetRecord) -> dict:
    out: dict = {
        "id": rec.sentence.id,
        "text": rec.sentence.text,
        "tokens": [
            {"start": t.start_char, "end": t.end_char} for t in rec.sentence.tokens
        ],
        "split": rec.split,
        "targets": [
            {
                "token_index": entry.token_index,
                "records": [record_to_dict(r) for r in entry.records],
                **{k: entry.extra[k] for k in sorted(entry.extra)},
            }
            for entry in rec.targets
        ],
    }
    for key in sorted(rec.extra):
        out[key] = rec.extra[key]
    return out


def dataset_record_from_dict(obj: dict) -> DatasetRecord:
    try:
        sentence = Sentence(
            id=str(obj["id"]),
            text=obj["text"],
            tokens=tuple(TokenSpan(int(t["start"]), int(t["end"])) for t in obj["tokens"]),
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise IngestionError(
            f"malformed sentence object: {exc}", record_id=str(obj.get("id"))
        ) from exc

    targets = []
    for tgt in obj.get("targets", []):
        try:
            token_index = int(tgt["token_index"])
            target = NounTarget(
                sentence_id=sentence.id,
                token_index=token_index,
                surface=sentence.token_text(token_index),
            )
        except (KeyError, ValueError, IndexError, TypeError) as exc:
            raise IngestionError(
                f"malformed target object: {exc}", record_id=sentence.id
            ) from exc
        records = tuple(record_from_dict(r, target) for r in tgt.get("records", []))
        extra = {k: v for k, v in tgt.items() if k not in _TARGET_KEYS}
        targets.append(TargetEntry(token_index=token_index, records=records, extra=extra))

    split = obj.get("split")
    if split not in ("train", "dev", "test"):
        raise IngestionError(f"missing or unknown split {split!r}", record_id=sentence.id)
    extra = {k: v for k, v in obj.items() if k not in _SENTENCE_KEYS}
    return DatasetRecord(sentence=sentence, split=split, targets=tuple(targets), extra=extra)


def read_corpus(path: str | Path) -> list[DatasetRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise IngestionError(f"line {lineno}: invalid JSON: {exc}") from exc
            try:
                records.append(dataset_record_from_dict(obj))
            except IngestionError as exc:
                raise IngestionError(f"line {lineno}: {exc}", record_id=exc.record_id) from exc
    return records


def write_corpus(records: Iterable[DatasetRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(dataset_record_to_dict(rec), ensure_ascii=False))
            fh.write("\n")


@dataclass
class CorpusStats:
    """Raw counts over a corpus; one QA from the primary record per target."""

    sentences: int = 0
    predicates: int = 0
    arguments: int = 0
    template_counts: Counter = field(default_factory=Counter)
    split_counts: Counter = field(default_factory=Counter)
    notes: list[str] = field(default_factory=list)

    def template_sum(self) -> int:
        return sum(self.template_counts.values())


def dataset_stats(records: Iterable[DatasetRecord]) -> CorpusStats:
    """Per-template histogram plus sentence/predicate/argument totals.

    Counts use each target's consolidated record when present, otherwise its
    first record, so paired independent passes are not double-counted.
    """
    stats = CorpusStats()
    for rec in records:
        stats.sentences += 1
        stats.split_counts[rec.split] += 1
        for entry in rec.targets:
            stats.predicates += 1
            record = entry.primary_record()
            if record is None:
                continue
            for qa in record.qas:
                stats.arguments += 1
                stats.template_counts[TemplateId(qa.form.template)] += 1
    return stats


class NounTagger(Protocol):
    """Interface for target-noun detection; implementations are pluggable."""

    def noun_indices(self, sentence: Sentence) -> list[int]: ...


# Function words that the fallback tagger never proposes as noun targets.
_STOPWORDS = frozenset(
    """a an the and or but if then else for nor so yet of in on at by to from with
    without into onto over under about after before during between among through
    is are was were be been being am do does did done have has had having will
    would shall should can could may might must not no this that these those it
    its he she his her him hers they them their theirs we us our ours you your
    yours i me my mine who whom whose which what where when why how there here
    as than too very just also only more most less least each every some any
    all both few many much other another such own same s t don now""".split()
)


class HeuristicTagger:
    """Crude fallback: alphabetic non-function words are candidate nouns.

    Over-generates by design; production projects should plug a real
    POS tagger through the NounTagger interface.
    """

    def noun_indices(self, sentence: Sentence) -> list[int]:
        out = []
        for i in range(len(sentence.tokens)):
            text = sentence.token_text(i)
            if text[0].isalpha() and text.lower() not in _STOPWORDS:
                out.append(i)
        return out


class SpacyTagger:
    """Adapter over a spaCy pipeline, for corpora ingested without targets."""

    def __init__(self, model: str = "en_core_web_sm"):
        import spacy  # deferred: optional dependency

        self._nlp = spacy.load(model)

    def noun_indices(self, sentence: Sentence) -> list[int]:
        doc = self._nlp(sentence.text)
        noun_starts = {
            tok.idx for tok in doc if tok.pos_ in ("NOUN", "PROPN")
        }
        return [
            i
            for i, span in enumerate(sentence.tokens)
            if span.start_char in noun_starts
        ]
