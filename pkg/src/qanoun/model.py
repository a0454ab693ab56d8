"""Core data model: sentences, token spans, noun targets, QA pairs, records.

All types are immutable value objects; invariants are enforced at
construction time so downstream code can rely on well-formed instances.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Literal

from .grammar import QuestionForm

Phase = Literal["independent", "consolidated"]
SplitTag = Literal["train", "dev", "test"]

SPLITS = ("train", "dev", "test")

_TOKEN_RE = re.compile(r"\w+(?:[-'’]\w+)*|[^\w\s]")


@dataclass(frozen=True)
class TokenSpan:
    """Half-open character range [start_char, end_char) of one token."""

    start_char: int
    end_char: int

    def __post_init__(self):
        if self.start_char < 0:
            raise ValueError(f"negative start_char: {self.start_char}")
        if self.end_char <= self.start_char:
            raise ValueError(
                f"empty or inverted token span [{self.start_char}, {self.end_char})"
            )


@dataclass(frozen=True)
class Sentence:
    """Tokenized source text with character-anchored token spans."""

    id: str
    text: str
    tokens: tuple[TokenSpan, ...]

    def __post_init__(self):
        prev_end = 0
        for i, tok in enumerate(self.tokens):
            if tok.start_char < prev_end:
                raise ValueError(f"sentence {self.id}: token {i} overlaps or disorders")
            if tok.end_char > len(self.text):
                raise ValueError(f"sentence {self.id}: token {i} exceeds text bounds")
            prev_end = tok.end_char

    def token_text(self, index: int) -> str:
        tok = self.tokens[index]
        return self.text[tok.start_char : tok.end_char]

    def token_texts(self) -> list[str]:
        return [self.token_text(i) for i in range(len(self.tokens))]

    def span_text(self, first_token: int, last_token: int) -> str:
        """Original text covered by the inclusive token range."""
        if not 0 <= first_token <= last_token < len(self.tokens):
            raise IndexError(f"token range [{first_token}, {last_token}] out of bounds")
        return self.text[
            self.tokens[first_token].start_char : self.tokens[last_token].end_char
        ]


def tokenize(text: str, sentence_id: str = "") -> Sentence:
    """Rule-based tokenizer: whitespace splitting with punctuation detached.

    Hyphenated and apostrophe-joined words stay single tokens so spans like
    "30-acre" survive as one answer token.  Ingested corpora may carry their
    own token spans instead; nothing downstream assumes this tokenizer.
    """
    spans = tuple(TokenSpan(m.start(), m.end()) for m in _TOKEN_RE.finditer(text))
    return Sentence(id=sentence_id, text=text, tokens=spans)


@dataclass(frozen=True)
class NounTarget:
    """A marked noun in a sentence, identified by token index."""

    sentence_id: str
    token_index: int
    surface: str

    def __post_init__(self):
        if self.token_index < 0:
            raise ValueError(f"negative token_index: {self.token_index}")
        if not self.surface:
            raise ValueError("empty target surface")

    def check_against(self, sentence: Sentence) -> None:
        if sentence.id != self.sentence_id:
            raise ValueError(
                f"target belongs to sentence {self.sentence_id}, got {sentence.id}"
            )
        if self.token_index >= len(sentence.tokens):
            raise ValueError(f"token_index {self.token_index} out of bounds")
        actual = sentence.token_text(self.token_index)
        if actual != self.surface:
            raise ValueError(f"surface {self.surface!r} != token text {actual!r}")


@dataclass(frozen=True)
class AnswerSpan:
    """Inclusive token range [first_token, last_token] of an argument."""

    first_token: int
    last_token: int

    def __post_init__(self):
        if self.first_token < 0 or self.last_token < self.first_token:
            raise ValueError(
                f"invalid answer span [{self.first_token}, {self.last_token}]"
            )

    def indices(self) -> range:
        return range(self.first_token, self.last_token + 1)

    def __len__(self) -> int:
        return self.last_token - self.first_token + 1


@dataclass(frozen=True)
class QAPair:
    """One atomic meaning unit: a question about the target noun plus its answer span."""

    target: NounTarget
    form: QuestionForm
    answer: AnswerSpan
    answer_text: str
    question: str | None = None  # rendered question, cached; None = render on demand

    def rendered_question(self) -> str:
        from .grammar import render_question

        if self.question is not None:
            return self.question
        return render_question(self.form, self.target.surface)


@dataclass(frozen=True)
class AnnotationRecord:
    """One annotator's (or the consolidated) QA set for a single target."""

    target: NounTarget
    annotator_id: str
    phase: Phase
    qas: tuple[QAPair, ...]

    def __post_init__(self):
        for qa in self.qas:
            if qa.target != self.target:
                raise ValueError("QAPair target differs from record target")

    def answer_spans(self) -> list[AnswerSpan]:
        return [qa.answer for qa in self.qas]


@dataclass(frozen=True)
class TargetEntry:
    """All annotation records attached to one target noun in a dataset record."""

    token_index: int
    records: tuple[AnnotationRecord, ...]
    extra: dict = field(default_factory=dict, compare=False)

    def consolidated(self) -> AnnotationRecord | None:
        for rec in self.records:
            if rec.phase == "consolidated":
                return rec
        return None

    def primary_record(self) -> AnnotationRecord | None:
        """Consolidated record if present, else the first record."""
        return self.consolidated() or (self.records[0] if self.records else None)


@dataclass(frozen=True)
class DatasetRecord:
    """One sentence with its annotated targets and split assignment."""

    sentence: Sentence
    split: SplitTag
    targets: tuple[TargetEntry, ...]
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.split not in SPLITS:
            raise ValueError(f"unknown split tag {self.split!r}")
