"""Noun-centered QA annotation, evaluation, and decomposition toolkit."""

from .grammar import QuestionForm, TemplateId, parse_question, render_question
from .matching import MatchResult, match_arguments, token_iou
from .metrics import SRAJudgment, UAScores, iaa, sra_report, ua_scores
from .model import (
    AnnotationRecord,
    AnswerSpan,
    DatasetRecord,
    NounTarget,
    QAPair,
    Sentence,
    TargetEntry,
    TokenSpan,
    tokenize,
)
from .bootstrap import BootstrapCI, bootstrap_ci
from .validation import Violation, validate_record

__version__ = "0.1.0"

__all__ = [
    "QuestionForm",
    "TemplateId",
    "parse_question",
    "render_question",
    "MatchResult",
    "match_arguments",
    "token_iou",
    "SRAJudgment",
    "UAScores",
    "iaa",
    "sra_report",
    "ua_scores",
    "AnnotationRecord",
    "AnswerSpan",
    "DatasetRecord",
    "NounTarget",
    "QAPair",
    "Sentence",
    "TargetEntry",
    "TokenSpan",
    "tokenize",
    "BootstrapCI",
    "bootstrap_ci",
    "Violation",
    "validate_record",
]
