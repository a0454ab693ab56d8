"""Unlabeled-argument scores, inter-annotator agreement, SRA bookkeeping.

Zero-denominator convention (documented so scores are comparable):
both sides empty -> P = R = F1 = 1; empty predictions against nonempty
gold -> P = 1, R = 0; nonempty predictions against empty gold -> P = 0,
R = 1.  Equivalently: an empty denominator counts as a perfect ratio.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Literal, Sequence

from .errors import UsageError
from .matching import MatchResult, match_arguments
from .model import AnnotationRecord

Mode = Literal["micro", "macro"]


@dataclass(frozen=True)
class UAScores:
    precision: Fraction
    recall: Fraction
    f1: Fraction

    def as_floats(self) -> tuple[float, float, float]:
        return (float(self.precision), float(self.recall), float(self.f1))


def scores_from_counts(tp: int, fp: int, fn: int) -> UAScores:
    precision = Fraction(1) if tp + fp == 0 else Fraction(tp, tp + fp)
    recall = Fraction(1) if tp + fn == 0 else Fraction(tp, tp + fn)
    if precision + recall == 0:
        f1 = Fraction(0)
    else:
        f1 = 2 * precision * recall / (precision + recall)
    return UAScores(precision, recall, f1)


def ua_scores(results: Sequence[MatchResult], mode: Mode = "micro") -> UAScores:
    """Pool counts (micro) or average per-target scores arithmetically (macro)."""
    if not results:
        raise UsageError("ua_scores requires at least one match result")
    if mode == "micro":
        tp = sum(r.tp for r in results)
        fp = sum(r.fp for r in results)
        fn = sum(r.fn for r in results)
        return scores_from_counts(tp, fp, fn)
    if mode == "macro":
        per_target = [scores_from_counts(r.tp, r.fp, r.fn) for r in results]
        n = len(per_target)
        return UAScores(
            precision=sum((s.precision for s in per_target), Fraction(0)) / n,
            recall=sum((s.recall for s in per_target), Fraction(0)) / n,
            f1=sum((s.f1 for s in per_target), Fraction(0)) / n,
        )
    raise UsageError(f"unknown mode {mode!r}")


def iaa(record_pairs: Sequence[tuple[AnnotationRecord, AnnotationRecord]]) -> UAScores:
    """Macro-averaged UA F1 between paired records over the same targets.

    Each pair is scored with one record as predicted and the other as gold;
    F1 is symmetric under the swap, so the labeling is arbitrary.
    """
    if not record_pairs:
        raise UsageError("iaa requires at least one record pair")
    results = []
    for left, right in record_pairs:
        if left.target != right.target:
            raise UsageError(
                f"record pair targets differ: {left.target} vs {right.target}"
            )
        results.append(match_arguments(left.answer_spans(), right.answer_spans()))
    return ua_scores(results, mode="macro")


@dataclass(frozen=True)
class SRAJudgment:
    """One expert's sound/unsound verdict on a matched QA's role assignment."""

    qa_id: str
    judge_id: str
    sound: bool


@dataclass(frozen=True)
class SRAReport:
    per_judge: dict[str, Fraction]
    average: Fraction


def sra_report(
    judgments: Iterable[SRAJudgment], matched_qa_ids: set[str]
) -> SRAReport:
    """Per-judge sound-role proportion and the judges' arithmetic mean.

    Judgments may only reference QAs whose argument matched gold; anything
    else is rejected rather than silently skewing the proportions.
    """
    counts: dict[str, list[int]] = {}
    for j in judgments:
        if j.qa_id not in matched_qa_ids:
            raise UsageError(f"judgment on unmatched QA {j.qa_id!r} by {j.judge_id!r}")
        sound, total = counts.setdefault(j.judge_id, [0, 0])
        counts[j.judge_id] = [sound + int(j.sound), total + 1]
    if not counts:
        raise UsageError("sra_report requires at least one judgment")
    per_judge = {
        judge: Fraction(sound, total) for judge, (sound, total) in sorted(counts.items())
    }
    average = sum(per_judge.values(), Fraction(0)) / len(per_judge)
    return SRAReport(per_judge=per_judge, average=average)


def format_scores(scores: UAScores, mode: Mode, per_target=None) -> dict:
    """Score report object; exact rationals rendered to 4 decimal places."""
    out = {
        "mode": mode,
        "precision": f"{float(scores.precision):.4f}",
        "recall": f"{float(scores.recall):.4f}",
        "f1": f"{float(scores.f1):.4f}",
    }
    if per_target is not None:
        out["per_target"] = [
            {
                "precision": f"{float(s.precision):.4f}",
                "recall": f"{float(s.recall):.4f}",
                "f1": f"{float(s.f1):.4f}",
            }
            for s in per_target
        ]
    return out
