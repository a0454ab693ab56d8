"""Span alignment: token IoU and exact maximum-weight bipartite matching.

All arithmetic is exact (fractions.Fraction) so scores like 1/3 survive
to the report stage without floating-point drift.  Only pairs with
IoU strictly greater than 1/2 are eligible edges.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import UsageError
from .model import AnswerSpan

IOU_THRESHOLD = Fraction(1, 2)

Range = tuple[int, int]


def _as_range(span: "AnswerSpan | Range") -> Range:
    if isinstance(span, AnswerSpan):
        return (span.first_token, span.last_token)
    first, last = span
    if first < 0 or last < first:
        raise UsageError(f"invalid token range [{first}, {last}]")
    return (int(first), int(last))


def token_iou(
    a: "AnswerSpan | Range",
    b: "AnswerSpan | Range",
    sentence_a: str | None = None,
    sentence_b: str | None = None,
) -> Fraction:
    """Intersection over union of two inclusive token ranges."""
    if sentence_a is not None and sentence_b is not None and sentence_a != sentence_b:
        raise UsageError(
            f"token_iou over different sentences: {sentence_a!r} vs {sentence_b!r}"
        )
    a0, a1 = _as_range(a)
    b0, b1 = _as_range(b)
    inter = min(a1, b1) - max(a0, b0) + 1
    if inter <= 0:
        return Fraction(0)
    union = (a1 - a0 + 1) + (b1 - b0 + 1) - inter
    return Fraction(inter, union)


@dataclass(frozen=True)
class MatchResult:
    """One-to-one alignment between predicted and gold spans."""

    pairs: tuple[tuple[int, int, Fraction], ...]
    tp: int
    fp: int
    fn: int

    @property
    def total_weight(self) -> Fraction:
        return sum((w for _, _, w in self.pairs), Fraction(0))


def match_arguments(
    predicted: Sequence["AnswerSpan | Range"],
    gold: Sequence["AnswerSpan | Range"],
) -> MatchResult:
    """Maximum-total-weight matching over IoU > 1/2 edges.

    Deterministic under ties: among equal-weight optima the lexicographically
    smallest pair list (ordered by predicted index, then gold index) is
    returned, so true-positive sets are reproducible.
    """
    pred = [_as_range(s) for s in predicted]
    gld = [_as_range(s) for s in gold]
    # Compact the gold side to edge-bearing spans so the DP bitmask stays small.
    gold_ids: dict[int, int] = {}
    edges: list[list[tuple[int, Fraction]]] = []
    for p in pred:
        row = []
        for j, g in enumerate(gld):
            w = token_iou(p, g)
            if w > IOU_THRESHOLD:
                if j not in gold_ids:
                    gold_ids[j] = len(gold_ids)
                row.append((gold_ids[j], w))
        edges.append(row)
    gold_back = {v: k for k, v in gold_ids.items()}

    n_gold = len(gld)
    # Exact DP over (predicted index, used-gold bitmask): optimal total weight
    # of matching predicted[i:] against the unused gold spans.
    from functools import lru_cache

    @lru_cache(maxsize=None)
    def best(i: int, mask: int) -> Fraction:
        if i == len(pred):
            return Fraction(0)
        value = best(i + 1, mask)
        for j, w in edges[i]:
            if not mask & (1 << j):
                value = max(value, w + best(i + 1, mask | (1 << j)))
        return value

    # Greedy reconstruction: at each predicted index prefer matching the
    # smallest eligible gold index that preserves optimality; this yields the
    # lexicographically smallest optimal pair list.
    pairs: list[tuple[int, int, Fraction]] = []
    mask = 0
    for i in range(len(pred)):
        target = best(i, mask)
        chosen = None
        for j, w in sorted(edges[i], key=lambda jw: gold_back[jw[0]]):
            if not mask & (1 << j) and w + best(i + 1, mask | (1 << j)) == target:
                chosen = (j, w)
                break
        if chosen is not None:
            j, w = chosen
            pairs.append((i, gold_back[j], w))
            mask |= 1 << j
    best.cache_clear()

    tp = len(pairs)
    return MatchResult(
        pairs=tuple(pairs), tp=tp, fp=len(pred) - tp, fn=n_gold - tp
    )
