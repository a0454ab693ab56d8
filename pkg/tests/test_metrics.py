from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qanoun.errors import UsageError
from qanoun.grammar import QuestionForm, TemplateId
from qanoun.matching import MatchResult, match_arguments
from qanoun.metrics import (
    SRAJudgment,
    format_scores,
    iaa,
    scores_from_counts,
    sra_report,
    ua_scores,
)

from conftest import make_record

span_lists = st.lists(
    st.tuples(st.integers(0, 12), st.integers(0, 4)).map(lambda t: (t[0], t[0] + t[1])),
    max_size=5,
)


def mk(tp, fp, fn):
    return MatchResult(pairs=tuple((i, i, Fraction(1)) for i in range(tp)), tp=tp, fp=fp, fn=fn)


class TestUAScores:
    def test_worked_fixture(self):
        s = ua_scores([mk(1, 1, 2)], mode="micro")
        assert s.precision == Fraction(1, 2)
        assert s.recall == Fraction(1, 3)
        assert s.f1 == Fraction(2, 5)

    def test_macro_averages_f1(self):
        s = ua_scores([mk(1, 0, 0), mk(1, 1, 2)], mode="macro")
        assert s.f1 == (Fraction(1) + Fraction(2, 5)) / 2  # 0.7

    def test_both_empty_convention(self):
        s = scores_from_counts(0, 0, 0)
        assert (s.precision, s.recall, s.f1) == (1, 1, 1)

    def test_empty_predictions_convention(self):
        s = scores_from_counts(0, 0, 3)
        assert (s.precision, s.recall, s.f1) == (1, 0, 0)

    def test_empty_gold_convention(self):
        s = scores_from_counts(0, 2, 0)
        assert (s.precision, s.recall, s.f1) == (0, 1, 0)

    def test_empty_list_rejected(self):
        with pytest.raises(UsageError):
            ua_scores([], mode="micro")

    @given(span_lists, span_lists)
    @settings(max_examples=100, deadline=None)
    def test_f1_symmetry(self, predicted, gold):
        forward = scores_from_counts(*_counts(predicted, gold))
        backward = scores_from_counts(*_counts(gold, predicted))
        assert forward.precision == backward.recall
        assert forward.recall == backward.precision
        assert forward.f1 == backward.f1

    @given(span_lists, span_lists)
    @settings(max_examples=100, deadline=None)
    def test_unmatchable_extra_prediction(self, predicted, gold):
        """A predicted span with no qualifying edge cannot help precision or hurt recall."""
        base = scores_from_counts(*_counts(predicted, gold))
        extra = predicted + [(100, 101)]  # far away from every gold span
        grown = scores_from_counts(*_counts(extra, gold))
        assert grown.recall == base.recall
        assert grown.precision <= base.precision


def _counts(predicted, gold):
    m = match_arguments(predicted, gold)
    return m.tp, m.fp, m.fn


class TestIAA:
    def test_identical_records(self, album_sentence, album_target):
        record = make_record(
            album_sentence,
            album_target,
            [(QuestionForm(TemplateId.TIME), (5, 5))],
            phase="consolidated",
        )
        other = make_record(
            album_sentence,
            album_target,
            [(QuestionForm(TemplateId.TIME), (5, 5))],
            annotator="a2",
            phase="consolidated",
        )
        assert iaa([(record, other)]).f1 == 1

    def test_one_shared_one_unshared(self, album_sentence, album_target):
        left = make_record(
            album_sentence,
            album_target,
            [(QuestionForm(TemplateId.TIME), (5, 5)), (QuestionForm(TemplateId.POSSESSION), (0, 1))],
        )
        right = make_record(
            album_sentence,
            album_target,
            [(QuestionForm(TemplateId.TIME), (5, 5)), (QuestionForm(TemplateId.LOCATION), (7, 9))],
            annotator="a2",
        )
        assert iaa([(left, right)]).f1 == Fraction(1, 2)

    def test_symmetric_under_swap(self, album_sentence, album_target):
        left = make_record(album_sentence, album_target, [(QuestionForm(TemplateId.TIME), (5, 5))])
        right = make_record(
            album_sentence, album_target, [(QuestionForm(TemplateId.POSSESSION), (7, 8))],
            annotator="a2",
        )
        assert iaa([(left, right)]).f1 == iaa([(right, left)]).f1

    def test_mismatched_targets_rejected(self, album_sentence, album_target):
        from qanoun.model import NounTarget

        other_target = NounTarget(album_sentence.id, 5, album_sentence.token_text(5))
        left = make_record(album_sentence, album_target, [])
        right = make_record(album_sentence, other_target, [], annotator="a2")
        with pytest.raises(UsageError):
            iaa([(left, right)])


class TestSRA:
    def test_average_of_judges(self):
        judgments = [
            SRAJudgment(f"qa{i}", "j1", i < 6) for i in range(10)
        ] + [SRAJudgment(f"qa{i}", "j2", i < 5) for i in range(10)]
        report = sra_report(judgments, {f"qa{i}" for i in range(10)})
        assert report.per_judge["j1"] == Fraction(6, 10)
        assert report.per_judge["j2"] == Fraction(5, 10)
        assert report.average == Fraction(11, 20)  # 0.55

    def test_all_sound(self):
        report = sra_report([SRAJudgment("q", "j1", True)], {"q"})
        assert report.average == 1

    def test_unmatched_rejected(self):
        with pytest.raises(UsageError):
            sra_report([SRAJudgment("ghost", "j1", True)], {"q"})


class TestReport:
    def test_four_decimal_rendering(self):
        scores = scores_from_counts(1, 1, 2)
        out = format_scores(scores, "micro")
        assert out == {
            "mode": "micro",
            "precision": "0.5000",
            "recall": "0.3333",
            "f1": "0.4000",
        }
