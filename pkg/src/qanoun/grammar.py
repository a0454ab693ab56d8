"""The nine-template question grammar: render and parse.

Each template is a fixed pattern over the target noun, with a small set of
slot choices (wh word, part/member, much/many, optional article) and one
open-vocabulary slot for the Property template.  Rendering and parsing are
exact inverses over valid forms.
"""

from __future__ import annotations

import difflib
import re
from dataclasses import dataclass
from enum import IntEnum
from typing import Literal

from .errors import FormError, UnparseableQuestionError


class TemplateId(IntEnum):
    """Template numbering matches the question id used in model prompts."""

    PROPERTY = 1
    POSSESSION = 2
    LOCATION = 3
    QUANTITY = 4
    PART_MEMBER_OF = 5
    HAS_PART_MEMBER = 6
    COPULAR = 7
    SUB_SPECIFICATION = 8
    TIME = 9


WhChoice = Literal["what", "who"]
PartMemberChoice = Literal["part", "member"]
AmountChoice = Literal["much", "many"]

# Templates whose pattern contains an optional "(the)" article slot.
ARTICLE_TEMPLATES = frozenset({TemplateId.PROPERTY, TemplateId.COPULAR})
WH_TEMPLATES = frozenset({TemplateId.HAS_PART_MEMBER, TemplateId.COPULAR})
PART_MEMBER_TEMPLATES = frozenset({TemplateId.PART_MEMBER_OF, TemplateId.HAS_PART_MEMBER})


@dataclass(frozen=True)
class QuestionForm:
    """A template identity plus its slot fillers."""

    template: TemplateId
    property_word: str | None = None
    wh_choice: WhChoice | None = None
    part_member_choice: PartMemberChoice | None = None
    amount_choice: AmountChoice | None = None
    use_article: bool = False

    def validate(self) -> None:
        """Raise FormError unless every slot matches the template's pattern."""
        t = self.template
        problems = []
        if (self.property_word is not None) != (t == TemplateId.PROPERTY):
            problems.append("property_word present iff template is Property")
        if self.property_word is not None and not self.property_word.strip():
            problems.append("property_word must be nonempty")
        if (self.wh_choice is not None) != (t in WH_TEMPLATES):
            problems.append("wh_choice present iff template has a What/Who slot")
        if (self.part_member_choice is not None) != (t in PART_MEMBER_TEMPLATES):
            problems.append("part_member_choice present iff template has a part/member slot")
        if (self.amount_choice is not None) != (t == TemplateId.QUANTITY):
            problems.append("amount_choice present iff template is Quantity")
        if self.use_article and t not in ARTICLE_TEMPLATES:
            problems.append("use_article only meaningful for Property and Copular")
        if problems:
            raise FormError(f"invalid form for template {t.name}: " + "; ".join(problems))


def _article(form: QuestionForm) -> str:
    return "the " if form.use_article else ""


def render_question(form: QuestionForm, noun_surface: str) -> str:
    """Render the question string for a valid form over the given noun."""
    form.validate()
    t = form.template
    if t == TemplateId.PROPERTY:
        q = f"what is the [{form.property_word.strip()}] of {_article(form)}{noun_surface}?"
    elif t == TemplateId.POSSESSION:
        q = f"whose {noun_surface}?"
    elif t == TemplateId.LOCATION:
        q = f"where is the {noun_surface}?"
    elif t == TemplateId.QUANTITY:
        q = f"how {form.amount_choice} {noun_surface}?"
    elif t == TemplateId.PART_MEMBER_OF:
        q = f"what is the {noun_surface} a {form.part_member_choice} of?"
    elif t == TemplateId.HAS_PART_MEMBER:
        q = f"{form.wh_choice} is a {form.part_member_choice} of {noun_surface}?"
    elif t == TemplateId.COPULAR:
        q = f"{form.wh_choice} is {_article(form)}{noun_surface}?"
    elif t == TemplateId.SUB_SPECIFICATION:
        q = f"what kind of {noun_surface}?"
    else:  # TIME
        q = f"when is the {noun_surface}?"
    return q[0].upper() + q[1:]


def _patterns(noun: str) -> list[tuple[TemplateId, re.Pattern]]:
    """Anchored regexes per template; the Property slot accepts [x] or <x>."""
    n = re.escape(noun)
    return [
        (
            TemplateId.PROPERTY,
            re.compile(rf"what is the (?:\[(?P<prop>[^\]]+)\]|<(?P<prop2>[^>]+)>) of (?P<art>the )?{n}\?"),
        ),
        (TemplateId.POSSESSION, re.compile(rf"whose {n}\?")),
        (TemplateId.LOCATION, re.compile(rf"where is the {n}\?")),
        (TemplateId.QUANTITY, re.compile(rf"how (?P<amount>much|many) {n}\?")),
        (TemplateId.PART_MEMBER_OF, re.compile(rf"what is the {n} a (?P<pm>part|member) of\?")),
        (
            TemplateId.HAS_PART_MEMBER,
            re.compile(rf"(?P<wh>what|who) is a (?P<pm>part|member) of {n}\?"),
        ),
        (TemplateId.COPULAR, re.compile(rf"(?P<wh>what|who) is (?P<art>the )?{n}\?")),
        (TemplateId.SUB_SPECIFICATION, re.compile(rf"what kind of {n}\?")),
        (TemplateId.TIME, re.compile(rf"when is the {n}\?")),
    ]


def _normalize(question: str) -> str:
    """Collapse internal space runs; lowercase only the first letter."""
    q = re.sub(r"\s+", " ", question.strip())
    if not q:
        return q
    return q[0].lower() + q[1:]


def parse_question(question: str, noun_surface: str) -> QuestionForm:
    """Inverse of render_question, up to capitalization and space normalization."""
    q = _normalize(question)
    for template, pattern in _patterns(noun_surface):
        m = pattern.fullmatch(q)
        if m is None:
            continue
        groups = m.groupdict()
        prop = groups.get("prop") or groups.get("prop2")
        form = QuestionForm(
            template=template,
            property_word=prop.strip() if prop else None,
            wh_choice=groups.get("wh"),
            part_member_choice=groups.get("pm"),
            amount_choice=groups.get("amount"),
            use_article=bool(groups.get("art")),
        )
        form.validate()
        return form
    raise UnparseableQuestionError(question, nearest_template=_nearest(q, noun_surface))


def _nearest(question: str, noun_surface: str) -> str | None:
    """Closest template by string similarity, for parse diagnostics."""
    candidates: dict[str, TemplateId] = {}
    for template in TemplateId:
        form = example_form(template)
        candidates[_normalize(render_question(form, noun_surface))] = template
    close = difflib.get_close_matches(question, candidates, n=1, cutoff=0.0)
    return candidates[close[0]].name if close else None


def example_form(template: TemplateId) -> QuestionForm:
    """A representative valid form for each template (default slot choices)."""
    return QuestionForm(
        template=template,
        property_word="property" if template == TemplateId.PROPERTY else None,
        wh_choice="what" if template in WH_TEMPLATES else None,
        part_member_choice="part" if template in PART_MEMBER_TEMPLATES else None,
        amount_choice="many" if template == TemplateId.QUANTITY else None,
        use_article=template in ARTICLE_TEMPLATES,
    )


def all_forms(property_words: tuple[str, ...] = ("property",)) -> list[QuestionForm]:
    """Every valid form over the full slot grid, with the given Property words."""
    forms: list[QuestionForm] = []
    for word in property_words:
        for article in (False, True):
            forms.append(QuestionForm(TemplateId.PROPERTY, property_word=word, use_article=article))
    forms.append(QuestionForm(TemplateId.POSSESSION))
    forms.append(QuestionForm(TemplateId.LOCATION))
    for amount in ("much", "many"):
        forms.append(QuestionForm(TemplateId.QUANTITY, amount_choice=amount))
    for pm in ("part", "member"):
        forms.append(QuestionForm(TemplateId.PART_MEMBER_OF, part_member_choice=pm))
    for wh in ("what", "who"):
        for pm in ("part", "member"):
            forms.append(QuestionForm(TemplateId.HAS_PART_MEMBER, wh_choice=wh, part_member_choice=pm))
    for wh in ("what", "who"):
        for article in (False, True):
            forms.append(QuestionForm(TemplateId.COPULAR, wh_choice=wh, use_article=article))
    forms.append(QuestionForm(TemplateId.SUB_SPECIFICATION))
    forms.append(QuestionForm(TemplateId.TIME))
    return forms
