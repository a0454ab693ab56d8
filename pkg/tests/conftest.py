import pytest

from qanoun.gateway.prompts import Exemplar, ExemplarQA
from qanoun.grammar import QuestionForm, TemplateId, render_question
from qanoun.model import (
    AnnotationRecord,
    AnswerSpan,
    NounTarget,
    QAPair,
    Sentence,
    tokenize,
)


@pytest.fixture
def album_sentence() -> Sentence:
    return tokenize("The album was released in 1971 by the record label .", "s-album")


@pytest.fixture
def album_target(album_sentence) -> NounTarget:
    return NounTarget(
        sentence_id=album_sentence.id,
        token_index=1,
        surface=album_sentence.token_text(1),
    )


def make_qa(
    sentence: Sentence,
    target: NounTarget,
    form: QuestionForm,
    first: int,
    last: int,
) -> QAPair:
    return QAPair(
        target=target,
        form=form,
        answer=AnswerSpan(first, last),
        answer_text=sentence.span_text(first, last),
        question=render_question(form, target.surface),
    )


def make_record(sentence, target, forms_and_spans, annotator="a1", phase="independent"):
    qas = tuple(
        make_qa(sentence, target, form, first, last)
        for form, (first, last) in forms_and_spans
    )
    return AnnotationRecord(target=target, annotator_id=annotator, phase=phase, qas=qas)


def demo_exemplars() -> tuple[Exemplar, ...]:
    """Two worked examples per template, one QA each."""
    seeds = {
        TemplateId.PROPERTY: [
            ("What is the [year] of the album?", "1971",
             "The <f>album</f> was released in 1971."),
            ("What is the [size] of the camp?", "30-acre",
             "Valley Ranch is the team's 30-acre practice <f>camp</f>."),
        ],
        TemplateId.POSSESSION: [
            ("Whose articles?", "She",
             "She has written <f>articles</f> for various journals."),
            ("Whose aunt?", "his wife's",
             "He visited his wife's late <f>aunt</f>."),
        ],
        TemplateId.LOCATION: [
            ("Where is the bridge?", "Paris", "They crossed the Paris <f>bridge</f>."),
            ("Where is the movement?", "Nova Scotia",
             "He shaped the labor <f>movement</f> in Nova Scotia."),
        ],
        TemplateId.QUANTITY: [
            ("How many teams?", "several", "Nieves played for several MLB <f>teams</f>."),
            ("How much land?", "30-acre", "The ranch covers 30-acre of <f>land</f>."),
        ],
        TemplateId.PART_MEMBER_OF: [
            ("What is the officer a member of?", "army", "He was an army <f>officer</f>."),
            ("What is the chapter a part of?", "the book",
             "The <f>chapter</f> opens the book."),
        ],
        TemplateId.HAS_PART_MEMBER: [
            ("Who is a member of committee?", "She", "She chairs the <f>committee</f>."),
            ("What is a part of album?", "ten songs",
             "The <f>album</f> contains ten songs."),
        ],
        TemplateId.COPULAR: [
            ("What is the camp?", "Valley Ranch",
             "Valley Ranch is the team's practice <f>camp</f>."),
            ("Who is the chair?", "She", "She served as <f>chair</f> of the department."),
        ],
        TemplateId.SUB_SPECIFICATION: [
            ("What kind of catalogs?", "exhibition",
             "She edited exhibition <f>catalogs</f>."),
            ("What kind of circuit?", "professional",
             "He won on the professional <f>circuit</f>."),
        ],
        TemplateId.TIME: [
            ("When is the album?", "1971", "The <f>album</f> was released in 1971."),
            ("When is the position?", "2012 to 2019",
             "She held the <f>position</f> from 2012 to 2019."),
        ],
    }
    exemplars = []
    for template in TemplateId:
        for question, answer, marked in seeds[template]:
            exemplars.append(
                Exemplar(
                    marked_sentence=marked,
                    qas=(ExemplarQA(int(template), question, answer),),
                )
            )
    return tuple(exemplars)
