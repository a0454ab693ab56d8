import json

import pytest

from qanoun.corpus import read_corpus, write_corpus
from qanoun.errors import (
    AuthorizationError,
    ConfigurationError,
    NotReadyError,
    UsageError,
)
from qanoun.grammar import QuestionForm, TemplateId
from qanoun.model import AnswerSpan, tokenize
from qanoun.service import (
    ProjectStore,
    ReconciliationDecision,
    ReconciliationRejected,
    target_key,
)

from conftest import make_qa, make_record

TIME = QuestionForm(TemplateId.TIME)
POSSESSION = QuestionForm(TemplateId.POSSESSION)
LOCATION = QuestionForm(TemplateId.LOCATION)
PROPERTY = QuestionForm(TemplateId.PROPERTY, property_word="label", use_article=True)


@pytest.fixture
def store(tmp_path):
    return ProjectStore(tmp_path / "data")


@pytest.fixture
def project(store, album_sentence):
    store.create_project(
        "p1",
        [album_sentence],
        roster=("ann-a", "ann-b"),
        policy="paired",
        explicit_targets={album_sentence.id: [1]},
    )
    return "p1"


KEY = "s-album:1"


def submit(store, project, sentence, target, annotator, forms_and_spans):
    record = make_record(sentence, target, forms_and_spans, annotator=annotator)
    return store.submit_annotation(project, KEY, record)


def submit_pair(store, project, sentence, target):
    """Two records that disagree on role+extent for one pair plus coverage both ways."""
    assert submit(
        store, project, sentence, target, "ann-a",
        [(TIME, (5, 5)), (POSSESSION, (7, 9)), (LOCATION, (0, 1))],
    ) == []
    assert submit(
        store, project, sentence, target, "ann-b",
        [(TIME, (5, 5)), (PROPERTY, (7, 8)), (TIME, (3, 3))],
    ) == []


FULL_DECISIONS = [
    ReconciliationDecision("role:1:1", "keep_left"),
    ReconciliationDecision("extent:1:1", "keep_right"),
    ReconciliationDecision("coverage:l2", "keep_left"),
    ReconciliationDecision("coverage:r2", "drop"),
]


class TestCreate:
    def test_paired_needs_two_annotators(self, store, album_sentence):
        with pytest.raises(ConfigurationError):
            store.create_project("p", [album_sentence], roster=("solo",))

    def test_duplicate_project_rejected(self, store, album_sentence, project):
        with pytest.raises(UsageError):
            store.create_project("p1", [album_sentence], roster=("x", "y"))

    def test_paired_assignment(self, store, project):
        assert store.assignments_for(project, "ann-a") == [KEY]
        assert store.assignments_for(project, "ann-b") == [KEY]
        assert store.assignments_for(project, "stranger") == []

    def test_single_policy_round_robin(self, store, album_sentence):
        store.create_project(
            "solo",
            [album_sentence],
            roster=("a", "b"),
            policy="single",
            explicit_targets={album_sentence.id: [1, 5, 9]},
        )
        state = store.get_project("solo")
        assigned = [state.targets[target_key("s-album", i)].assigned for i in (1, 5, 9)]
        assert assigned == [("a",), ("b",), ("a",)]

    def test_tagger_fallback_detects_targets(self, store):
        sentence = tokenize("The committee met in Boston .", "s-b")
        store.create_project("auto", [sentence], roster=("a", "b"))
        state = store.get_project("auto")
        surfaces = {ts.target.surface for ts in state.targets.values()}
        assert "committee" in surfaces


class TestSubmit:
    def test_unassigned_annotator_rejected(self, store, project, album_sentence, album_target):
        with pytest.raises(AuthorizationError):
            submit(store, project, album_sentence, album_target, "stranger", [])

    def test_non_independent_phase_rejected(self, store, project, album_sentence, album_target):
        record = make_record(album_sentence, album_target, [], annotator="ann-a", phase="consolidated")
        with pytest.raises(UsageError):
            store.submit_annotation(project, KEY, record)

    def test_invalid_record_returns_violations_unpersisted(
        self, store, project, album_sentence, album_target
    ):
        violations = submit(
            store, project, album_sentence, album_target, "ann-a",
            [(TIME, (5, 5)), (POSSESSION, (5, 5))],  # duplicate answer span
        )
        assert [v.rule for v in violations] == ["duplicate-answer"]
        assert store.get_project(project).targets[KEY].status == "pending"

    def test_status_progression(self, store, project, album_sentence, album_target):
        targets = store.get_project(project).targets
        assert targets[KEY].status == "pending"
        submit(store, project, album_sentence, album_target, "ann-a", [(TIME, (5, 5))])
        assert targets[KEY].status == "in_progress"
        submit(store, project, album_sentence, album_target, "ann-b", [(TIME, (5, 5))])
        assert targets[KEY].status == "ready_to_reconcile"

    def test_resubmission_appends_version(self, store, project, album_sentence, album_target):
        submit(store, project, album_sentence, album_target, "ann-a", [(TIME, (5, 5))])
        submit(store, project, album_sentence, album_target, "ann-a", [(LOCATION, (7, 9))])
        ts = store.get_project(project).targets[KEY]
        assert len(ts.submissions["ann-a"]) == 2
        (current,) = ts.current_records()
        assert current.qas[0].form == LOCATION


class TestDisagreements:
    def test_not_ready_with_one_record(self, store, project, album_sentence, album_target):
        submit(store, project, album_sentence, album_target, "ann-a", [(TIME, (5, 5))])
        with pytest.raises(NotReadyError):
            store.disagreements(project, KEY)

    def test_kinds_and_ids(self, store, project, album_sentence, album_target):
        submit_pair(store, project, album_sentence, album_target)
        found = store.disagreements(project, KEY)
        assert sorted((d.id, d.kind) for d in found) == [
            ("coverage:l2", "coverage"),
            ("coverage:r2", "coverage"),
            ("extent:1:1", "extent"),
            ("role:1:1", "role"),
        ]
        role = next(d for d in found if d.kind == "role")
        assert role.left_qa.form == POSSESSION and role.right_qa.form == PROPERTY

    def test_identical_records_have_none(self, store, project, album_sentence, album_target):
        submit(store, project, album_sentence, album_target, "ann-a", [(TIME, (5, 5))])
        submit(store, project, album_sentence, album_target, "ann-b", [(TIME, (5, 5))])
        assert store.disagreements(project, KEY) == []


class TestReconcile:
    def test_actor_must_be_assigned(self, store, project, album_sentence, album_target):
        submit_pair(store, project, album_sentence, album_target)
        with pytest.raises(AuthorizationError):
            store.reconcile(project, KEY, FULL_DECISIONS, actor="stranger")

    def test_all_disagreements_must_be_decided(self, store, project, album_sentence, album_target):
        submit_pair(store, project, album_sentence, album_target)
        with pytest.raises(UsageError, match="unaddressed"):
            store.reconcile(project, KEY, FULL_DECISIONS[:2], actor="ann-a")

    def test_unknown_decision_rejected(self, store, project, album_sentence, album_target):
        submit_pair(store, project, album_sentence, album_target)
        bogus = FULL_DECISIONS + [ReconciliationDecision("role:9:9", "keep_left")]
        with pytest.raises(UsageError, match="unknown"):
            store.reconcile(project, KEY, bogus, actor="ann-a")

    def test_decisions_applied(self, store, project, album_sentence, album_target):
        submit_pair(store, project, album_sentence, album_target)
        consolidated = store.reconcile(project, KEY, FULL_DECISIONS, actor="ann-a")
        assert consolidated.phase == "consolidated"
        got = {(qa.form.template, qa.answer) for qa in consolidated.qas}
        assert got == {
            (TemplateId.TIME, AnswerSpan(5, 5)),
            (TemplateId.POSSESSION, AnswerSpan(7, 8)),  # left role, right extent
            (TemplateId.LOCATION, AnswerSpan(0, 1)),
        }
        assert store.get_project(project).targets[KEY].status == "done"

    def test_drop_on_one_dimension_drops_qa(self, store, project, album_sentence, album_target):
        submit_pair(store, project, album_sentence, album_target)
        decisions = [
            ReconciliationDecision("role:1:1", "keep_left"),
            ReconciliationDecision("extent:1:1", "drop"),
            ReconciliationDecision("coverage:l2", "drop"),
            ReconciliationDecision("coverage:r2", "drop"),
        ]
        consolidated = store.reconcile(project, KEY, decisions, actor="ann-b")
        assert [qa.form for qa in consolidated.qas] == [TIME]

    def test_coverage_wrong_side_rejected(self, store, project, album_sentence, album_target):
        submit_pair(store, project, album_sentence, album_target)
        decisions = list(FULL_DECISIONS)
        decisions[2] = ReconciliationDecision("coverage:l2", "keep_right")
        with pytest.raises(UsageError, match="keep_left"):
            store.reconcile(project, KEY, decisions, actor="ann-a")

    def test_standalone_add(self, store, project, album_sentence, album_target):
        submit_pair(store, project, album_sentence, album_target)
        extra = make_qa(album_sentence, album_target, QuestionForm(TemplateId.SUB_SPECIFICATION), 8, 8)
        decisions = FULL_DECISIONS + [ReconciliationDecision(None, "add", qa=extra)]
        consolidated = store.reconcile(project, KEY, decisions, actor="ann-a")
        assert any(qa.form.template == TemplateId.SUB_SPECIFICATION for qa in consolidated.qas)

    def test_invalid_result_rejected_with_violations(
        self, store, project, album_sentence, album_target
    ):
        submit_pair(store, project, album_sentence, album_target)
        duplicate = make_qa(album_sentence, album_target, POSSESSION, 5, 5)
        decisions = FULL_DECISIONS + [ReconciliationDecision(None, "add", qa=duplicate)]
        with pytest.raises(ReconciliationRejected) as err:
            store.reconcile(project, KEY, decisions, actor="ann-a")
        assert [v.rule for v in err.value.violations] == ["duplicate-answer"]
        assert store.get_project(project).targets[KEY].status == "ready_to_reconcile"

    def test_idempotent_for_fixed_decisions(self, store, project, album_sentence, album_target):
        submit_pair(store, project, album_sentence, album_target)
        first = store.reconcile(project, KEY, FULL_DECISIONS, actor="ann-a")
        second = store.reconcile(project, KEY, FULL_DECISIONS, actor="ann-a")
        assert first == second

    def test_dissent_note_and_co_sign_persisted(self, store, project, album_sentence, album_target):
        submit_pair(store, project, album_sentence, album_target)
        store.reconcile(
            project, KEY, FULL_DECISIONS, actor="ann-a", co_sign="ann-b",
            note="b still prefers the label reading",
        )
        meta = store.get_project(project).targets[KEY].consolidation_meta
        assert meta["co_sign"] == "ann-b"
        assert "label reading" in meta["note"]

    def test_target_iaa_after_consolidation(self, store, project, album_sentence, album_target):
        submit_pair(store, project, album_sentence, album_target)
        before = store.target_iaa(project, KEY)
        assert before < 1.0
        store.reconcile(project, KEY, FULL_DECISIONS, actor="ann-a")
        assert store.target_iaa(project, KEY) == 1.0


class TestDurability:
    def test_reload_replays_state(self, store, project, album_sentence, album_target):
        submit_pair(store, project, album_sentence, album_target)
        store.reconcile(project, KEY, FULL_DECISIONS, actor="ann-a")
        before = store.get_project(project).targets[KEY].consolidated
        store.reload()
        after = store.get_project(project).targets[KEY].consolidated
        assert after == before

    def test_fresh_store_sees_same_state(self, store, project, album_sentence, album_target):
        submit_pair(store, project, album_sentence, album_target)
        other = ProjectStore(store.data_dir)
        assert other.get_project(project).targets[KEY].status == "ready_to_reconcile"

    def test_torn_tail_truncated(self, store, project, album_sentence, album_target):
        submit(store, project, album_sentence, album_target, "ann-a", [(TIME, (5, 5))])
        log = store.data_dir / project / "events.jsonl"
        intact = log.read_bytes()
        with open(log, "ab") as fh:
            fh.write(b'{"type": "record_subm')  # simulated mid-write crash
        store.reload()
        ts = store.get_project(project).targets[KEY]
        assert ts.status == "in_progress"
        assert log.read_bytes() == intact
        # the log accepts appends again after recovery
        submit(store, project, album_sentence, album_target, "ann-b", [(TIME, (5, 5))])
        assert ts.status == "ready_to_reconcile" or store.get_project(project).targets[KEY].status == "ready_to_reconcile"

    def test_snapshot_written_and_used(self, store, album_sentence, album_target):
        store.create_project(
            "big",
            [album_sentence],
            roster=("ann-a", "ann-b"),
            explicit_targets={album_sentence.id: [1]},
        )
        record = make_record(album_sentence, album_target, [(TIME, (5, 5))], annotator="ann-a")
        for _ in range(120):
            store.submit_annotation("big", KEY, record)
        snapshot = store.data_dir / "big" / "snapshot.json"
        assert snapshot.exists()
        assert json.loads(snapshot.read_text())["event_count"] == 100
        store.reload()
        ts = store.get_project("big").targets[KEY]
        assert len(ts.submissions["ann-a"]) == 120

    def test_corrupt_snapshot_falls_back_to_replay(self, store, project, album_sentence, album_target):
        submit_pair(store, project, album_sentence, album_target)
        snapshot = store.data_dir / project / "snapshot.json"
        snapshot.write_text("{not json")
        store.reload()
        assert store.get_project(project).targets[KEY].status == "ready_to_reconcile"


class TestExport:
    def test_partial_requires_flag(self, store, project, album_sentence, album_target):
        submit_pair(store, project, album_sentence, album_target)
        with pytest.raises(NotReadyError):
            store.export(project)
        dataset, summary = store.export(project, allow_partial=True)
        assert summary["consolidated"] == 0
        assert "iaa_macro_f1" in summary

    def test_full_export_contents(self, store, project, album_sentence, album_target):
        submit_pair(store, project, album_sentence, album_target)
        store.reconcile(project, KEY, FULL_DECISIONS, actor="ann-a")
        dataset, summary = store.export(project)
        assert summary == {
            "targets": 1,
            "consolidated": 1,
            "iaa_macro_f1": summary["iaa_macro_f1"],
            "iaa_macro_precision": summary["iaa_macro_precision"],
            "iaa_macro_recall": summary["iaa_macro_recall"],
        }
        (record,) = dataset
        (entry,) = record.targets
        phases = [r.phase for r in entry.records]
        assert phases == ["independent", "independent", "consolidated"]
        assert entry.consolidated() is not None

    def test_export_file_round_trip_is_byte_stable(
        self, store, project, album_sentence, album_target, tmp_path
    ):
        submit_pair(store, project, album_sentence, album_target)
        store.reconcile(project, KEY, FULL_DECISIONS, actor="ann-a")
        dataset, _ = store.export(project)
        first = tmp_path / "export.jsonl"
        second = tmp_path / "export2.jsonl"
        write_corpus(dataset, first)
        write_corpus(read_corpus(first), second)
        assert first.read_bytes() == second.read_bytes()
