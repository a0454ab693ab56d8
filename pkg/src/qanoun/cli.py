"""Command-line entry point: validate, stats, eval, iaa, parse, decompose, serve.

Exit codes: 0 success, 1 data/validation failure, 2 usage error,
3 transport failure.  All randomness flows from an explicit --seed;
endpoint secrets come only from environment variables.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import corpus as corpus_io
from .bootstrap import DEFAULT_REPLICATES
from .decomp import (
    ChatUnitJudge,
    PromptNounParser,
    PromptVerbUnitAdapter,
    decomp_report,
    run_pipeline,
)
from .errors import IngestionError, QANounError, TransportError, UsageError
from .gateway import (
    Exemplar,
    ExemplarQA,
    HttpChatClient,
    InferenceEndpoint,
    build_prompt,
    parse_output,
)
from .grammar import TemplateId
from .matching import match_arguments
from .metrics import format_scores, iaa, scores_from_counts, ua_scores
from .model import AnnotationRecord, NounTarget
from .validation import validate_record
from . import reference

EXIT_DATA = 1
EXIT_TRANSPORT = 3


@click.group()
def main():
    """Noun-centered QA annotation, evaluation, and decomposition toolkit."""


def _read_corpus(path: str):
    try:
        return corpus_io.read_corpus(path)
    except IngestionError as exc:
        click.echo(f"ingestion error: {exc}", err=True)
        sys.exit(EXIT_DATA)


@main.command()
@click.option("--in", "path", required=True, type=click.Path(exists=True))
def validate(path):
    """Validate every record in a corpus file; nonzero exit iff violations."""
    records = _read_corpus(path)
    total = 0
    for rec in records:
        for entry in rec.targets:
            for record in entry.records:
                for v in validate_record(record, rec.sentence):
                    total += 1
                    click.echo(
                        f"{rec.sentence.id}:{entry.token_index}"
                        f" [{record.annotator_id}/{record.phase}] {v}"
                    )
    if total:
        click.echo(f"{total} violation(s)", err=True)
        sys.exit(EXIT_DATA)
    click.echo("ok")


@main.command()
@click.option("--in", "path", required=True, type=click.Path(exists=True))
@click.option("--check-reference", is_flag=True, help="Compare against published dataset figures.")
@click.option("--json", "json_out", type=click.Path(), default=None)
def stats(path, check_reference, json_out):
    """Template histogram plus sentence/predicate/argument totals."""
    records = _read_corpus(path)
    s = corpus_io.dataset_stats(records)
    click.echo(f"sentences   {s.sentences}")
    click.echo(f"predicates  {s.predicates}")
    click.echo(f"arguments   {s.arguments}")
    click.echo("template counts:")
    for t in TemplateId:
        click.echo(f"  {t.value}  {t.name:<18} {s.template_counts.get(t, 0)}")
    if check_reference:
        mismatches = []
        for name, got, want in [
            ("sentences", s.sentences, reference.REPORTED_SENTENCES),
            ("predicates", s.predicates, reference.REPORTED_PREDICATES),
            ("arguments", s.arguments, reference.REPORTED_ARGUMENTS),
        ]:
            if got != want:
                mismatches.append(f"{name}: corpus {got} vs reported {want}")
        for t in TemplateId:
            got = s.template_counts.get(t, 0)
            want = reference.REPORTED_TEMPLATE_COUNTS[t]
            if got != want:
                mismatches.append(f"{t.name}: corpus {got} vs reported {want}")
        click.echo(
            "note: the published per-template counts sum to "
            f"{reference.REPORTED_TEMPLATE_SUM}, while the published argument "
            f"total is {reference.REPORTED_ARGUMENTS}; the discrepancy of "
            f"{reference.KNOWN_ARGUMENT_COUNT_DISCREPANCY} is reported raw, "
            "not reconciled."
        )
        for m in mismatches:
            click.echo(f"reference mismatch: {m}")
    if json_out:
        Path(json_out).write_text(
            json.dumps(
                {
                    "sentences": s.sentences,
                    "predicates": s.predicates,
                    "arguments": s.arguments,
                    "templates": {t.name: s.template_counts.get(t, 0) for t in TemplateId},
                    "splits": dict(s.split_counts),
                },
                indent=2,
            )
        )


def _targets_by_key(records):
    out = {}
    for rec in records:
        for entry in rec.targets:
            record = entry.primary_record()
            if record is not None:
                out[(rec.sentence.id, entry.token_index)] = record
    return out


@main.command("eval")
@click.option("--pred", required=True, type=click.Path(exists=True))
@click.option("--gold", required=True, type=click.Path(exists=True))
@click.option("--mode", type=click.Choice(["micro", "macro"]), default="micro")
@click.option("--json", "json_out", type=click.Path(), default=None)
def eval_cmd(pred, gold, mode, json_out):
    """Score a predicted corpus against a gold corpus (unlabeled arguments)."""
    pred_records = _targets_by_key(_read_corpus(pred))
    gold_records = _targets_by_key(_read_corpus(gold))
    results = []
    for key, gold_record in sorted(gold_records.items()):
        predicted = pred_records.get(key)
        pred_spans = predicted.answer_spans() if predicted else []
        results.append(match_arguments(pred_spans, gold_record.answer_spans()))
    if not results:
        click.echo("gold corpus has no annotated targets", err=True)
        sys.exit(EXIT_DATA)
    scores = ua_scores(results, mode=mode)
    p, r, f1 = scores.as_floats()
    click.echo(f"mode={mode}")
    click.echo(f"P={p:.4f} R={r:.4f} F1={f1:.4f}")
    if json_out:
        per_target = (
            [scores_from_counts(m.tp, m.fp, m.fn) for m in results]
            if mode == "macro"
            else None
        )
        Path(json_out).write_text(json.dumps(format_scores(scores, mode, per_target), indent=2))


@main.command("iaa")
@click.option("--in", "path", required=True, type=click.Path(exists=True))
@click.option("--json", "json_out", type=click.Path(), default=None)
def iaa_cmd(path, json_out):
    """Macro agreement over targets carrying two comparable records."""
    records = _read_corpus(path)
    pairs = []
    for rec in records:
        for entry in rec.targets:
            consolidated = [r for r in entry.records if r.phase == "consolidated"]
            independent = [r for r in entry.records if r.phase == "independent"]
            if len(consolidated) >= 2:
                pairs.append((consolidated[0], consolidated[1]))
            elif len(independent) >= 2:
                pairs.append((independent[0], independent[1]))
    if not pairs:
        click.echo("no target has a pair of comparable records", err=True)
        sys.exit(EXIT_DATA)
    scores = iaa(pairs)
    p, r, f1 = scores.as_floats()
    click.echo(f"pairs={len(pairs)}")
    click.echo(f"P={p:.4f} R={r:.4f} F1={f1:.4f}")
    if json_out:
        Path(json_out).write_text(json.dumps(format_scores(scores, "macro"), indent=2))


def _load_exemplars(path: str) -> tuple[Exemplar, ...]:
    exemplars = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            obj = json.loads(line)
            exemplars.append(
                Exemplar(
                    marked_sentence=obj["sentence"],
                    qas=tuple(
                        ExemplarQA(q["template"], q["question"], q["answer"])
                        for q in obj["qas"]
                    ),
                )
            )
    return tuple(exemplars)


@main.command("parse")
@click.option("--in", "path", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
@click.option("--endpoint-url", required=True)
@click.option("--model", required=True)
@click.option("--exemplars", "exemplars_path", required=True, type=click.Path(exists=True))
@click.option("--replay-log", type=click.Path(), default=None)
def parse_cmd(path, out, endpoint_url, model, exemplars_path, replay_log):
    """Run the QA parser over every target in a corpus; write predictions."""
    records = _read_corpus(path)
    exemplars = _load_exemplars(exemplars_path)
    endpoint = InferenceEndpoint(base_url=endpoint_url, model_name=model)
    client = HttpChatClient(endpoint, replay_log=replay_log)
    out_records = []
    try:
        for rec in records:
            entries = []
            for entry in rec.targets:
                target = NounTarget(
                    sentence_id=rec.sentence.id,
                    token_index=entry.token_index,
                    surface=rec.sentence.token_text(entry.token_index),
                )
                raw = client.complete(build_prompt(rec.sentence, target, exemplars))
                outcome = parse_output(raw, rec.sentence, target)
                predicted = AnnotationRecord(
                    target=target,
                    annotator_id=model,
                    phase="independent",
                    qas=outcome.qas,
                )
                entries.append(
                    corpus_io.TargetEntry(
                        token_index=entry.token_index, records=(predicted,)
                    )
                )
            out_records.append(
                corpus_io.DatasetRecord(
                    sentence=rec.sentence, split=rec.split, targets=tuple(entries)
                )
            )
    except TransportError as exc:
        click.echo(f"transport error: {exc}", err=True)
        sys.exit(EXIT_TRANSPORT)
    corpus_io.write_corpus(out_records, out)
    click.echo(f"wrote {len(out_records)} sentences to {out}")


@main.command("decompose")
@click.option("--in", "path", required=True, type=click.Path(exists=True))
@click.option("--noun-endpoint", required=True)
@click.option("--noun-model", default="noun-parser")
@click.option("--verb-endpoint", required=True)
@click.option("--verb-model", default="verb-parser")
@click.option("--judge-endpoint", required=True)
@click.option("--judge-model", default="judge")
@click.option("--exemplars", "exemplars_path", required=True, type=click.Path(exists=True))
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--replicates", type=int, default=DEFAULT_REPLICATES, show_default=True)
@click.option("--within-source", is_flag=True, help="Also judge same-source unit pairs.")
@click.option("--report", "report_path", required=True, type=click.Path())
def decompose_cmd(
    path,
    noun_endpoint,
    noun_model,
    verb_endpoint,
    verb_model,
    judge_endpoint,
    judge_model,
    exemplars_path,
    seed,
    replicates,
    within_source,
    report_path,
):
    """Full decomposition pipeline with an atomicity report."""
    records = _read_corpus(path)
    sentences = [rec.sentence for rec in records]
    exemplars = _load_exemplars(exemplars_path)
    noun_client = HttpChatClient(InferenceEndpoint(noun_endpoint, noun_model))
    verb_client = HttpChatClient(InferenceEndpoint(verb_endpoint, verb_model))
    judge_client = HttpChatClient(InferenceEndpoint(judge_endpoint, judge_model))
    judge = ChatUnitJudge(judge_client, judge_model)
    try:
        results = run_pipeline(
            sentences,
            noun_source=PromptNounParser(noun_client, exemplars),
            verb_source=PromptVerbUnitAdapter(verb_client),
            pair_judge=judge,
            unit_judge=judge,
            within_source=within_source,
        )
        report = decomp_report(results, replicates=replicates, seed=seed)
    except TransportError as exc:
        click.echo(f"transport error: {exc}", err=True)
        sys.exit(EXIT_TRANSPORT)
    except QANounError as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_DATA)

    half = (report.entailed_ci.upper - report.entailed_ci.lower) / 2
    click.echo("Method   Generated  Non-Redundant  Entailed")
    click.echo(
        f"corpus   {report.mean_generated:<9.1f}  {report.mean_non_redundant:<13.1f}  "
        f"{report.mean_entailed:.1f}±{half:.1f}"
    )
    payload = {
        "mean_generated": report.mean_generated,
        "mean_non_redundant": report.mean_non_redundant,
        "mean_entailed": report.mean_entailed,
        "entailed_ci": {
            "lower": report.entailed_ci.lower,
            "upper": report.entailed_ci.upper,
            "level": report.entailed_ci.level,
            "replicates": report.entailed_ci.replicates,
        },
        "seed": seed,
        "per_sentence": [
            {
                "sentence_id": r.sentence_id,
                "generated": r.generated,
                "non_redundant": r.non_redundant,
                "entailed": r.entailed,
                "error": r.error,
            }
            for r in report.per_sentence
        ],
        "errors": list(report.errors),
    }
    Path(report_path).write_text(json.dumps(payload, indent=2))
    click.echo(f"report written to {report_path}")


@main.command("serve")
@click.option("--data-dir", required=True, type=click.Path())
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8737, show_default=True)
@click.option("--token-file", required=True, type=click.Path(exists=True))
def serve_cmd(data_dir, host, port, token_file):
    """Start the annotation service."""
    import uvicorn

    from .service.app import create_app, load_token_table
    from .service.store import ProjectStore

    app = create_app(ProjectStore(data_dir), load_token_table(token_file))
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
