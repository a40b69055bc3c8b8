"""Command-line interface over the assay knowledge-graph store.

State persists in a snapshot file given by --store or the ASSAYKG_STORE
environment variable. All output is deterministic given the seed; failures
exit nonzero with one machine-parsable line: "error: <Code>: <message>".
"""
from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from . import curation
from .compare import build_comparison, find_similar, render_csv, render_json, render_text
from .corpus import compute_stats, parse_corpus
from .errors import AssayKGError, EmptyCorpus, ModelUnavailable
from .ntriples import DEFAULT_BASE_URI, export_ntriples, import_ntriples
from .semantify import TrainConfig, build_label_space, evaluate, save_model, train
from .store import ModelRef, Store, load_snapshot, save_snapshot

DEFAULT_STORE = "assaykg_store.json"


def _handle_errors(func):
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except AssayKGError as exc:
            click.echo(f"error: {exc.code}: {exc}", err=True)
            sys.exit(1)
        except ValueError as exc:
            click.echo(f"error: InvalidParameter: {exc}", err=True)
            sys.exit(1)

    return wrapper


def _load(store_path: str) -> Store:
    if Path(store_path).exists():
        return load_snapshot(store_path)
    return Store()


def _save(store: Store, store_path: str) -> None:
    save_snapshot(store, store_path)


@click.group()
@click.option(
    "--store",
    "store_path",
    envvar="ASSAYKG_STORE",
    default=DEFAULT_STORE,
    show_default=True,
    help="Snapshot file holding the graph, sessions and model reference.",
)
@click.pass_context
def main(ctx, store_path):
    """Knowledge-graph digital library engine for semantified bioassays."""
    ctx.ensure_object(dict)
    ctx.obj["store_path"] = store_path


@main.command()
@click.argument("corpus_file", type=click.Path(exists=True, dir_okay=False))
@click.pass_context
@_handle_errors
def ingest(ctx, corpus_file):
    """Parse an annotated corpus (JSON Lines) into the graph."""
    store = _load(ctx.obj["store_path"])
    assays, warnings = parse_corpus(corpus_file)
    for warning in warnings:
        click.echo(f"warning: {warning}", err=True)
    store.ingest_corpus(assays)
    _save(store, ctx.obj["store_path"])
    click.echo(f"ingested {len(assays)} assays ({len(warnings)} warnings)")


@main.command()
@click.pass_context
@_handle_errors
def stats(ctx):
    """Profile the ingested corpus."""
    store = _load(ctx.obj["store_path"])
    profile = compute_stats(store.corpus())
    click.echo(f"assays: {profile.assay_count}")
    click.echo(f"statements min: {profile.statements_min if profile.statements_min is not None else '-'}")
    click.echo(f"statements max: {profile.statements_max if profile.statements_max is not None else '-'}")
    click.echo(f"statements mean: {profile.statements_mean}")
    click.echo(f"distinct types: {profile.distinct_types}")
    click.echo(f"distinct formats: {profile.distinct_formats}")


@main.command(name="train")
@click.option("--min-freq", default=1, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--calibration-split", default=0.2, show_default=True, type=float)
@click.option("--model-path", default=None, type=click.Path(dir_okay=False))
@click.pass_context
@_handle_errors
def train_cmd(ctx, min_freq, seed, calibration_split, model_path):
    """Train the semantifier on the ingested corpus."""
    store = _load(ctx.obj["store_path"])
    corpus = store.corpus()
    if not corpus:
        raise EmptyCorpus("no ingested corpus to train on; run 'ingest' first")
    space = build_label_space(corpus, min_frequency=min_freq)
    model = train(corpus, space, TrainConfig(seed=seed, calibration_split=calibration_split))
    target = model_path or f"{ctx.obj['store_path']}.model.json"
    checksum = save_model(model, target)
    store.set_model(model, ModelRef(path=str(target), sha256=checksum))
    _save(store, ctx.obj["store_path"])
    click.echo(f"trained {len(model.label_space)} labels on {len(corpus)} assays")
    click.echo(f"model saved to {target}")


@main.command()
@click.option("--text-file", type=click.Path(exists=True, dir_okay=False))
@click.option("--stdin", "use_stdin", is_flag=True, help="Read assay text from stdin.")
@click.option("--title", default=None)
@click.option("--top-k", default=None, type=int)
@click.option("--auto-accept", is_flag=True, help="Accept every proposal and finalize immediately.")
@click.pass_context
@_handle_errors
def semantify(ctx, text_file, use_stdin, title, top_k, auto_accept):
    """Predict statements for a new assay text and open a curation session."""
    if bool(text_file) == bool(use_stdin):
        raise click.UsageError("provide exactly one of --text-file or --stdin")
    text = Path(text_file).read_text(encoding="utf-8") if text_file else sys.stdin.read()
    store = _load(ctx.obj["store_path"])
    if store.model is None:
        raise ModelUnavailable("no trained model loaded; run 'train' first")
    assay_id = store.create_assay(text, title=title)
    session = store.semantify_assay(assay_id, top_k=top_k)
    output = {
        "assay_id": assay_id,
        "session_id": session.id,
        "proposals": [
            {
                "proposal_id": p.proposal_id,
                "property": p.label.property,
                "value": p.label.value,
                "score": round(p.score, 6),
            }
            for p in session.proposals
        ],
    }
    if auto_accept:
        for proposal in session.proposals:
            curation.decide(session, proposal.proposal_id, curation.ACCEPTED)
        contribution = store.finalize_session(session.id, title or assay_id)
        output["contribution_id"] = contribution
    _save(store, ctx.obj["store_path"])
    click.echo(json.dumps(output, ensure_ascii=False, indent=2))


@main.command()
@click.argument("session_id")
@click.option("--decisions", "decisions_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--finalize", "do_finalize", is_flag=True)
@click.option("--paper-title", default=None)
@click.pass_context
@_handle_errors
def curate(ctx, session_id, decisions_file, do_finalize, paper_title):
    """Apply a decisions file to a session, optionally finalizing it."""
    store = _load(ctx.obj["store_path"])
    session = store.session(session_id)
    applied = 0
    if decisions_file:
        lines = Path(decisions_file).read_text(encoding="utf-8").splitlines()
        applied = curation.apply_decisions(session, lines)
    message = f"applied {applied} decisions to {session_id}"
    if do_finalize:
        contribution = store.finalize_session(session_id, paper_title or session_id)
        message += f"; finalized as {contribution}"
    _save(store, ctx.obj["store_path"])
    click.echo(message)


@main.command()
@click.argument("contributions", nargs=-1, required=True)
@click.option("--format", "fmt", type=click.Choice(["text", "csv", "json"]), default="text", show_default=True)
@click.pass_context
@_handle_errors
def compare(ctx, contributions, fmt):
    """Build a property-aligned comparison table across contributions."""
    store = _load(ctx.obj["store_path"])
    resolved = [store.resolve_contribution(c) for c in contributions]
    table = build_comparison(store.graph, resolved)
    renderer = {"text": render_text, "csv": render_csv, "json": render_json}[fmt]
    click.echo(renderer(table), nl=False)


@main.command()
@click.argument("contribution")
@click.option("-k", default=5, show_default=True, type=int)
@click.pass_context
@_handle_errors
def similar(ctx, contribution, k):
    """Rank other contributions by statement-set Jaccard similarity."""
    store = _load(ctx.obj["store_path"])
    query = store.resolve_contribution(contribution)
    for result in find_similar(store.graph, query, k=k):
        click.echo(f"{result.contribution}\t{result.score:.4f}")


@main.command(name="export")
@click.option("--ntriples", "target", required=True, type=click.Path(dir_okay=False))
@click.option("--base-uri", default=DEFAULT_BASE_URI, show_default=True)
@click.pass_context
@_handle_errors
def export_cmd(ctx, target, base_uri):
    """Export the graph as sorted N-Triples."""
    store = _load(ctx.obj["store_path"])
    text = export_ntriples(store.graph, base_uri=base_uri)
    Path(target).write_text(text, encoding="utf-8")
    click.echo(f"exported {len(text.splitlines())} triples to {target}")


@main.command(name="import")
@click.option("--ntriples", "source", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--base-uri", default=DEFAULT_BASE_URI, show_default=True)
@click.option("--partial-apply", is_flag=True, help="Keep lines applied before a malformed one.")
@click.pass_context
@_handle_errors
def import_cmd(ctx, source, base_uri, partial_apply):
    """Import N-Triples into the graph (transactional by default)."""
    store = _load(ctx.obj["store_path"])
    try:
        report = import_ntriples(Path(source), store.graph, base_uri=base_uri, partial_apply=partial_apply)
    except AssayKGError:
        if partial_apply:
            # lines before the malformed one stay applied under this policy
            _save(store, ctx.obj["store_path"])
        raise
    _save(store, ctx.obj["store_path"])
    click.echo(
        f"imported {report.statements_added} statements "
        f"({report.duplicates_skipped} duplicates, "
        f"{len(report.resources_created)} new resources, "
        f"{len(report.predicates_created)} new predicates)"
    )


@main.command()
@click.argument("snapshot", type=click.Path(dir_okay=False))
@click.pass_context
@_handle_errors
def save(ctx, snapshot):
    """Save the current store to an explicit snapshot path."""
    store = _load(ctx.obj["store_path"])
    checksum = save_snapshot(store, snapshot)
    click.echo(f"saved snapshot to {snapshot} (sha256 {checksum})")


@main.command()
@click.argument("snapshot", type=click.Path(exists=True, dir_okay=False))
@click.pass_context
@_handle_errors
def load(ctx, snapshot):
    """Replace the default store with the given snapshot."""
    store = load_snapshot(snapshot)
    _save(store, ctx.obj["store_path"])
    click.echo(f"loaded snapshot from {snapshot}")


@main.command(name="eval")
@click.option("--split", default=0.2, show_default=True, type=float)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--min-freq", default=1, show_default=True, type=int)
@click.pass_context
@_handle_errors
def eval_cmd(ctx, split, seed, min_freq):
    """Hold out a test split of the corpus, train on the rest, report metrics."""
    import random

    store = _load(ctx.obj["store_path"])
    corpus = store.corpus()
    if not corpus:
        raise EmptyCorpus("no ingested corpus to evaluate on")
    if not 0.0 < split < 1.0:
        raise ValueError("--split must be in (0, 1)")
    rng = random.Random(seed)
    indices = list(range(len(corpus)))
    rng.shuffle(indices)
    n_test = max(1, int(len(corpus) * split))
    test_idx = sorted(indices[:n_test])
    train_idx = sorted(indices[n_test:])
    if not train_idx:
        raise ValueError("--split leaves no training data")
    training = [corpus[i] for i in train_idx]
    held_out = [corpus[i] for i in test_idx]
    space = build_label_space(training, min_frequency=min_freq)
    model = train(training, space, TrainConfig(seed=seed))
    report = evaluate(model, held_out)
    click.echo(f"test assays: {len(held_out)}")
    click.echo(f"micro precision: {report.micro_precision:.4f}")
    click.echo(f"micro recall: {report.micro_recall:.4f}")
    click.echo(f"micro f1: {report.micro_f1:.4f}")
    click.echo(f"macro precision: {report.macro_precision:.4f}")
    click.echo(f"macro recall: {report.macro_recall:.4f}")
    click.echo(f"macro f1: {report.macro_f1:.4f}")


@main.command()
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--flush-interval", default=None, type=float, help="Seconds between snapshot flushes.")
@click.pass_context
@_handle_errors
def serve(ctx, port, host, flush_interval):
    """Run the HTTP/JSON API over the store."""
    import uvicorn

    from .api import create_app

    store_path = ctx.obj["store_path"]
    store = _load(store_path)
    app = create_app(store, store_path=store_path, flush_interval=flush_interval)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
