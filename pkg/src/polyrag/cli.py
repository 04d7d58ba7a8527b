"""polyrag command line: ingest, serve, chat, eval, synth."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .chunking import DEFAULT_TOPIC_CLUSTERS, ChunkParams, Strategy
from .chunk_store import ingest as run_ingest
from .config import ServiceConfig, data_path
from .corpus import CorpusFileError, load_corpus

STRATEGY_CHOICES = {
    "fixed": Strategy.FIXED_WINDOW,
    "paragraph": Strategy.PARAGRAPH,
    "semantic": Strategy.SEMANTIC_UNIT,
    "topic": Strategy.TOPIC,
    "entity": Strategy.ENTITY,
}


@click.group()
def main() -> None:
    """Multilingual, voice-capable RAG over a private document corpus."""


@main.command()
@click.option("--root", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--manifest", type=click.Path(exists=True, dir_okay=False))
@click.option("--strategy", type=click.Choice(sorted(STRATEGY_CHOICES)), default="fixed")
@click.option("--size", default=1000, show_default=True)
@click.option("--overlap", default=200, show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option(
    "--lexicon",
    type=click.Path(exists=True, dir_okay=False),
    help="Entity lexicon file (one term per line); defaults to the bundled HR/QA terms.",
)
@click.option("--topic-k", default=DEFAULT_TOPIC_CLUSTERS, show_default=True)
def ingest(root, manifest, strategy, size, overlap, out, lexicon, topic_k) -> None:
    """Chunk a corpus directory into a JSONL chunk store."""
    errors: list[CorpusFileError] = []
    corpus = load_corpus(root, manifest, errors=errors)
    for err in errors:
        click.echo(f"warning: skipped {err.path}: {err.reason}", err=True)

    lexicon_path = Path(lexicon) if lexicon else data_path("entity_lexicon.txt")
    terms = [
        line.strip()
        for line in lexicon_path.read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]
    summary = run_ingest(
        corpus,
        STRATEGY_CHOICES[strategy],
        ChunkParams(size=size, overlap=overlap),
        out,
        entity_lexicon=terms,
        topic_k=topic_k,
    )
    click.echo(
        f"ingested {summary.doc_count} documents into {summary.chunk_count} chunks "
        f"at {summary.store_path}"
    )


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
def serve(config_path) -> None:
    """Run the HTTP service (chat API, webhook, analytics)."""
    import uvicorn

    from .api import create_app
    from .bootstrap import build_state

    config = ServiceConfig.from_file(config_path)
    app = create_app(build_state(config))
    uvicorn.run(app, host=config.listen_host, port=config.listen_port)


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
def chat(config_path) -> None:
    """Interactive REPL over the same pipeline the service runs."""
    from .bootstrap import build_state
    from .engine import Channel
    from .pipeline import InboundMessage, MessageKind

    state = build_state(ServiceConfig.from_file(config_path))
    session = state.store.create(Channel.CLI)
    click.echo("polyrag chat -- type a question, empty line or Ctrl-D to quit")
    counter = 0
    while True:
        try:
            line = input("> ").strip()
        except EOFError:
            break
        if not line:
            break
        counter += 1
        out = state.pipeline.handle_chat(
            InboundMessage(
                channel=Channel.CLI,
                sender_id=session.sender_id,
                message_id=f"cli-{counter}",
                kind=MessageKind.TEXT,
                text=line,
            )
        )
        marker = " [refused]" if out.refused else ""
        click.echo(f"[{out.lang.code}]{marker} {out.text}")
        if out.sources:
            click.echo(f"  sources: {', '.join(out.sources)}")
    click.echo("bye")


@main.command(name="eval")
@click.option(
    "--suite",
    type=click.Choice(["chunking", "prompts", "providers", "all"]),
    default="all",
    show_default=True,
)
@click.option("--corpus", "corpus_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--seed", default=7, show_default=True)
@click.option("--k", default=4, show_default=True)
@click.option(
    "--timings/--no-timings",
    default=False,
    help="Write measured latencies into the table files (non-reproducible bytes).",
)
def eval_cmd(suite, corpus_dir, out_dir, seed, k, timings) -> None:
    """Run the comparison experiments and emit tableN.md/csv files."""
    from .evaluation import run_suite

    reports, paths = run_suite(
        suite,
        out_dir,
        corpus_dir,
        seed=seed,
        k=k,
        include_latency=timings,
    )
    for report in reports:
        click.echo(f"{report.name}: {report.title}")
        for row in report.rows:
            cells = ", ".join(f"{col}={row.get(col, '')}" for col in report.columns)
            click.echo(f"  {cells}")
    click.echo(f"wrote {len(paths)} files under {out_dir}")


@main.command()
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--seed", default=7, show_default=True)
@click.option("--docs", default=20, show_default=True)
def synth(out_dir, seed, docs) -> None:
    """Generate the synthetic labeled corpus used by the evaluation harness."""
    from .synthetic import generate_suite, write_suite

    suite = generate_suite(seed=seed, n_docs=docs)
    path = write_suite(suite, out_dir)
    in_context = sum(1 for q in suite.qa_pairs if q.in_context)
    click.echo(
        f"wrote {len(suite.documents)} documents and {len(suite.qa_pairs)} QA pairs "
        f"({in_context} in-context) to {path}"
    )


if __name__ == "__main__":
    sys.exit(main())
