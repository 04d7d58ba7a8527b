import json

from click.testing import CliRunner

from polyrag.cli import main
from polyrag.chunk_store import read_chunk_store
from polyrag.config import data_path


def test_ingest_command(tmp_path):
    out = tmp_path / "chunks.jsonl"
    runner = CliRunner()
    result = runner.invoke(
        main,
        [
            "ingest",
            "--root",
            str(data_path("demo_corpus")),
            "--manifest",
            str(data_path("demo_corpus", "manifest.json")),
            "--strategy",
            "fixed",
            "--size",
            "1000",
            "--overlap",
            "200",
            "--out",
            str(out),
        ],
    )
    assert result.exit_code == 0, result.output
    assert "ingested 5 documents" in result.output
    assert read_chunk_store(out)


def test_ingest_all_strategies(tmp_path):
    runner = CliRunner()
    for strategy in ("paragraph", "semantic", "topic", "entity"):
        out = tmp_path / f"{strategy}.jsonl"
        result = runner.invoke(
            main,
            ["ingest", "--root", str(data_path("demo_corpus")), "--strategy", strategy, "--out", str(out)],
        )
        assert result.exit_code == 0, result.output
        assert out.exists()


def test_synth_command(tmp_path):
    runner = CliRunner()
    result = runner.invoke(
        main, ["synth", "--out", str(tmp_path / "suite"), "--seed", "7"]
    )
    assert result.exit_code == 0, result.output
    assert (tmp_path / "suite" / "qa_pairs.jsonl").exists()
    assert (tmp_path / "suite" / "manifest.json").exists()


def test_eval_providers_suite(tmp_path):
    runner = CliRunner()
    result = runner.invoke(
        main, ["eval", "--suite", "providers", "--out", str(tmp_path / "r")]
    )
    assert result.exit_code == 0, result.output
    for name in ("table3", "table4", "table5"):
        assert (tmp_path / "r" / f"{name}.md").exists()
        assert (tmp_path / "r" / f"{name}.csv").exists()


def test_chat_repl(tmp_path):
    runner = CliRunner()
    out = tmp_path / "chunks.jsonl"
    assert (
        runner.invoke(
            main, ["ingest", "--root", str(data_path("demo_corpus")), "--out", str(out)]
        ).exit_code
        == 0
    )
    config = tmp_path / "config.yaml"
    config.write_text(
        f"chunk_store: {out}\njournal_path: {tmp_path / 'journal.jsonl'}\n",
        encoding="utf-8",
    )
    result = runner.invoke(
        main, ["chat", "--config", str(config)], input="when are salaries paid\n\n"
    )
    assert result.exit_code == 0, result.output
    assert "last working day" in result.output
    assert "sources:" in result.output


def test_eval_uses_written_corpus(tmp_path):
    runner = CliRunner()
    assert (
        runner.invoke(
            main, ["synth", "--out", str(tmp_path / "suite"), "--docs", "6"]
        ).exit_code
        == 0
    )
    result = runner.invoke(
        main,
        [
            "eval",
            "--suite",
            "prompts",
            "--corpus",
            str(tmp_path / "suite"),
            "--out",
            str(tmp_path / "r"),
        ],
    )
    assert result.exit_code == 0, result.output
    assert (tmp_path / "r" / "table2.md").exists()
