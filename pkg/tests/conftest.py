import pytest

from polyrag.bootstrap import build_state
from polyrag.chunk_store import ingest
from polyrag.chunking import ChunkParams, Strategy
from polyrag.config import ServiceConfig, data_path
from polyrag.corpus import load_corpus


@pytest.fixture(scope="session")
def demo_corpus():
    return load_corpus(
        data_path("demo_corpus"), data_path("demo_corpus", "manifest.json")
    )


@pytest.fixture()
def make_state(tmp_path, demo_corpus):
    """Build a full ServiceState over the demo corpus in a temp dir.

    Calling the factory again reuses the same chunk store and journal, which
    is exactly restart semantics (journal replay).
    """

    def _make(**overrides):
        store = tmp_path / "chunks.jsonl"
        if not store.exists():
            ingest(demo_corpus, Strategy.FIXED_WINDOW, ChunkParams(), store)
        media = tmp_path / "media"
        media.mkdir(exist_ok=True)
        config = ServiceConfig(
            chunk_store=str(store),
            journal_path=str(tmp_path / "journal.jsonl"),
            media_dir=str(media),
            **overrides,
        )
        return build_state(config)

    return _make
