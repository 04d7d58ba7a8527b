"""Wire the configured providers and stores into a ready ChatPipeline."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import timedelta
from pathlib import Path

from .chunk_store import read_chunk_store
from .config import ConfigError, ServiceConfig
from .embedding import HashedBagOfWordsEmbedder
from .engine import ConversationEngine
from .index import VectorIndex
from .language import DictionaryTranslator, LanguageRouter
from .llm import MockLLM
from .pipeline import ChatPipeline
from .sessions import SessionStore
from .speech import MockSpeechToText, MockTextToSpeech, SpeechGateway
from .templates import PromptTemplates, load_templates


@dataclass
class ServiceState:
    config: ServiceConfig
    pipeline: ChatPipeline
    store: SessionStore
    index: VectorIndex
    templates: PromptTemplates


def build_state(config: ServiceConfig) -> ServiceState:
    chunks = read_chunk_store(config.chunk_store)
    embedder = HashedBagOfWordsEmbedder()
    if config.index_path and Path(config.index_path).is_file():
        index = VectorIndex.load(config.index_path, chunks, embedder)
    else:
        index = VectorIndex.build(chunks, embedder)
        if config.index_path:
            index.save(config.index_path)

    templates = load_templates(config.templates_path)

    if config.translator != "mock":
        raise ConfigError(f"unknown translator adapter {config.translator!r}")
    translator = DictionaryTranslator.from_tsv(config.translations_tsv)
    router = LanguageRouter(translator=translator)

    if config.llm != "mock":
        raise ConfigError(f"unknown llm adapter {config.llm!r}")
    llm = MockLLM(refusal_text=templates.refusal_text)

    if config.stt != "mock" or config.tts != "mock":
        raise ConfigError("only mock speech adapters ship with this build")
    speech = SpeechGateway(
        stt=MockSpeechToText(router),
        tts=MockTextToSpeech(),
        max_inflight=config.speech_max_inflight,
    )

    engine = ConversationEngine(
        index=index,
        llm=llm,
        templates=templates,
        retrieval_k=config.retrieval_k,
        grounding_threshold=config.grounding_threshold,
        history_window=config.history_window,
    )
    store = SessionStore(
        config.journal_path, ttl=timedelta(hours=config.session_ttl_hours)
    )
    pipeline = ChatPipeline(
        engine=engine,
        router=router,
        speech=speech,
        store=store,
        media_dir=config.media_dir,
    )
    return ServiceState(
        config=config, pipeline=pipeline, store=store, index=index, templates=templates
    )
