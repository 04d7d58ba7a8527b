"""Conversation engine: history, question condensation, grounded answering.

The serving contract, in order: condense the follow-up into a standalone
English question, retrieve top-k chunks for it, refuse outright if the best
retrieval score is under the grounding threshold (no LLM call), otherwise
answer from the assembled QA prompt. A refusal therefore never depends on
the LLM behaving well -- corpus-disjoint questions are refused by
construction.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Callable

from .embedding import EmptyTextError
from .index import ScoredChunk, VectorIndex
from .language import ENGLISH, LangTag, Script
from .llm import LLMProvider
from .templates import CONTEXT_SEPARATOR, PromptTemplates, render

logger = logging.getLogger(__name__)

DEFAULT_RETRIEVAL_K = 4
DEFAULT_GROUNDING_THRESHOLD = 0.15
DEFAULT_HISTORY_WINDOW = 5

DEGRADED_NOTICE = "Sorry, something went wrong while answering. Please try again."


class Modality(str, Enum):
    TEXT = "Text"
    VOICE = "Voice"


class Channel(str, Enum):
    WEB = "Web"
    WEBHOOK = "Webhook"
    CLI = "CLI"


def utcnow() -> datetime:
    return datetime.now(timezone.utc)


@dataclass
class ChatTurn:
    question_en: str
    answer_en: str
    sources: list[str]
    refused: bool
    timestamp: datetime
    modality: Modality
    original_lang: LangTag
    original_text: str
    retrieval_query_en: str
    delivered_text: str = ""
    degraded: bool = False

    def to_dict(self) -> dict:
        return {
            "question_en": self.question_en,
            "answer_en": self.answer_en,
            "sources": list(self.sources),
            "refused": self.refused,
            "timestamp": self.timestamp.isoformat(),
            "modality": self.modality.value,
            "lang": {
                "code": self.original_lang.code,
                "script": self.original_lang.script.value,
                "confidence": self.original_lang.confidence,
            },
            "original_text": self.original_text,
            "retrieval_query_en": self.retrieval_query_en,
            "delivered_text": self.delivered_text,
            "degraded": self.degraded,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ChatTurn":
        lang = data["lang"]
        return cls(
            question_en=data["question_en"],
            answer_en=data["answer_en"],
            sources=list(data["sources"]),
            refused=data["refused"],
            timestamp=datetime.fromisoformat(data["timestamp"]),
            modality=Modality(data["modality"]),
            original_lang=LangTag(
                lang["code"], Script(lang["script"]), lang["confidence"]
            ),
            original_text=data["original_text"],
            retrieval_query_en=data["retrieval_query_en"],
            delivered_text=data.get("delivered_text", ""),
            degraded=data.get("degraded", False),
        )


@dataclass
class Session:
    session_id: str
    channel: Channel
    sender_id: str
    created: datetime
    last_active: datetime
    turns: list[ChatTurn] = field(default_factory=list)


def render_chat_history(turns: list[ChatTurn], window: int) -> str:
    lines = []
    for turn in turns[-window:]:
        lines.append(f"Human: {turn.question_en}")
        lines.append(f"Assistant: {turn.answer_en}")
    return "\n".join(lines)


def assemble_qa_prompt(
    chunks: list[ScoredChunk], question_en: str, qa_template: str
) -> str:
    """Render the QA template with chunk texts joined in score order."""
    context = CONTEXT_SEPARATOR.join(sc.chunk.text for sc in chunks)
    return render(qa_template, context=context, question=question_en)


class ConversationEngine:
    def __init__(
        self,
        index: VectorIndex,
        llm: LLMProvider,
        templates: PromptTemplates,
        *,
        retrieval_k: int = DEFAULT_RETRIEVAL_K,
        grounding_threshold: float = DEFAULT_GROUNDING_THRESHOLD,
        history_window: int = DEFAULT_HISTORY_WINDOW,
        clock: Callable[[], datetime] = utcnow,
    ):
        self.index = index
        self.llm = llm
        self.templates = templates
        self.retrieval_k = retrieval_k
        self.grounding_threshold = grounding_threshold
        self.history_window = history_window
        self.clock = clock

    def condense_question(
        self, history: list[ChatTurn], follow_up_en: str
    ) -> tuple[str, bool]:
        """Rewrite a follow-up into a standalone question using recent history.

        Returns (standalone, degraded). With no history the follow-up passes
        through untouched and the LLM is never called; on LLM failure the raw
        follow-up is used and the degraded flag is set.
        """
        if not follow_up_en.strip():
            raise ValueError("follow-up question must be non-empty")
        if not history:
            return follow_up_en, False
        prompt = render(
            self.templates.condense_template,
            chat_history=render_chat_history(history, self.history_window),
            question=follow_up_en,
        )
        try:
            return self.llm.complete(prompt).strip(), False
        except Exception as exc:
            logger.warning("condense degraded, using raw follow-up: %s", exc)
            return follow_up_en, True

    def answer(
        self,
        session: Session,
        question_en: str,
        *,
        modality: Modality = Modality.TEXT,
        original_lang: LangTag = ENGLISH,
        original_text: str | None = None,
    ) -> ChatTurn:
        """Run the grounded QA pipeline and append the resulting turn."""
        standalone, degraded = self.condense_question(session.turns, question_en)

        results: list[ScoredChunk] = []
        try:
            query_vector = self.index.embedder.embed(standalone)
            results = self.index.search(query_vector, self.retrieval_k)
        except EmptyTextError:
            results = []

        refused = not results or results[0].score < self.grounding_threshold
        if refused:
            answer_en = self.templates.refusal_text
            sources: list[str] = []
        else:
            prompt = assemble_qa_prompt(results, standalone, self.templates.qa_template)
            try:
                answer_en = self.llm.complete(prompt).strip()
            except Exception as exc:
                logger.warning("LLM failed after grounding: %s", exc)
                answer_en = DEGRADED_NOTICE
                degraded = True
            if answer_en == self.templates.refusal_text:
                refused, sources = True, []
            else:
                sources = [sc.chunk.chunk_id for sc in results]

        now = self.clock()
        if session.turns and session.turns[-1].timestamp > now:
            now = session.turns[-1].timestamp
        turn = ChatTurn(
            question_en=question_en,
            answer_en=answer_en,
            sources=sources,
            refused=refused,
            timestamp=now,
            modality=modality,
            original_lang=original_lang,
            original_text=original_text if original_text is not None else question_en,
            retrieval_query_en=standalone,
            delivered_text=answer_en,
            degraded=degraded,
        )
        session.turns.append(turn)
        session.last_active = now
        return turn
