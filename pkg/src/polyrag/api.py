"""HTTP surface: JSON chat API, WhatsApp-style webhook, analytics, health.

The app wraps a ServiceState built by bootstrap.build_state; request and
response bodies are pydantic models mirroring the documented wire formats.
"""

from __future__ import annotations

import base64
import binascii
import uuid

from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .analytics import analytics_from_journal
from .bootstrap import ServiceState
from .engine import Channel
from .language import tag_for_code
from .pipeline import InboundMessage, MessageKind, PipelineError
from .speech import AudioBlob, TranscriptionError
from .webhook import WebhookParseError, outbound_to_webhook, webhook_parse


class ChatRequest(BaseModel):
    session_id: str | None = None
    text: str | None = None
    audio_b64: str | None = None
    mime: str | None = None
    lang_hint: str | None = None


class ChatResponse(BaseModel):
    session_id: str
    text: str
    lang: str
    audio_b64: str | None = None
    sources: list[str]
    refused: bool


class TurnView(BaseModel):
    question_en: str
    answer_en: str
    original_text: str
    delivered_text: str
    lang: str
    modality: str
    sources: list[str]
    refused: bool
    degraded: bool
    timestamp: str
    retrieval_query_en: str


class SessionView(BaseModel):
    session_id: str
    channel: str
    created: str
    last_active: str
    turns: list[TurnView]


class HealthView(BaseModel):
    status: str
    index_size: int


def create_app(state: ServiceState) -> FastAPI:
    app = FastAPI(title="polyrag", version="0.1.0")
    app.state.service = state

    @app.post("/v1/chat", response_model=ChatResponse, response_model_exclude_none=True)
    def chat(request: ChatRequest) -> ChatResponse:
        if (request.text is None) == (request.audio_b64 is None):
            raise HTTPException(
                status_code=400, detail="provide exactly one of text or audio_b64"
            )

        session_id = request.session_id
        if session_id:
            session = state.store.get(session_id)
            if session is None or session.channel is not Channel.WEB:
                raise HTTPException(status_code=404, detail="unknown session_id")
            sender_id = session.sender_id
        else:
            session = state.store.create(Channel.WEB)
            sender_id = session.sender_id

        hint = tag_for_code(request.lang_hint) if request.lang_hint else None
        if request.text is not None:
            message = InboundMessage(
                channel=Channel.WEB,
                sender_id=sender_id,
                message_id=uuid.uuid4().hex,
                kind=MessageKind.TEXT,
                text=request.text,
                lang_hint=hint,
            )
        else:
            try:
                audio_bytes = base64.b64decode(request.audio_b64, validate=True)
            except (binascii.Error, ValueError):
                raise HTTPException(status_code=400, detail="audio_b64 is not valid base64")
            message = InboundMessage(
                channel=Channel.WEB,
                sender_id=sender_id,
                message_id=uuid.uuid4().hex,
                kind=MessageKind.AUDIO,
                audio=AudioBlob(data=audio_bytes, mime=request.mime or "audio/wav"),
                lang_hint=hint,
            )

        try:
            out = state.pipeline.handle_chat(message)
        except (PipelineError, TranscriptionError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))

        audio_b64 = (
            base64.b64encode(out.audio.data).decode("ascii") if out.audio else None
        )
        return ChatResponse(
            session_id=out.session_id,
            text=out.text,
            lang=out.lang.code,
            audio_b64=audio_b64,
            sources=out.sources,
            refused=out.refused,
        )

    @app.get("/v1/sessions/{session_id}", response_model=SessionView)
    def session_transcript(session_id: str) -> SessionView:
        session = state.store.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session_id")
        return SessionView(
            session_id=session.session_id,
            channel=session.channel.value,
            created=session.created.isoformat(),
            last_active=session.last_active.isoformat(),
            turns=[
                TurnView(
                    question_en=t.question_en,
                    answer_en=t.answer_en,
                    original_text=t.original_text,
                    delivered_text=t.delivered_text,
                    lang=t.original_lang.code,
                    modality=t.modality.value,
                    sources=t.sources,
                    refused=t.refused,
                    degraded=t.degraded,
                    timestamp=t.timestamp.isoformat(),
                    retrieval_query_en=t.retrieval_query_en,
                )
                for t in session.turns
            ],
        )

    @app.get("/v1/analytics")
    def analytics() -> dict:
        return state.store.counters.snapshot().to_dict()

    @app.get("/v1/analytics/recomputed")
    def analytics_recomputed() -> dict:
        return analytics_from_journal(state.config.journal_path).to_dict()

    @app.get("/v1/health", response_model=HealthView)
    def health() -> HealthView:
        return HealthView(status="ok", index_size=len(state.index))

    @app.post("/webhook/messages")
    async def webhook_messages(request: Request) -> JSONResponse:
        token = state.config.webhook_token
        if token and request.headers.get("X-Webhook-Token") != token:
            return JSONResponse(
                status_code=403,
                content={"error": {"field": "X-Webhook-Token", "message": "bad token"}},
            )
        body = await request.body()
        try:
            message = webhook_parse(body)
        except WebhookParseError as exc:
            return JSONResponse(
                status_code=400,
                content={"error": {"field": exc.field, "message": str(exc)}},
            )
        try:
            out = state.pipeline.handle_chat(message)
        except (PipelineError, TranscriptionError) as exc:
            return JSONResponse(
                status_code=400,
                content={"error": {"field": "audio", "message": str(exc)}},
            )
        return JSONResponse(content=outbound_to_webhook(out))

    if state.config.ui_dir:
        app.mount("/", StaticFiles(directory=state.config.ui_dir, html=True), name="ui")

    return app
