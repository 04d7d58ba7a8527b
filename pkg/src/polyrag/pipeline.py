"""End-to-end chat handling: one inbound message to one outbound message.

This is the composition point of the whole system. Audio is transcribed to
English, text is routed to English, the conversation engine answers, the
answer is back-translated, and voice questions get a spoken reply. Repeat
deliveries of the same (sender, message_id) return the originally computed
response without touching the session again.
"""

from __future__ import annotations

import base64
import logging
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from pathlib import Path

from .engine import Channel, ConversationEngine, Modality, utcnow
from .language import ENGLISH, LangTag, LanguageRouter, RoutingError, tag_for_code
from .sessions import SessionStore
from .speech import AudioBlob, SpeechError, SpeechGateway

logger = logging.getLogger(__name__)

DEGRADED_INBOUND_NOTICE = (
    "Sorry, your message could not be processed right now. Please try again."
)


class PipelineError(Exception):
    """Client-side problem with an inbound message (400-class)."""


class MessageKind(str, Enum):
    TEXT = "Text"
    AUDIO = "Audio"


@dataclass
class InboundMessage:
    channel: Channel
    sender_id: str
    message_id: str
    kind: MessageKind
    text: str | None = None
    audio: AudioBlob | None = None
    media_ref: str | None = None
    lang_hint: LangTag | None = None
    timestamp: datetime = field(default_factory=utcnow)

    def __post_init__(self) -> None:
        if self.kind is MessageKind.TEXT and not self.text:
            raise PipelineError("text message must carry text")
        if self.kind is MessageKind.AUDIO and self.audio is None and not self.media_ref:
            raise PipelineError("audio message must carry audio or a media reference")


@dataclass
class OutboundMessage:
    recipient_id: str
    session_id: str
    text: str
    lang: LangTag
    sources: list[str]
    refused: bool
    audio: AudioBlob | None = None
    degraded: bool = False

    def to_dict(self) -> dict:
        data = {
            "recipient_id": self.recipient_id,
            "session_id": self.session_id,
            "text": self.text,
            "lang": self.lang.code,
            "sources": list(self.sources),
            "refused": self.refused,
            "degraded": self.degraded,
        }
        if self.audio is not None:
            data["audio_b64"] = base64.b64encode(self.audio.data).decode("ascii")
            data["audio_mime"] = self.audio.mime
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "OutboundMessage":
        audio = None
        if "audio_b64" in data:
            audio = AudioBlob(
                data=base64.b64decode(data["audio_b64"]),
                mime=data.get("audio_mime", "audio/wav"),
            )
        return cls(
            recipient_id=data["recipient_id"],
            session_id=data["session_id"],
            text=data["text"],
            lang=tag_for_code(data["lang"]),
            sources=list(data["sources"]),
            refused=data["refused"],
            audio=audio,
            degraded=data.get("degraded", False),
        )


class ChatPipeline:
    def __init__(
        self,
        engine: ConversationEngine,
        router: LanguageRouter,
        speech: SpeechGateway,
        store: SessionStore,
        *,
        media_dir: str | Path | None = None,
    ):
        self.engine = engine
        self.router = router
        self.speech = speech
        self.store = store
        self.media_dir = Path(media_dir) if media_dir else None

    def handle_chat(self, message: InboundMessage) -> OutboundMessage:
        with self.store.sender_lock(message.channel, message.sender_id):
            cached = self.store.cached_response(message.sender_id, message.message_id)
            if cached is not None:
                return OutboundMessage.from_dict(cached)
            return self._handle_new(message)

    def _handle_new(self, message: InboundMessage) -> OutboundMessage:
        session = self.store.resolve(message.channel, message.sender_id)

        if message.kind is MessageKind.AUDIO:
            audio = message.audio or self._resolve_media(message.media_ref)
            transcript = self.speech.transcribe(audio)
            english = transcript.english_text
            lang = transcript.detected_lang
            original = transcript.original_text or transcript.english_text
            modality = Modality.VOICE
        else:
            try:
                routed = self.router.route_inbound(message.text, hint=message.lang_hint)
            except RoutingError as exc:
                logger.warning("inbound routing degraded: %s", exc)
                return OutboundMessage(
                    recipient_id=message.sender_id,
                    session_id=session.session_id,
                    text=DEGRADED_INBOUND_NOTICE,
                    lang=ENGLISH,
                    sources=[],
                    refused=False,
                    degraded=True,
                )
            english, lang, original = (
                routed.english_text,
                routed.original_lang,
                routed.original_text,
            )
            modality = Modality.TEXT

        turn = self.engine.answer(
            session,
            english,
            modality=modality,
            original_lang=lang,
            original_text=original,
        )

        outbound = self.router.route_outbound(turn.answer_en, lang)
        turn.delivered_text = outbound.text
        turn.degraded = turn.degraded or outbound.degraded

        audio_reply: AudioBlob | None = None
        if modality is Modality.VOICE:
            try:
                audio_reply = self._reply_audio(turn.answer_en, outbound.text, outbound.lang)
            except SpeechError as exc:
                logger.warning("reply synthesis degraded: %s", exc)
                turn.degraded = True

        out = OutboundMessage(
            recipient_id=message.sender_id,
            session_id=session.session_id,
            text=outbound.text,
            lang=outbound.lang,
            sources=turn.sources,
            refused=turn.refused,
            audio=audio_reply,
            degraded=turn.degraded,
        )
        self.store.append_turn(session, turn, message.message_id, out.to_dict())
        return out

    def _reply_audio(
        self, answer_en: str, outbound_text: str, outbound_lang: LangTag
    ) -> AudioBlob:
        """Speak the reply in the asker's language, falling back through the
        gateway's supported languages when that language has no voice."""
        speak_lang = self.speech.reply_language(outbound_lang)
        if speak_lang.code == outbound_lang.code:
            return self.speech.synthesize(outbound_text, speak_lang)
        if speak_lang.code == ENGLISH.code:
            return self.speech.synthesize(answer_en, speak_lang)
        spoken = self.router.route_outbound(answer_en, speak_lang)
        if spoken.degraded:
            return self.speech.synthesize(answer_en, ENGLISH)
        return self.speech.synthesize(spoken.text, speak_lang)

    def _resolve_media(self, media_ref: str | None) -> AudioBlob:
        if self.media_dir is None:
            raise PipelineError("no media directory configured for media references")
        if media_ref is None:
            raise PipelineError("audio message carries no media reference")
        name = Path(media_ref).name
        path = self.media_dir / name
        if name != media_ref or not path.is_file():
            raise PipelineError(f"unknown media reference {media_ref!r}")
        return AudioBlob(data=path.read_bytes())
