"""Speech gateway: speech-to-text (any language -> English) and text-to-speech.

The mock providers exchange real RIFF/WAVE containers whose data section is
the UTF-8 payload "<lang>|<text>", zero-padded to even length. That keeps
audio bit-exact and machine-decodable, so the whole voice path is testable
offline; real vendor adapters implement the same two-method interfaces.
"""

from __future__ import annotations

import struct
import threading
from dataclasses import dataclass
from typing import Protocol

from .language import ENGLISH_CODE, LangTag, LanguageRouter, tag_for_code
from .providers import Capability, ProviderProfile, select_provider

MOCK_SAMPLE_RATE = 16_000
MOCK_MIME = "audio/wav"
_BITS_PER_SAMPLE = 16
_CHANNELS = 1


class SpeechError(Exception):
    pass


class TranscriptionError(SpeechError):
    pass


class EmptyTranscriptError(TranscriptionError):
    pass


class UnsupportedLanguageError(SpeechError):
    def __init__(self, lang: LangTag):
        super().__init__(f"text-to-speech does not support language {lang.code!r}")
        self.lang = lang


@dataclass
class AudioBlob:
    data: bytes
    mime: str = MOCK_MIME
    sample_rate: int = MOCK_SAMPLE_RATE
    channels: int = _CHANNELS


@dataclass
class Transcript:
    english_text: str
    detected_lang: LangTag
    original_text: str | None = None  # mock providers can recover it exactly


def encode_mock_wav(payload: bytes) -> bytes:
    """Wrap payload bytes in a canonical 44-byte-header WAV container."""
    if len(payload) % 2:
        payload += b"\x00"
    byte_rate = MOCK_SAMPLE_RATE * _CHANNELS * _BITS_PER_SAMPLE // 8
    block_align = _CHANNELS * _BITS_PER_SAMPLE // 8
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF",
        36 + len(payload),
        b"WAVE",
        b"fmt ",
        16,
        1,  # PCM
        _CHANNELS,
        MOCK_SAMPLE_RATE,
        byte_rate,
        block_align,
        _BITS_PER_SAMPLE,
        b"data",
        len(payload),
    )
    return header + payload


def decode_mock_wav(data: bytes) -> bytes:
    """Validate the RIFF container and return the data section."""
    if len(data) < 44:
        raise TranscriptionError("audio too short to be a WAV container")
    riff, riff_size, wave, fmt_tag = struct.unpack_from("<4sI4s4s", data, 0)
    if riff != b"RIFF" or wave != b"WAVE" or fmt_tag != b"fmt ":
        raise TranscriptionError("not a RIFF/WAVE container")
    data_tag, data_size = struct.unpack_from("<4sI", data, 36)
    if data_tag != b"data":
        raise TranscriptionError("missing data section")
    if data_size != len(data) - 44 or riff_size != 36 + data_size:
        raise TranscriptionError("declared WAV sizes do not match payload")
    return data[44:]


class SpeechToTextProvider(Protocol):
    name: str

    def transcribe(self, audio: AudioBlob) -> Transcript: ...


class TextToSpeechProvider(Protocol):
    name: str
    supported_languages: frozenset[str]

    def synthesize(self, text: str, lang: LangTag) -> AudioBlob: ...


class MockTextToSpeech:
    """Deterministic TTS: the spoken text rides inside the WAV payload."""

    name = "mock-tts"
    supported_languages = frozenset({ENGLISH_CODE, "ur"})

    def synthesize(self, text: str, lang: LangTag) -> AudioBlob:
        if lang.code not in self.supported_languages:
            raise UnsupportedLanguageError(lang)
        payload = f"{lang.code}|{text}".encode("utf-8")
        return AudioBlob(data=encode_mock_wav(payload))


class MockSpeechToText:
    """Decodes mock-TTS audio and routes the carried text to English."""

    name = "mock-stt"

    def __init__(self, router: LanguageRouter):
        self.router = router

    def transcribe(self, audio: AudioBlob) -> Transcript:
        payload = decode_mock_wav(audio.data).rstrip(b"\x00")
        try:
            text = payload.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise TranscriptionError(f"undecodable audio payload: {exc}") from exc
        if not text.strip():
            raise EmptyTranscriptError("audio carries no speech payload")
        lang_code, sep, spoken = text.partition("|")
        if not sep:
            raise TranscriptionError("mock payload missing language prefix")
        if not spoken.strip():
            raise EmptyTranscriptError("audio carries no speech payload")
        hint = tag_for_code(lang_code)
        routed = self.router.route_inbound(spoken, hint=hint)
        return Transcript(
            english_text=routed.english_text,
            detected_lang=routed.original_lang,
            original_text=routed.original_text,
        )


class SpeechGateway:
    """Front door for the voice path, with language fallback for replies.

    Reply audio is synthesized in the asker's language when the TTS provider
    supports it; otherwise it falls back down `fallback_langs` (Urdu before
    English, since the user base reads Urdu). Each provider is guarded by an
    in-flight cap (default 4 concurrent calls) so adapters that cannot take
    unbounded concurrency stay safe.
    """

    fallback_langs = ("ur", ENGLISH_CODE)

    def __init__(
        self,
        stt: SpeechToTextProvider,
        tts: TextToSpeechProvider,
        *,
        max_inflight: int = 4,
    ):
        self.stt = stt
        self.tts = tts
        self._stt_slots = threading.BoundedSemaphore(max_inflight)
        self._tts_slots = threading.BoundedSemaphore(max_inflight)

    def transcribe(self, audio: AudioBlob) -> Transcript:
        with self._stt_slots:
            return self.stt.transcribe(audio)

    def synthesize(self, text: str, lang: LangTag) -> AudioBlob:
        with self._tts_slots:
            return self.tts.synthesize(text, lang)

    def reply_language(self, lang: LangTag) -> LangTag:
        if lang.code in self.tts.supported_languages:
            return lang
        for code in self.fallback_langs:
            if code in self.tts.supported_languages:
                return tag_for_code(code)
        raise UnsupportedLanguageError(lang)


def select_tts(profiles: list[ProviderProfile]) -> ProviderProfile:
    return select_provider(profiles, Capability.TTS)
