"""Language detection, inbound/outbound translation routing.

Everything downstream of this module speaks English: inbound text of any
language is translated to English before retrieval and generation, and the
answer is translated back to the language the question arrived in. Detection
is a script-majority heuristic that is exact for the Arabic/Gurmukhi/Latin
split this deployment cares about; a configured detector provider can
override it.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Protocol

logger = logging.getLogger(__name__)

ENGLISH_CODE = "en"


class LanguageError(Exception):
    pass


class TranslationError(LanguageError):
    def __init__(self, provider_name: str, message: str):
        super().__init__(f"translation via {provider_name} failed: {message}")
        self.provider_name = provider_name


class RoutingError(LanguageError):
    """Inbound routing failed; the original text is preserved for diagnostics."""

    def __init__(self, message: str, original_text: str, original_lang: "LangTag"):
        super().__init__(message)
        self.original_text = original_text
        self.original_lang = original_lang


class Script(str, Enum):
    LATIN = "Latin"
    ARABIC = "Arabic"
    GURMUKHI = "Gurmukhi"
    OTHER = "Other"


@dataclass(frozen=True)
class LangTag:
    code: str
    script: Script = Script.LATIN
    confidence: float = 1.0

    def __post_init__(self) -> None:
        if not self.code:
            raise LanguageError("language code must be non-empty")
        if not 0.0 <= self.confidence <= 1.0:
            raise LanguageError(f"confidence must be in [0, 1], got {self.confidence}")


ENGLISH = LangTag(ENGLISH_CODE, Script.LATIN, 1.0)

# Unicode blocks for the scripts the detector distinguishes.
_ARABIC_RANGES = (
    (0x0600, 0x06FF),
    (0x0750, 0x077F),
    (0x08A0, 0x08FF),
    (0xFB50, 0xFDFF),
    (0xFE70, 0xFEFF),
)
_GURMUKHI_RANGE = (0x0A00, 0x0A7F)
_LATIN_RANGES = (
    (0x0041, 0x005A),
    (0x0061, 0x007A),
    (0x00C0, 0x024F),
    (0x1E00, 0x1EFF),
)

_SCRIPT_TO_CODE = {
    Script.ARABIC: "ur",
    Script.GURMUKHI: "pa",
    Script.LATIN: ENGLISH_CODE,
    Script.OTHER: ENGLISH_CODE,
}


def tag_for_code(code: str) -> LangTag:
    """LangTag for a bare language code, with its conventional script."""
    script = {"ur": Script.ARABIC, "pa": Script.GURMUKHI}.get(code, Script.LATIN)
    return LangTag(code, script, 1.0)


def _script_of(char: str) -> Script:
    point = ord(char)
    for lo, hi in _ARABIC_RANGES:
        if lo <= point <= hi:
            return Script.ARABIC
    if _GURMUKHI_RANGE[0] <= point <= _GURMUKHI_RANGE[1]:
        return Script.GURMUKHI
    for lo, hi in _LATIN_RANGES:
        if lo <= point <= hi:
            return Script.LATIN
    return Script.OTHER


class DetectorProvider(Protocol):
    def detect(self, text: str) -> LangTag: ...


def detect_language(text: str, provider: DetectorProvider | None = None) -> LangTag:
    """Majority Unicode script over letters; Arabic -> ur, Gurmukhi -> pa,
    anything else -> en. A provider, when given, overrides the heuristic."""
    if provider is not None:
        return provider.detect(text)
    counts: dict[Script, int] = {}
    letters = 0
    for char in text:
        if char.isalpha():
            letters += 1
            script = _script_of(char)
            counts[script] = counts.get(script, 0) + 1
    if letters == 0:
        return LangTag(ENGLISH_CODE, Script.LATIN, 0.0)
    winner = max(counts, key=lambda s: (counts[s], s.value))
    return LangTag(_SCRIPT_TO_CODE[winner], winner, counts[winner] / letters)


class Translator(Protocol):
    name: str

    def translate(self, text: str, src: LangTag, dst: LangTag) -> str: ...


class DictionaryTranslator:
    """Mock translator backed by a bidirectional phrase table (TSV fixture).

    Every entry is stored in both directions, which makes exact round-trip
    properties testable: translate back what you translated out and you get
    the original string. Unknown phrases raise, simulating provider failure.
    """

    name = "mock-dictionary"

    def __init__(self, entries: dict[tuple[str, str, str], str]):
        self._entries = dict(entries)
        for (src, dst, source_text), target_text in list(entries.items()):
            self._entries.setdefault((dst, src, target_text), source_text)

    @classmethod
    def from_tsv(cls, path: str | Path) -> "DictionaryTranslator":
        entries: dict[tuple[str, str, str], str] = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line or line.startswith("#"):
                    continue
                parts = line.split("\t")
                if len(parts) != 4:
                    raise LanguageError(
                        f"{path}:{lineno}: expected 4 tab-separated fields"
                    )
                src_lang, dst_lang, src_text, dst_text = parts
                entries[(src_lang, dst_lang, src_text)] = dst_text
        return cls(entries)

    def entries_for(self, src_code: str, dst_code: str) -> dict[str, str]:
        return {
            text: out
            for (src, dst, text), out in self._entries.items()
            if src == src_code and dst == dst_code
        }

    def translate(self, text: str, src: LangTag, dst: LangTag) -> str:
        key = (src.code, dst.code, text.strip())
        if key not in self._entries:
            raise KeyError(f"no dictionary entry for {src.code}->{dst.code}: {text!r}")
        return self._entries[key]


@dataclass
class RoutedQuery:
    english_text: str
    original_lang: LangTag
    original_text: str


@dataclass
class OutboundText:
    text: str
    lang: LangTag
    degraded: bool = False


class LanguageRouter:
    def __init__(
        self,
        translator: Translator | None = None,
        detector: DetectorProvider | None = None,
    ):
        self.translator = translator
        self.detector = detector

    def translate(self, text: str, src: LangTag, dst: LangTag) -> str:
        """Provider translation; identical src/dst short-circuits without a call."""
        if src.code == dst.code:
            return text
        if self.translator is None:
            raise TranslationError("none", "no translator configured")
        try:
            return self.translator.translate(text, src, dst)
        except Exception as exc:
            raise TranslationError(self.translator.name, str(exc)) from exc

    def route_inbound(self, text: str, hint: LangTag | None = None) -> RoutedQuery:
        """Normalize any inbound text to English, keeping full provenance."""
        if not text.strip():
            raise RoutingError("inbound text is empty", text, hint or ENGLISH)
        lang = hint if hint is not None else detect_language(text, self.detector)
        if lang.code == ENGLISH_CODE:
            return RoutedQuery(english_text=text, original_lang=lang, original_text=text)
        try:
            english = self.translate(text, lang, ENGLISH)
        except TranslationError as exc:
            raise RoutingError(str(exc), text, lang) from exc
        return RoutedQuery(english_text=english, original_lang=lang, original_text=text)

    def route_outbound(self, answer_en: str, original_lang: LangTag) -> OutboundText:
        """Deliver the English answer in the asker's language; on provider
        failure fall back to English with the degraded flag set."""
        if original_lang.code == ENGLISH_CODE:
            return OutboundText(text=answer_en, lang=original_lang)
        try:
            translated = self.translate(answer_en, ENGLISH, original_lang)
        except TranslationError as exc:
            logger.warning("outbound translation degraded: %s", exc)
            return OutboundText(text=answer_en, lang=ENGLISH, degraded=True)
        return OutboundText(text=translated, lang=original_lang)
