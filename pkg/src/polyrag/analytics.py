"""Engagement analytics over the turn journal.

A "conversation" is one inbound/outbound turn pair. Counters can be
maintained incrementally while serving or recomputed exactly from the
journal file; the two must always agree. Fractions stay exact in the
snapshot and are rounded only for display.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .engine import Channel, Modality
from .language import ENGLISH_CODE


@dataclass
class AnalyticsSnapshot:
    conversations_per_channel: dict[str, int]
    voice_fraction: float
    non_english_fraction: float
    refusal_count: int
    complaint_count: int
    total_conversations: int

    @property
    def voice_percent(self) -> int:
        return round(self.voice_fraction * 100)

    @property
    def non_english_percent(self) -> int:
        return round(self.non_english_fraction * 100)

    def to_dict(self) -> dict:
        return {
            "conversations_per_channel": dict(self.conversations_per_channel),
            "voice_fraction": self.voice_fraction,
            "non_english_fraction": self.non_english_fraction,
            "refusal_count": self.refusal_count,
            "complaint_count": self.complaint_count,
            "total_conversations": self.total_conversations,
            "voice_percent": self.voice_percent,
            "non_english_percent": self.non_english_percent,
        }


@dataclass
class AnalyticsAccumulator:
    per_channel: dict[str, int] = field(default_factory=dict)
    voice_count: int = 0
    non_english_count: int = 0
    refusal_count: int = 0
    complaint_count: int = 0
    total: int = 0

    def add_turn(
        self, channel: Channel, modality: Modality, lang_code: str, refused: bool
    ) -> None:
        self.total += 1
        self.per_channel[channel.value] = self.per_channel.get(channel.value, 0) + 1
        if modality is Modality.VOICE:
            self.voice_count += 1
        if lang_code != ENGLISH_CODE:
            self.non_english_count += 1
        if refused:
            self.refusal_count += 1

    def add_complaint(self) -> None:
        self.complaint_count += 1

    def snapshot(self) -> AnalyticsSnapshot:
        total = self.total
        return AnalyticsSnapshot(
            conversations_per_channel=dict(self.per_channel),
            voice_fraction=self.voice_count / total if total else 0.0,
            non_english_fraction=self.non_english_count / total if total else 0.0,
            refusal_count=self.refusal_count,
            complaint_count=self.complaint_count,
            total_conversations=total,
        )


def analytics_from_journal(path: str | Path) -> AnalyticsSnapshot:
    """Recompute the snapshot from the journal alone (no in-memory state)."""
    acc = AnalyticsAccumulator()
    path = Path(path)
    if not path.exists():
        return acc.snapshot()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            if record.get("kind") == "turn":
                turn = record["turn"]
                acc.add_turn(
                    channel=Channel(record["channel"]),
                    modality=Modality(turn["modality"]),
                    lang_code=turn["lang"]["code"],
                    refused=turn["refused"],
                )
            elif record.get("kind") == "complaint":
                acc.add_complaint()
    return acc.snapshot()
