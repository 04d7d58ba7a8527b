"""Session persistence: in-memory sessions backed by an append-only journal.

Every mutation is one JSON line appended and flushed before the request is
acknowledged, so a crash loses at most the line being written. Replay
rebuilds sessions, turns, the idempotency cache, and analytics counters; a
trailing partial line (the signature of a mid-write crash) is dropped, while
corruption anywhere else fails loudly with its byte offset.
"""

from __future__ import annotations

import json
import logging
import os
import threading
import uuid
from datetime import datetime, timedelta
from pathlib import Path
from typing import Callable

from .analytics import AnalyticsAccumulator
from .engine import Channel, ChatTurn, Session, utcnow

logger = logging.getLogger(__name__)

DEFAULT_SESSION_TTL = timedelta(hours=24)


class JournalCorruptionError(Exception):
    def __init__(self, path: Path, byte_offset: int, reason: str):
        super().__init__(f"journal {path} corrupt at byte {byte_offset}: {reason}")
        self.byte_offset = byte_offset


class SessionStore:
    def __init__(
        self,
        journal_path: str | Path,
        *,
        ttl: timedelta = DEFAULT_SESSION_TTL,
        clock: Callable[[], datetime] = utcnow,
    ):
        self.journal_path = Path(journal_path)
        self.ttl = ttl
        self.clock = clock
        self.counters = AnalyticsAccumulator()
        self._sessions: dict[str, Session] = {}
        self._by_sender: dict[tuple[Channel, str], str] = {}
        self._responses: dict[tuple[str, str], dict] = {}
        self._journal_lock = threading.Lock()
        self._sender_locks: dict[tuple[Channel, str], threading.Lock] = {}
        self._locks_guard = threading.Lock()
        self._replay()

    # -- public API ---------------------------------------------------------

    def sender_lock(self, channel: Channel, sender_id: str) -> threading.Lock:
        """Per-sender mutex: concurrent requests on one session serialize."""
        with self._locks_guard:
            return self._sender_locks.setdefault((channel, sender_id), threading.Lock())

    def get(self, session_id: str) -> Session | None:
        return self._sessions.get(session_id)

    def resolve(self, channel: Channel, sender_id: str) -> Session:
        """Session for a sender; idle sessions past the TTL are retired and a
        fresh one is started (lazy expiry)."""
        session_id = self._by_sender.get((channel, sender_id))
        if session_id is not None:
            session = self._sessions[session_id]
            if self.clock() - session.last_active <= self.ttl:
                return session
            del self._by_sender[(channel, sender_id)]
        return self.create(channel, sender_id)

    def create(self, channel: Channel, sender_id: str | None = None) -> Session:
        now = self.clock()
        session = Session(
            session_id=uuid.uuid4().hex,
            channel=channel,
            sender_id=sender_id if sender_id is not None else "",
            created=now,
            last_active=now,
        )
        if not session.sender_id:
            session.sender_id = session.session_id
        self._sessions[session.session_id] = session
        self._by_sender[(channel, session.sender_id)] = session.session_id
        self._append(
            {
                "kind": "session",
                "session_id": session.session_id,
                "channel": channel.value,
                "sender_id": session.sender_id,
                "created": now.isoformat(),
            }
        )
        return session

    def append_turn(
        self, session: Session, turn: ChatTurn, message_id: str, response: dict
    ) -> None:
        self._responses[(session.sender_id, message_id)] = response
        self.counters.add_turn(
            channel=session.channel,
            modality=turn.modality,
            lang_code=turn.original_lang.code,
            refused=turn.refused,
        )
        self._append(
            {
                "kind": "turn",
                "session_id": session.session_id,
                "channel": session.channel.value,
                "sender_id": session.sender_id,
                "message_id": message_id,
                "turn": turn.to_dict(),
                "response": response,
            }
        )

    def cached_response(self, sender_id: str, message_id: str) -> dict | None:
        return self._responses.get((sender_id, message_id))

    def close(self) -> None:
        pass  # file handles are opened per append

    # -- journal ------------------------------------------------------------

    def _append(self, record: dict) -> None:
        line = json.dumps(record, ensure_ascii=False, separators=(",", ":")) + "\n"
        with self._journal_lock:
            self.journal_path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.journal_path, "ab") as fh:
                fh.write(line.encode("utf-8"))
                fh.flush()
                os.fsync(fh.fileno())

    def _replay(self) -> None:
        if not self.journal_path.exists():
            return
        data = self.journal_path.read_bytes()
        offset = 0
        valid_end = 0
        while offset < len(data):
            newline = data.find(b"\n", offset)
            if newline == -1:
                logger.warning(
                    "journal %s: dropping trailing partial line at byte %d",
                    self.journal_path,
                    offset,
                )
                break
            line = data[offset:newline]
            if line.strip():
                try:
                    record = json.loads(line)
                except ValueError as exc:
                    raise JournalCorruptionError(self.journal_path, offset, str(exc))
                self._apply(record, offset)
            offset = newline + 1
            valid_end = offset
        if valid_end < len(data):
            with open(self.journal_path, "r+b") as fh:
                fh.truncate(valid_end)

    def _apply(self, record: dict, offset: int) -> None:
        kind = record.get("kind")
        if kind == "session":
            session = Session(
                session_id=record["session_id"],
                channel=Channel(record["channel"]),
                sender_id=record["sender_id"],
                created=datetime.fromisoformat(record["created"]),
                last_active=datetime.fromisoformat(record["created"]),
            )
            self._sessions[session.session_id] = session
            self._by_sender[(session.channel, session.sender_id)] = session.session_id
        elif kind == "turn":
            session = self._sessions.get(record["session_id"])
            if session is None:
                raise JournalCorruptionError(
                    self.journal_path, offset, f"turn for unknown session {record['session_id']!r}"
                )
            turn = ChatTurn.from_dict(record["turn"])
            session.turns.append(turn)
            session.last_active = turn.timestamp
            self._responses[(record["sender_id"], record["message_id"])] = record[
                "response"
            ]
            self.counters.add_turn(
                channel=session.channel,
                modality=turn.modality,
                lang_code=turn.original_lang.code,
                refused=turn.refused,
            )
        elif kind == "complaint":
            self.counters.add_complaint()
        else:
            raise JournalCorruptionError(
                self.journal_path, offset, f"unknown record kind {kind!r}"
            )
