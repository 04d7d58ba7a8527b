"""WhatsApp-style webhook wire format.

Inbound: {"message_id", "from", "timestamp", "type": "text"|"audio",
          "text"?: {"body"}, "audio"?: {"id", "mime_type"}}
Outbound: {"to", "type", "text": {"body"}, "audio"?: {"b64", "mime_type"}}

Parsing is strict and reports the first offending field by name, so a
misconfigured sender can see exactly what broke.
"""

from __future__ import annotations

import base64
import json
from datetime import datetime

from .engine import Channel
from .pipeline import InboundMessage, MessageKind, OutboundMessage


class WebhookParseError(Exception):
    def __init__(self, field: str, message: str):
        super().__init__(f"field {field!r}: {message}")
        self.field = field


class UnsupportedTypeError(WebhookParseError):
    def __init__(self, type_value: str):
        super().__init__("type", f"unsupported message type {type_value!r}")
        self.type_value = type_value


def _require_str(payload: dict, fieldname: str) -> str:
    value = payload.get(fieldname)
    if not isinstance(value, str) or not value:
        raise WebhookParseError(fieldname, "required non-empty string")
    return value


def _parse_timestamp(value: str) -> datetime:
    try:
        return datetime.fromisoformat(value.replace("Z", "+00:00"))
    except ValueError:
        raise WebhookParseError("timestamp", f"not an RFC 3339 timestamp: {value!r}")


def webhook_parse(body: bytes) -> InboundMessage:
    try:
        payload = json.loads(body)
    except ValueError:
        raise WebhookParseError("body", "payload is not valid JSON")
    if not isinstance(payload, dict):
        raise WebhookParseError("body", "payload must be a JSON object")

    message_id = _require_str(payload, "message_id")
    sender = _require_str(payload, "from")
    timestamp = _parse_timestamp(_require_str(payload, "timestamp"))
    msg_type = _require_str(payload, "type")

    if msg_type == "text":
        text_obj = payload.get("text")
        if not isinstance(text_obj, dict):
            raise WebhookParseError("text", "required object with a 'body' field")
        body_text = text_obj.get("body")
        if not isinstance(body_text, str) or not body_text:
            raise WebhookParseError("text.body", "required non-empty string")
        return InboundMessage(
            channel=Channel.WEBHOOK,
            sender_id=sender,
            message_id=message_id,
            kind=MessageKind.TEXT,
            text=body_text,
            timestamp=timestamp,
        )

    if msg_type == "audio":
        audio_obj = payload.get("audio")
        if not isinstance(audio_obj, dict):
            raise WebhookParseError("audio", "required object with an 'id' field")
        media_id = audio_obj.get("id")
        if not isinstance(media_id, str) or not media_id:
            raise WebhookParseError("audio.id", "required non-empty string")
        return InboundMessage(
            channel=Channel.WEBHOOK,
            sender_id=sender,
            message_id=message_id,
            kind=MessageKind.AUDIO,
            media_ref=media_id,
            timestamp=timestamp,
        )

    raise UnsupportedTypeError(msg_type)


def outbound_to_webhook(out: OutboundMessage) -> dict:
    response: dict = {
        "to": out.recipient_id,
        "type": "audio" if out.audio is not None else "text",
        "text": {"body": out.text},
    }
    if out.audio is not None:
        response["audio"] = {
            "b64": base64.b64encode(out.audio.data).decode("ascii"),
            "mime_type": out.audio.mime,
        }
    return response
