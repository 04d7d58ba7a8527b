import base64
import json

import pytest
from fastapi.testclient import TestClient

from polyrag.api import create_app
from polyrag.language import tag_for_code
from polyrag.speech import MockTextToSpeech, decode_mock_wav


@pytest.fixture()
def client(make_state):
    return TestClient(create_app(make_state()))


def wav_b64(text: str, lang: str = "en") -> str:
    blob = MockTextToSpeech().synthesize(text, tag_for_code(lang))
    return base64.b64encode(blob.data).decode("ascii")


def webhook_body(message_id: str, sender: str = "u1", text: str = "hi", **overrides):
    payload = {
        "message_id": message_id,
        "from": sender,
        "timestamp": "2024-01-01T00:00:00Z",
        "type": "text",
        "text": {"body": text},
    }
    payload.update(overrides)
    return payload


def test_health_reports_index_size(client):
    response = client.get("/v1/health")
    assert response.status_code == 200
    body = response.json()
    assert body["status"] == "ok" and body["index_size"] > 0


def test_chat_text_grounded_answer(client):
    response = client.post(
        "/v1/chat", json={"text": "how many days of paid annual leave do employees receive"}
    )
    assert response.status_code == 200
    body = response.json()
    assert body["refused"] is False
    assert body["lang"] == "en"
    assert "20 days" in body["text"]
    assert body["sources"]
    assert "audio_b64" not in body  # text in -> no audio out


def test_chat_session_id_reused(client):
    first = client.post("/v1/chat", json={"text": "when are salaries paid"}).json()
    second = client.post(
        "/v1/chat",
        json={"session_id": first["session_id"], "text": "who approves travel requests"},
    ).json()
    assert second["session_id"] == first["session_id"]
    transcript = client.get(f"/v1/sessions/{first['session_id']}").json()
    assert len(transcript["turns"]) == 2


def test_chat_audio_roundtrip_has_audio_reply(client):
    response = client.post(
        "/v1/chat",
        json={"audio_b64": wav_b64("تنخواہیں کب ادا کی جاتی ہیں؟", "ur"), "mime": "audio/wav"},
    )
    assert response.status_code == 200
    body = response.json()
    assert body["lang"] == "ur"
    assert body["audio_b64"]
    payload = decode_mock_wav(base64.b64decode(body["audio_b64"]))
    assert payload.rstrip(b"\x00").decode("utf-8").startswith("ur|")


def test_chat_requires_exactly_one_payload(client):
    assert client.post("/v1/chat", json={}).status_code == 400
    assert (
        client.post("/v1/chat", json={"text": "x", "audio_b64": "AAAA"}).status_code == 400
    )


def test_chat_rejects_bad_base64_and_bad_wav(client):
    assert (
        client.post("/v1/chat", json={"audio_b64": "!!!not-base64"}).status_code == 400
    )
    garbage = base64.b64encode(b"OGG" + b"\x00" * 64).decode()
    assert client.post("/v1/chat", json={"audio_b64": garbage}).status_code == 400


def test_unknown_session_404(client):
    assert client.get("/v1/sessions/nope").status_code == 404
    assert client.post("/v1/chat", json={"session_id": "nope", "text": "x"}).status_code == 404


def test_webhook_text_flow(client):
    response = client.post("/webhook/messages", json=webhook_body("m1", text="when are salaries paid"))
    assert response.status_code == 200
    body = response.json()
    assert body["to"] == "u1" and body["type"] == "text"
    assert "last working day" in body["text"]["body"]


def test_webhook_idempotent_duplicate_byte_identical(client):
    first = client.post("/webhook/messages", json=webhook_body("m2", text="when are salaries paid"))
    again = client.post("/webhook/messages", json=webhook_body("m2", text="when are salaries paid"))
    assert first.content == again.content
    # one logged turn for the sender's session
    analytics = client.get("/v1/analytics").json()
    assert analytics["conversations_per_channel"]["Webhook"] == 1


def test_webhook_malformed_names_field(client):
    payload = webhook_body("m3")
    del payload["from"]
    response = client.post("/webhook/messages", json=payload)
    assert response.status_code == 400
    assert response.json()["error"]["field"] == "from"


def test_webhook_audio_media_reference(client, make_state, tmp_path):
    state = client.app.state.service
    media_dir = state.pipeline.media_dir
    blob = MockTextToSpeech().synthesize("when are salaries paid", tag_for_code("en"))
    (media_dir / "voice-1.wav").write_bytes(blob.data)
    response = client.post(
        "/webhook/messages",
        json=webhook_body(
            "m4", type="audio", audio={"id": "voice-1.wav", "mime_type": "audio/wav"}
        ),
    )
    assert response.status_code == 200
    body = response.json()
    assert body["type"] == "audio"
    assert "last working day" in body["text"]["body"]
    assert body["audio"]["b64"]


def test_webhook_unknown_media_is_400(client):
    response = client.post(
        "/webhook/messages",
        json=webhook_body("m5", type="audio", audio={"id": "ghost.wav", "mime_type": "audio/wav"}),
    )
    assert response.status_code == 400


def test_webhook_token_enforced(make_state):
    state = make_state(webhook_token="sekrit")
    client = TestClient(create_app(state))
    res = client.post("/webhook/messages", json=webhook_body("m1"))
    assert res.status_code == 403
    res = client.post(
        "/webhook/messages", json=webhook_body("m1"), headers={"X-Webhook-Token": "sekrit"}
    )
    assert res.status_code == 200


def test_analytics_incremental_matches_recomputed(client):
    client.post("/v1/chat", json={"text": "when are salaries paid"})
    client.post("/webhook/messages", json=webhook_body("m9", text="who approves travel requests"))
    live = client.get("/v1/analytics").json()
    recomputed = client.get("/v1/analytics/recomputed").json()
    assert live == recomputed
    assert live["total_conversations"] == 2


def test_refused_question_flagged(client):
    # vocabulary fully disjoint from the demo corpus, verified refused
    response = client.post(
        "/v1/chat", json={"text": "zxcvq wqxzk plmokn"}
    )
    body = response.json()
    assert body["refused"] is True
    assert body["sources"] == []
