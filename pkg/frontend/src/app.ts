/**
 * Chat UI: a pure client over the /v1 API. All language routing and
 * grounding decisions happen server-side; this file only renders what the
 * API returns, and every piece of state can be rebuilt from the session
 * transcript endpoint.
 */

import { ApiClient, ChatResponse, TurnView } from "./api.js";
import {
  RecorderFactory,
  RecorderLike,
  base64ToBlobUrl,
  bufferToBase64,
  encodeWavPcm16,
  startMicrophoneRecorder,
} from "./audio.js";
import { DEMO_VOICE_NOTE_B64, DEMO_VOICE_NOTE_LABEL } from "./fixtures.js";
import { directionFor } from "./rtl.js";

const SESSION_KEY = "polyrag.session_id";

export interface AppDeps {
  api: ApiClient;
  storage: Storage;
  recorderFactory?: RecorderFactory;
}

interface BubbleContent {
  direction: "user" | "assistant";
  text: string;
  lang?: string;
  audioUrl?: string;
  sources?: string[];
  refused?: boolean;
  pending?: boolean;
  timestamp?: string;
  detail?: string;
}

export class ChatApp {
  private sessionId: string | null;
  private inFlight = false;
  private recorder: RecorderLike | null = null;

  private readonly messages: HTMLElement;
  private readonly input: HTMLInputElement;
  private readonly sendButton: HTMLButtonElement;
  private readonly micButton: HTMLButtonElement;
  private readonly demoButton: HTMLButtonElement;
  private readonly notice: HTMLElement;

  constructor(
    private readonly root: HTMLElement,
    private readonly deps: AppDeps,
  ) {
    this.sessionId = deps.storage.getItem(SESSION_KEY);
    root.innerHTML = `
      <main class="chat">
        <header class="chat-header">
          <h1>polyrag</h1>
          <span class="session-label" data-role="session"></span>
        </header>
        <section class="messages" data-role="messages" aria-live="polite"></section>
        <p class="notice" data-role="notice" hidden></p>
        <footer class="composer">
          <input data-role="input" type="text" autocomplete="off"
                 placeholder="Ask about the handbook in any language…" />
          <button data-role="send" type="button">Send</button>
          <button data-role="mic" type="button" title="Record a voice note">🎙</button>
          <button data-role="demo" type="button">${DEMO_VOICE_NOTE_LABEL}</button>
        </footer>
      </main>`;
    this.messages = this.query("messages");
    this.input = this.query<HTMLInputElement>("input");
    this.sendButton = this.query<HTMLButtonElement>("send");
    this.micButton = this.query<HTMLButtonElement>("mic");
    this.demoButton = this.query<HTMLButtonElement>("demo");
    this.notice = this.query("notice");

    this.sendButton.addEventListener("click", () => void this.sendText());
    this.input.addEventListener("keydown", (event) => {
      if ((event as KeyboardEvent).key === "Enter") void this.sendText();
    });
    this.micButton.addEventListener("click", () => void this.toggleRecording());
    this.demoButton.addEventListener("click", () => void this.sendDemoVoiceNote());
  }

  private query<T extends HTMLElement = HTMLElement>(role: string): T {
    return this.root.querySelector(`[data-role="${role}"]`) as T;
  }

  /** Rebuild the conversation from the server-side transcript. */
  async restoreTranscript(): Promise<void> {
    this.messages.innerHTML = "";
    if (!this.sessionId) {
      this.renderEmptyState();
      return;
    }
    try {
      const session = await this.deps.api.transcript(this.sessionId);
      if (session.turns.length === 0) {
        this.renderEmptyState();
        return;
      }
      for (const turn of session.turns) this.renderTurn(turn);
    } catch {
      // stale or expired session id: start fresh
      this.deps.storage.removeItem(SESSION_KEY);
      this.sessionId = null;
      this.renderEmptyState();
    }
    this.refreshSessionLabel();
  }

  private renderEmptyState(): void {
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.textContent = "No messages yet. Say something!";
    this.messages.appendChild(empty);
  }

  private clearEmptyState(): void {
    this.messages.querySelector(".empty-state")?.remove();
  }

  private refreshSessionLabel(): void {
    this.query("session").textContent = this.sessionId
      ? `session ${this.sessionId.slice(0, 8)}`
      : "new session";
  }

  private setBusy(busy: boolean): void {
    this.inFlight = busy;
    this.input.disabled = busy;
    this.sendButton.disabled = busy;
    this.demoButton.disabled = busy;
  }

  private showNotice(text: string): void {
    this.notice.textContent = text;
    this.notice.hidden = false;
  }

  private clearNotice(): void {
    this.notice.hidden = true;
    this.notice.textContent = "";
  }

  private bubble(content: BubbleContent): HTMLElement {
    this.clearEmptyState();
    const article = document.createElement("article");
    article.className = `bubble ${content.direction}`;
    if (content.refused) article.classList.add("refused");
    if (content.pending) article.classList.add("pending");

    const text = document.createElement("p");
    text.className = "bubble-text";
    text.textContent = content.text;
    text.dir = directionFor(content.lang);
    article.appendChild(text);

    if (content.audioUrl) {
      const player = document.createElement("audio");
      player.controls = true;
      player.src = content.audioUrl;
      article.appendChild(player);
    }

    const meta = document.createElement("footer");
    meta.className = "bubble-meta";
    if (content.lang) {
      const badge = document.createElement("span");
      badge.className = "lang-badge";
      badge.textContent = content.lang;
      meta.appendChild(badge);
    }
    if (content.timestamp) {
      const stamp = document.createElement("time");
      stamp.textContent = new Date(content.timestamp).toLocaleTimeString();
      meta.appendChild(stamp);
    }
    article.appendChild(meta);

    if (content.sources && content.sources.length > 0) {
      const details = document.createElement("details");
      details.className = "sources";
      const summary = document.createElement("summary");
      summary.textContent = `sources: ${content.sources.join(", ")}`;
      details.appendChild(summary);
      if (content.detail) {
        const grounding = document.createElement("p");
        grounding.className = "grounding";
        grounding.textContent = content.detail;
        details.appendChild(grounding);
      }
      article.appendChild(details);
    }

    this.messages.appendChild(article);
    this.messages.scrollTop = this.messages.scrollHeight;
    return article;
  }

  private renderTurn(turn: TurnView): void {
    this.bubble({
      direction: "user",
      text: turn.original_text,
      lang: turn.lang,
      timestamp: turn.timestamp,
    });
    this.bubble({
      direction: "assistant",
      text: turn.delivered_text || turn.answer_en,
      lang: turn.lang,
      refused: turn.refused,
      sources: turn.sources,
      timestamp: turn.timestamp,
      detail: `English answer: ${turn.answer_en} — retrieved with: ${turn.retrieval_query_en}`,
    });
  }

  private adoptResponse(response: ChatResponse): void {
    this.sessionId = response.session_id;
    this.deps.storage.setItem(SESSION_KEY, response.session_id);
    this.refreshSessionLabel();
  }

  async sendText(): Promise<void> {
    const text = this.input.value.trim();
    if (!text || this.inFlight) return;
    this.clearNotice();
    this.setBusy(true);
    this.bubble({ direction: "user", text });
    const pending = this.bubble({
      direction: "assistant",
      text: "…",
      pending: true,
    });
    try {
      const response = await this.deps.api.sendText(text, this.sessionId);
      pending.remove();
      this.adoptResponse(response);
      this.renderResponse(response);
      this.input.value = "";
    } catch (error) {
      pending.remove();
      this.showNotice(`Could not send: ${String(error)} — press Send to retry.`);
    } finally {
      this.setBusy(false);
    }
  }

  private renderResponse(response: ChatResponse): void {
    this.bubble({
      direction: "assistant",
      text: response.text,
      lang: response.lang,
      refused: response.refused,
      sources: response.sources,
      audioUrl: response.audio_b64 ? base64ToBlobUrl(response.audio_b64) : undefined,
    });
  }

  private async sendAudioB64(audioB64: string, userLabel: string): Promise<void> {
    if (this.inFlight) return;
    this.clearNotice();
    this.setBusy(true);
    this.bubble({
      direction: "user",
      text: userLabel,
      audioUrl: base64ToBlobUrl(audioB64),
    });
    const pending = this.bubble({ direction: "assistant", text: "…", pending: true });
    try {
      const response = await this.deps.api.sendAudio(audioB64, this.sessionId);
      pending.remove();
      this.adoptResponse(response);
      this.renderResponse(response);
    } catch (error) {
      pending.remove();
      this.showNotice(`Voice message failed: ${String(error)}`);
    } finally {
      this.setBusy(false);
    }
  }

  async sendDemoVoiceNote(): Promise<void> {
    await this.sendAudioB64(DEMO_VOICE_NOTE_B64, "🎙 demo voice note");
  }

  async toggleRecording(): Promise<void> {
    if (this.recorder) {
      const take = await this.recorder.stop();
      this.recorder = null;
      this.micButton.classList.remove("recording");
      this.micButton.textContent = "🎙";
      const wav = encodeWavPcm16(take.samples, take.sampleRate);
      await this.sendAudioB64(bufferToBase64(wav), "🎙 voice message");
      return;
    }
    const factory = this.deps.recorderFactory ?? startMicrophoneRecorder;
    try {
      this.recorder = await factory();
    } catch {
      this.micButton.disabled = true;
      this.showNotice(
        "Microphone unavailable or permission denied — text chat still works.",
      );
      return;
    }
    this.micButton.classList.add("recording");
    this.micButton.textContent = "⏹";
  }
}

export async function mountChatApp(root: HTMLElement, deps: AppDeps): Promise<ChatApp> {
  const app = new ChatApp(root, deps);
  await app.restoreTranscript();
  return app;
}
