/** Typed client for the chat service's /v1 HTTP API. */

export interface ChatResponse {
  session_id: string;
  text: string;
  lang: string;
  audio_b64?: string;
  sources: string[];
  refused: boolean;
}

export interface TurnView {
  question_en: string;
  answer_en: string;
  original_text: string;
  delivered_text: string;
  lang: string;
  modality: "Text" | "Voice";
  sources: string[];
  refused: boolean;
  degraded: boolean;
  timestamp: string;
  retrieval_query_en: string;
}

export interface SessionView {
  session_id: string;
  channel: string;
  created: string;
  last_active: string;
  turns: TurnView[];
}

export class ApiError extends Error {
  constructor(message: string, readonly status: number) {
    super(message);
  }
}

type FetchLike = typeof fetch;

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (...args) => fetch(...args),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    if (!response.ok) {
      let detail = `HTTP ${response.status}`;
      try {
        const body = await response.json();
        if (body?.detail) detail = String(body.detail);
        if (body?.error?.message) detail = String(body.error.message);
      } catch {
        // keep the status line
      }
      throw new ApiError(detail, response.status);
    }
    return (await response.json()) as T;
  }

  sendText(text: string, sessionId: string | null): Promise<ChatResponse> {
    return this.request<ChatResponse>("/v1/chat", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(
        sessionId ? { session_id: sessionId, text } : { text },
      ),
    });
  }

  sendAudio(audioB64: string, sessionId: string | null): Promise<ChatResponse> {
    const payload: Record<string, string> = { audio_b64: audioB64, mime: "audio/wav" };
    if (sessionId) payload.session_id = sessionId;
    return this.request<ChatResponse>("/v1/chat", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  transcript(sessionId: string): Promise<SessionView> {
    return this.request<SessionView>(`/v1/sessions/${encodeURIComponent(sessionId)}`);
  }
}
