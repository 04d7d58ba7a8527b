// @vitest-environment happy-dom
// @vitest-environment-options { "url": "http://127.0.0.1:8891" }
/**
 * End-to-end UI flow against a real service process with mock providers:
 * text question -> grounded reply with sources, off-corpus question ->
 * distinct refusal styling, voice note -> playable audio reply, and a
 * remount (page reload) rebuilding the transcript. Skips itself when the
 * polyrag CLI is not installed. The environment URL above keeps happy-dom's
 * same-origin policy satisfied for the live service.
 */

import { execFileSync, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { mountChatApp } from "../src/app.js";

const PORT = 8891;
const BASE = `http://127.0.0.1:${PORT}`;

function cliAvailable(): boolean {
  try {
    execFileSync("polyrag", ["--help"], { stdio: "ignore" });
    return true;
  } catch {
    return false;
  }
}

const available = cliAvailable();

if (typeof URL.createObjectURL !== "function") {
  (URL as unknown as { createObjectURL: (b: Blob) => string }).createObjectURL = () =>
    "blob:stub";
}

class MemoryStorage implements Storage {
  private map = new Map<string, string>();
  get length() {
    return this.map.size;
  }
  clear() {
    this.map.clear();
  }
  getItem(key: string) {
    return this.map.has(key) ? (this.map.get(key) as string) : null;
  }
  key(index: number) {
    return [...this.map.keys()][index] ?? null;
  }
  removeItem(key: string) {
    this.map.delete(key);
  }
  setItem(key: string, value: string) {
    this.map.set(key, value);
  }
}

async function waitForHealth(timeoutMs: number): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const res = await fetch(`${BASE}/v1/health`);
      if (res.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error("service did not become healthy in time");
}

describe.runIf(available)("UI against a live service", () => {
  let server: ChildProcess;

  beforeAll(async () => {
    const dir = mkdtempSync(join(tmpdir(), "polyrag-ui-e2e-"));
    const demoCorpus = execFileSync("python3", [
      "-c",
      "from polyrag.config import data_path; print(data_path('demo_corpus'))",
    ])
      .toString()
      .trim();
    execFileSync("polyrag", [
      "ingest",
      "--root",
      demoCorpus,
      "--out",
      join(dir, "chunks.jsonl"),
    ]);
    writeFileSync(
      join(dir, "config.yaml"),
      [
        `chunk_store: ${join(dir, "chunks.jsonl")}`,
        `journal_path: ${join(dir, "journal.jsonl")}`,
        "listen_host: 127.0.0.1",
        `listen_port: ${PORT}`,
        "",
      ].join("\n"),
    );
    server = spawn("polyrag", ["serve", "--config", join(dir, "config.yaml")], {
      stdio: "ignore",
    });
    await waitForHealth(20_000);
  }, 30_000);

  afterAll(() => {
    server?.kill();
  });

  it("runs the full text/refusal/voice/reload flow", async () => {
    const storage = new MemoryStorage();
    const api = new ApiClient(BASE, (...args) => fetch(...args));

    document.body.innerHTML = '<div id="app"></div>';
    const root = document.getElementById("app")!;
    const app = await mountChatApp(root, { api, storage });

    // 1. off-corpus question on a fresh session: refused, styled distinctly
    //    (first turn, so no follow-up condensation can pull in history)
    const input = root.querySelector<HTMLInputElement>('[data-role="input"]')!;
    input.value = "zxcvq wqxzk plmokn";
    await app.sendText();
    let assistant = [...root.querySelectorAll(".bubble.assistant")].pop()!;
    expect(assistant.classList.contains("refused")).toBe(true);
    expect(storage.getItem("polyrag.session_id")).toBeTruthy();

    // 2. grounded text question with sources
    input.value = "how many days of paid annual leave do employees receive";
    await app.sendText();
    assistant = [...root.querySelectorAll(".bubble.assistant")].pop()!;
    expect(assistant.textContent).toContain("20 days");
    expect(assistant.classList.contains("refused")).toBe(false);
    expect(assistant.querySelector(".sources")!.textContent).toContain("leave_policy");

    // 3. voice note through the real pipeline yields a playable reply
    await app.sendDemoVoiceNote();
    assistant = [...root.querySelectorAll(".bubble.assistant")].pop()!;
    const player = assistant.querySelector("audio");
    expect(player).toBeTruthy();
    expect(player!.src).toBeTruthy();
    const badge = assistant.querySelector(".lang-badge")!;
    expect(badge.textContent).toBe("ur");

    // 4. reload: a fresh mount rebuilds all turns from the transcript
    document.body.innerHTML = '<div id="app"></div>';
    const reloaded = document.getElementById("app")!;
    await mountChatApp(reloaded, { api, storage });
    const bubbles = [...reloaded.querySelectorAll(".bubble")];
    expect(bubbles).toHaveLength(6); // three turns, two bubbles each
    expect(bubbles[1].classList.contains("refused")).toBe(true);
    expect(bubbles[5].querySelector(".lang-badge")!.textContent).toBe("ur");
  }, 30_000);
});
