"""LLM provider interface and the deterministic reference implementation.

The mock LLM answers QA prompts extractively: it returns the context
sentence sharing the most tokens with the question, or the refusal text when
nothing overlaps. With always_answer=True it never refuses (it falls back to
the first context sentence), which models a model prompted without any
refusal instruction. Condense prompts get the follow-up plus the salient
tokens of the most recent turn, so a standalone question provably carries
history into retrieval.
"""

from __future__ import annotations

from typing import Protocol

from .templates import CONTEXT_SEPARATOR
from .text import sentence_spans, tokenize

_SALIENT_MIN_LEN = 4


class LLMError(Exception):
    pass


class MockLLMError(LLMError):
    pass


class LLMProvider(Protocol):
    name: str

    def complete(self, prompt: str) -> str: ...


class FailingLLM:
    """Always raises; used to exercise degraded-mode handling."""

    name = "failing-llm"

    def complete(self, prompt: str) -> str:
        raise LLMError("provider outage (simulated)")


def _context_sentences(context: str) -> list[str]:
    sentences = []
    for block in context.split(CONTEXT_SEPARATOR):
        for start, end in sentence_spans(block):
            sentence = block[start:end].strip()
            if sentence:
                sentences.append(sentence)
    return sentences


def _salient_tokens(text: str) -> list[str]:
    seen = []
    for token in tokenize(text):
        if len(token) >= _SALIENT_MIN_LEN and token not in seen:
            seen.append(token)
    return seen


class MockLLM:
    name = "mock-llm"

    def __init__(self, refusal_text: str, *, always_answer: bool = False):
        self.refusal_text = refusal_text
        self.always_answer = always_answer

    def complete(self, prompt: str) -> str:
        if "Follow-Up Input: " in prompt and "Standalone question:" in prompt:
            return self._condense(prompt)
        if "\nQuestion: " in prompt:
            return self._answer(prompt)
        raise MockLLMError("prompt matches neither the QA nor the condense shape")

    def _answer(self, prompt: str) -> str:
        head, _, question_part = prompt.rpartition("\nQuestion: ")
        question_tokens = set(tokenize(question_part))
        _, _, context = head.partition("\n\n")
        sentences = _context_sentences(context)
        if not sentences:
            return self.refusal_text

        best_idx, best_overlap = 0, -1
        for i, sentence in enumerate(sentences):
            overlap = len(question_tokens & set(tokenize(sentence)))
            if overlap > best_overlap:
                best_idx, best_overlap = i, overlap
        if best_overlap == 0 and not self.always_answer:
            return self.refusal_text
        return sentences[best_idx]

    def _condense(self, prompt: str) -> str:
        before_marker, _, _ = prompt.rpartition("\nStandalone question:")
        history_part, _, follow_up = before_marker.rpartition("\nFollow-Up Input: ")
        follow_up = follow_up.strip()

        last_turn_text = ""
        human, assistant = None, None
        for line in history_part.splitlines():
            if line.startswith("Human: "):
                human, assistant = line[len("Human: ") :], None
            elif line.startswith("Assistant: "):
                assistant = line[len("Assistant: ") :]
        if human is not None:
            last_turn_text = human + " " + (assistant or "")

        salient = _salient_tokens(last_turn_text)
        if not salient:
            return follow_up
        return follow_up + " " + " ".join(salient)
