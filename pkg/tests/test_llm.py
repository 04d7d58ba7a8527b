import pytest

from polyrag.config import data_path
from polyrag.llm import MockLLM, MockLLMError
from polyrag.templates import load_templates, render

TEMPLATES = load_templates(data_path("templates.txt"))
REFUSAL = TEMPLATES.refusal_text


def qa_prompt(context: str, question: str) -> str:
    return render(TEMPLATES.qa_template, context=context, question=question)


def condense_prompt(history: str, question: str) -> str:
    return render(TEMPLATES.condense_template, chat_history=history, question=question)


def test_qa_returns_highest_overlap_sentence():
    # By hand: "how many leave days" tokens {how,many,leave,days};
    # sentence 1 overlaps {leave, days} = 2, sentence 2 overlaps 0.
    llm = MockLLM(REFUSAL)
    prompt = qa_prompt("Leave is 20 days. Offices close Friday.", "how many leave days")
    assert llm.complete(prompt) == "Leave is 20 days."


def test_qa_zero_overlap_refuses():
    llm = MockLLM(REFUSAL)
    prompt = qa_prompt("Leave is 20 days.", "orbital mechanics")
    assert llm.complete(prompt) == REFUSAL


def test_qa_always_answer_never_refuses():
    llm = MockLLM(REFUSAL, always_answer=True)
    prompt = qa_prompt("Leave is 20 days. Offices close Friday.", "orbital mechanics")
    assert llm.complete(prompt) == "Leave is 20 days."


def test_qa_deterministic():
    llm = MockLLM(REFUSAL)
    prompt = qa_prompt("Leave is 20 days. Leave rolls over.", "leave days")
    assert llm.complete(prompt) == llm.complete(prompt)


def test_qa_tie_breaks_to_earlier_sentence():
    llm = MockLLM(REFUSAL)
    prompt = qa_prompt("Alpha beta here. Alpha beta there.", "alpha beta")
    assert llm.complete(prompt) == "Alpha beta here."


def test_condense_appends_salient_tokens_of_last_turn():
    llm = MockLLM(REFUSAL)
    history = (
        "Human: What is the leave policy?\n"
        "Assistant: 20 days annually"
    )
    prompt = condense_prompt(history, "What about for contractors?")
    out = llm.complete(prompt)
    assert out.startswith("What about for contractors?")
    assert "leave" in out and "contractors" in out.lower()
    # salient tokens are length >= 4, deduplicated, first-appearance order
    assert out == "What about for contractors? what leave policy days annually"


def test_condense_empty_history_returns_follow_up():
    llm = MockLLM(REFUSAL)
    prompt = condense_prompt("", "standalone already?")
    assert llm.complete(prompt) == "standalone already?"


def test_unrecognized_prompt_shape_errors():
    llm = MockLLM(REFUSAL)
    with pytest.raises(MockLLMError):
        llm.complete("free-form prompt with no markers")
