"""Prompt template file loading.

Templates live in a plain-text file with [qa] / [condense] / [refusal]
section markers so the exact prompt wording ships as data, not code. The QA
template must keep its refusal instruction and the condense template its
"Standalone question:" trailer; rendering is plain substring replacement so
braces inside retrieved text can never break it.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

CONTEXT_SEPARATOR = "\n\n---\n\n"

_SECTION_NAMES = ("qa", "condense", "refusal")


class TemplateError(Exception):
    pass


@dataclass(frozen=True)
class PromptTemplates:
    qa_template: str
    condense_template: str
    refusal_text: str

    def __post_init__(self) -> None:
        for placeholder in ("{context}", "{question}"):
            if placeholder not in self.qa_template:
                raise TemplateError(f"qa template is missing {placeholder}")
        for placeholder in ("{chat_history}", "{question}"):
            if placeholder not in self.condense_template:
                raise TemplateError(f"condense template is missing {placeholder}")
        if not self.refusal_text.strip():
            raise TemplateError("refusal text must be non-empty")


def parse_template_sections(text: str) -> dict[str, str]:
    sections: dict[str, list[str]] = {}
    current: list[str] | None = None
    for line in text.splitlines():
        stripped = line.strip()
        if stripped.startswith("[") and stripped.endswith("]"):
            name = stripped[1:-1]
            if name in sections:
                raise TemplateError(f"duplicate template section [{name}]")
            current = sections.setdefault(name, [])
            continue
        if current is not None:
            current.append(line)
    return {name: "\n".join(lines).strip("\n") for name, lines in sections.items()}


def load_templates(path: str | Path) -> PromptTemplates:
    sections = parse_template_sections(Path(path).read_text(encoding="utf-8"))
    missing = [name for name in _SECTION_NAMES if name not in sections]
    if missing:
        raise TemplateError(f"template file {path} is missing sections: {missing}")
    return PromptTemplates(
        qa_template=sections["qa"],
        condense_template=sections["condense"],
        refusal_text=sections["refusal"],
    )


def render(template: str, **values: str) -> str:
    """Replace {name} placeholders literally (no str.format brace parsing)."""
    out = template
    for name, value in values.items():
        out = out.replace("{" + name + "}", value)
    return out
