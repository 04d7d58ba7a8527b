"""Evaluation harness: chunking, prompt, and provider-selection comparisons.

Runs the comparison experiments at desk scale on a labeled synthetic corpus
and emits one report per table (markdown + CSV). Reports are deterministic
given the corpus, fixtures, and seed; wall-clock latency is measured and
printed but written into the table files only when explicitly requested,
so default output is byte-reproducible.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from .chunking import Chunk, ChunkParams, Strategy, chunk_text
from .config import data_path
from .corpus import Document
from .embedding import EmptyTextError, HashedBagOfWordsEmbedder
from .index import VectorIndex
from .llm import MockLLM
from .providers import Capability, load_provider_profiles, select_provider
from .templates import CONTEXT_SEPARATOR, load_templates, render
from .text import sentence_spans, tokenize


class EvalError(Exception):
    pass


@dataclass
class QAPair:
    question: str
    in_context: bool
    expected_doc_id: str = ""
    expected_span: tuple[int, int] | None = None
    expected_chunk_ids: list[str] = field(default_factory=list)
    expected_answer_substring: str = ""

    def __post_init__(self) -> None:
        if self.in_context and not self.expected_chunk_ids:
            raise EvalError("in-context QA pairs must name expected chunks")

    def to_dict(self) -> dict:
        return {
            "question": self.question,
            "in_context": self.in_context,
            "expected_doc_id": self.expected_doc_id,
            "expected_span": list(self.expected_span) if self.expected_span else None,
            "expected_chunk_ids": list(self.expected_chunk_ids),
            "expected_answer_substring": self.expected_answer_substring,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "QAPair":
        span = data.get("expected_span")
        return cls(
            question=data["question"],
            in_context=data["in_context"],
            expected_doc_id=data.get("expected_doc_id", ""),
            expected_span=tuple(span) if span else None,
            expected_chunk_ids=list(data.get("expected_chunk_ids", [])),
            expected_answer_substring=data.get("expected_answer_substring", ""),
        )


def load_qa_pairs(path: str | Path) -> list[QAPair]:
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                pairs.append(QAPair.from_dict(json.loads(line)))
    return pairs


def write_qa_pairs(pairs: list[QAPair], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for pair in pairs:
            fh.write(json.dumps(pair.to_dict(), ensure_ascii=False, separators=(",", ":")))
            fh.write("\n")


@dataclass
class EvalReport:
    name: str  # file stem, e.g. "table1"
    title: str
    columns: list[str]
    rows: list[dict]


# -- metrics -----------------------------------------------------------------


def chunk_coherence(chunks: list[Chunk]) -> float:
    """Mean adjacent-sentence token-overlap Jaccard over chunks with at
    least two sentences; single-sentence chunks carry no adjacency evidence
    and are skipped."""
    per_chunk = []
    for chunk in chunks:
        spans = sentence_spans(chunk.text)
        token_sets = [
            set(tokenize(chunk.text[s:e])) for s, e in spans if chunk.text[s:e].strip()
        ]
        if len(token_sets) < 2:
            continue
        scores = []
        for left, right in zip(token_sets, token_sets[1:]):
            union = left | right
            scores.append(len(left & right) / len(union) if union else 0.0)
        per_chunk.append(sum(scores) / len(scores))
    return sum(per_chunk) / len(per_chunk) if per_chunk else 0.0


def _span_overlaps(chunk: Chunk, doc_id: str, span: tuple[int, int]) -> bool:
    return (
        chunk.doc_id == doc_id
        and max(chunk.char_start, span[0]) < min(chunk.char_end, span[1])
    )


def hit_at_k(
    index: VectorIndex, qa_pairs: list[QAPair], k: int
) -> float:
    """Fraction of in-context questions whose expected span overlaps a
    top-k retrieved chunk."""
    in_context = [q for q in qa_pairs if q.in_context]
    if not in_context:
        return 0.0
    hits = 0
    for pair in in_context:
        try:
            results = index.search_text(pair.question, k)
        except EmptyTextError:
            continue
        assert pair.expected_span is not None
        if any(
            _span_overlaps(sc.chunk, pair.expected_doc_id, pair.expected_span)
            for sc in results
        ):
            hits += 1
    return hits / len(in_context)


# -- table 1: chunking strategies ---------------------------------------------

_STRATEGY_LABELS = {
    Strategy.PARAGRAPH: "Paragraph-Based",
    Strategy.SEMANTIC_UNIT: "Semantic Unit Identification",
    Strategy.TOPIC: "Topic Modeling",
    Strategy.ENTITY: "Entity-Based",
    Strategy.FIXED_WINDOW: "Fixed Window",
}

TABLE1_COLUMNS = ["Chunking Strategy", "Chunk Size", "Coherence", "Relevance"]


def eval_chunking(
    documents: list[Document],
    strategies: list[Strategy],
    qa_pairs: list[QAPair],
    k: int = 4,
    params: ChunkParams | None = None,
    *,
    entity_lexicon: list[str] | None = None,
    topic_k: int = 5,
) -> EvalReport:
    params = params or ChunkParams()
    if entity_lexicon is None:
        entity_lexicon = [
            line.strip()
            for line in data_path("entity_lexicon.txt").read_text("utf-8").splitlines()
            if line.strip()
        ]
    embedder = HashedBagOfWordsEmbedder()
    rows = []
    for strategy in strategies:
        chunks: list[Chunk] = []
        for doc in documents:
            chunks.extend(
                chunk_text(
                    doc.text,
                    strategy,
                    params,
                    doc_id=doc.doc_id,
                    entity_lexicon=entity_lexicon,
                    topic_k=topic_k,
                )
            )
        if not chunks:
            rows.append(
                {
                    "Chunking Strategy": _STRATEGY_LABELS[strategy],
                    "Chunk Size": params.size,
                    "Coherence": "invalid",
                    "Relevance": "invalid",
                }
            )
            continue
        index = VectorIndex.build(chunks, embedder)
        rows.append(
            {
                "Chunking Strategy": _STRATEGY_LABELS[strategy],
                "Chunk Size": params.size,
                "Coherence": chunk_coherence(chunks),
                "Relevance": hit_at_k(index, qa_pairs, k),
            }
        )
    rows.sort(
        key=lambda r: (
            -(r["Relevance"] if isinstance(r["Relevance"], float) else -1.0),
            r["Chunking Strategy"],
        )
    )
    return EvalReport(
        name="table1",
        title="Comparison of Chunking Strategies",
        columns=TABLE1_COLUMNS,
        rows=rows,
    )


# -- table 2: prompt strategies ------------------------------------------------


@dataclass
class PromptVariant:
    name: str
    label: str
    template: str
    use_guard: bool
    always_answer: bool


def default_prompt_variants() -> list[PromptVariant]:
    templates = load_templates(data_path("templates.txt"))
    return [
        PromptVariant(
            name="standard",
            label="Standard Prompt",
            template=data_path("prompts", "standard.txt").read_text("utf-8").strip("\n"),
            use_guard=False,
            always_answer=True,
        ),
        PromptVariant(
            name="chain_of_thought",
            label="Chain-of-Thought Prompt",
            template=data_path("prompts", "chain_of_thought.txt")
            .read_text("utf-8")
            .strip("\n"),
            use_guard=False,
            always_answer=False,
        ),
        PromptVariant(
            name="final_qa",
            label="Final QA Prompt",
            template=templates.qa_template,
            use_guard=True,
            always_answer=False,
        ),
    ]


TABLE2_COLUMNS = [
    "Prompt Strategy",
    "Hallucination Rate",
    "Answer Accuracy",
    "Mean Latency (ms)",
]


@dataclass
class VariantOutcome:
    label: str
    hallucination_rate: float
    answer_accuracy: float
    mean_latency_ms: float
    answers: dict[str, str]


def run_prompt_variant(
    variant: PromptVariant,
    qa_pairs: list[QAPair],
    index: VectorIndex,
    refusal_text: str,
    *,
    k: int = 4,
    grounding_threshold: float = 0.15,
) -> VariantOutcome:
    llm = MockLLM(refusal_text, always_answer=variant.always_answer)
    answers: dict[str, str] = {}
    latencies: list[float] = []
    for pair in qa_pairs:
        started = time.perf_counter()
        try:
            results = index.search_text(pair.question, k)
        except EmptyTextError:
            results = []
        if not results or (
            variant.use_guard and results[0].score < grounding_threshold
        ):
            answer = refusal_text
        else:
            context = CONTEXT_SEPARATOR.join(sc.chunk.text for sc in results)
            prompt = render(variant.template, context=context, question=pair.question)
            answer = llm.complete(prompt).strip()
        latencies.append(time.perf_counter() - started)
        answers[pair.question] = answer

    out_context = [q for q in qa_pairs if not q.in_context]
    in_context = [q for q in qa_pairs if q.in_context]
    hallucinated = sum(1 for q in out_context if answers[q.question] != refusal_text)
    accurate = sum(
        1
        for q in in_context
        if q.expected_answer_substring
        and q.expected_answer_substring in answers[q.question]
    )
    return VariantOutcome(
        label=variant.label,
        hallucination_rate=hallucinated / len(out_context) if out_context else 0.0,
        answer_accuracy=accurate / len(in_context) if in_context else 0.0,
        mean_latency_ms=1000 * sum(latencies) / len(latencies) if latencies else 0.0,
        answers=answers,
    )


def eval_prompts(
    qa_pairs: list[QAPair],
    index: VectorIndex,
    refusal_text: str,
    variants: list[PromptVariant] | None = None,
    *,
    k: int = 4,
    grounding_threshold: float = 0.15,
    include_latency: bool = False,
) -> EvalReport:
    variants = variants if variants is not None else default_prompt_variants()
    rows = []
    for variant in variants:
        outcome = run_prompt_variant(
            variant,
            qa_pairs,
            index,
            refusal_text,
            k=k,
            grounding_threshold=grounding_threshold,
        )
        rows.append(
            {
                "Prompt Strategy": outcome.label,
                "Hallucination Rate": outcome.hallucination_rate,
                "Answer Accuracy": outcome.answer_accuracy,
                "Mean Latency (ms)": (
                    round(outcome.mean_latency_ms, 2) if include_latency else "-"
                ),
            }
        )
    return EvalReport(
        name="table2",
        title="Prompt Strategy Evaluation",
        columns=TABLE2_COLUMNS,
        rows=rows,
    )


# -- tables 3-5: provider selection --------------------------------------------


def eval_provider_selection(
    translate_csv: str | Path | None = None,
    tts_csv: str | Path | None = None,
    llm_csv: str | Path | None = None,
) -> list[EvalReport]:
    specs = [
        (
            "table3",
            "Translation and Language Detection Comparison",
            translate_csv or data_path("table3.csv"),
            Capability.TRANSLATE,
            "Translation Service",
            ["Translation Service", "Accuracy (%)", "Speed (ms)", "Selected"],
            lambda p: {"Accuracy (%)": p.accuracy, "Speed (ms)": p.latency_ms},
        ),
        (
            "table4",
            "Text-to-Speech Model Comparison",
            tts_csv or data_path("table4.csv"),
            Capability.TTS,
            "TTS Model",
            ["TTS Model", "Response Time (ms)", "Cost ($)", "Accuracy (%)", "Selected"],
            lambda p: {
                "Response Time (ms)": p.latency_ms,
                "Cost ($)": p.cost,
                "Accuracy (%)": p.accuracy,
            },
        ),
        (
            "table5",
            "Comparison of Large Language Models",
            llm_csv or data_path("table5.csv"),
            Capability.LLM,
            "LLM",
            ["LLM", "Accuracy (%)", "Processing Time (ms)", "Selected"],
            lambda p: {"Accuracy (%)": p.accuracy, "Processing Time (ms)": p.latency_ms},
        ),
    ]
    reports = []
    for name, title, path, capability, name_col, columns, metrics in specs:
        profiles = load_provider_profiles(path)
        chosen = select_provider(profiles, capability)
        rows = []
        for profile in profiles:
            row = {name_col: profile.name}
            row.update(metrics(profile))
            row["Selected"] = "yes" if profile.name == chosen.name else ""
            rows.append(row)
        reports.append(EvalReport(name=name, title=title, columns=columns, rows=rows))
    return reports


def selected_provider_names(reports: list[EvalReport]) -> dict[str, str]:
    chosen = {}
    for report in reports:
        name_col = report.columns[0]
        for row in report.rows:
            if row.get("Selected") == "yes":
                chosen[report.name] = row[name_col]
    return chosen


# -- emission ------------------------------------------------------------------


# -- suite runner ----------------------------------------------------------


def run_suite(
    suite: str,
    out_dir: str | Path,
    corpus_dir: str | Path | None = None,
    *,
    seed: int = 7,
    k: int = 4,
    grounding_threshold: float = 0.15,
    include_latency: bool = False,
) -> tuple[list[EvalReport], list[Path]]:
    """Run the requested comparison suite(s) and write tableN.md/csv files."""
    from .corpus import load_corpus
    from .synthetic import generate_suite

    if suite not in ("chunking", "prompts", "providers", "all"):
        raise EvalError(f"unknown suite {suite!r}")

    documents: list[Document] = []
    qa_pairs: list[QAPair] = []
    if suite in ("chunking", "prompts", "all"):
        if corpus_dir is not None:
            corpus_dir = Path(corpus_dir)
            manifest = corpus_dir / "manifest.json"
            documents = load_corpus(
                corpus_dir, manifest if manifest.is_file() else None
            )
            qa_path = corpus_dir / "qa_pairs.jsonl"
            if not qa_path.is_file():
                raise EvalError(f"no qa_pairs.jsonl next to corpus {corpus_dir}")
            qa_pairs = load_qa_pairs(qa_path)
        else:
            generated = generate_suite(seed=seed, grounding_threshold=grounding_threshold)
            documents, qa_pairs = generated.documents, generated.qa_pairs

    reports: list[EvalReport] = []
    if suite in ("chunking", "all"):
        reports.append(
            eval_chunking(documents, list(Strategy), qa_pairs, k=k)
        )
    if suite in ("prompts", "all"):
        chunks: list[Chunk] = []
        for doc in documents:
            chunks.extend(chunk_text(doc.text, Strategy.FIXED_WINDOW, ChunkParams(), doc_id=doc.doc_id))
        index = VectorIndex.build(chunks, HashedBagOfWordsEmbedder())
        refusal = load_templates(data_path("templates.txt")).refusal_text
        reports.append(
            eval_prompts(
                qa_pairs,
                index,
                refusal,
                k=k,
                grounding_threshold=grounding_threshold,
                include_latency=include_latency,
            )
        )
    if suite in ("providers", "all"):
        reports.extend(eval_provider_selection())

    out_dir = Path(out_dir)
    paths = []
    for report in reports:
        paths.append(emit_report(report, "md", out_dir / f"{report.name}.md"))
        paths.append(emit_report(report, "csv", out_dir / f"{report.name}.csv"))
    return reports, paths


def _format_value(value) -> str:
    if isinstance(value, float):
        text = f"{value:.4f}".rstrip("0").rstrip(".")
        return text if text else "0"
    return str(value)


def emit_report(report: EvalReport, fmt: str, path: str | Path) -> Path:
    """Write a report as markdown or CSV with deterministic bytes."""
    if not report.rows:
        raise EvalError(f"refusing to emit empty report {report.name}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "md":
        lines = [f"# {report.title}", ""]
        lines.append("| " + " | ".join(report.columns) + " |")
        lines.append("| " + " | ".join("---" for _ in report.columns) + " |")
        for row in report.rows:
            lines.append(
                "| "
                + " | ".join(_format_value(row.get(col, "")) for col in report.columns)
                + " |"
            )
        path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    elif fmt == "csv":
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(report.columns)
            for row in report.rows:
                writer.writerow([_format_value(row.get(col, "")) for col in report.columns])
    else:
        raise EvalError(f"unknown report format {fmt!r}")
    return path
