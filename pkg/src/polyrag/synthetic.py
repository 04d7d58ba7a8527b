"""Synthetic labeled corpus: HR/QA-flavored documents plus QA pairs.

The generator is fully seeded, so the shipped evaluation suite is a pure
function of its arguments. Facts carry unique code/grade parameters, which
makes their questions retrieve sharply; out-of-context questions come from
disjoint domains and are kept only when their best retrieval score against
the generated corpus stays below the grounding threshold, so the refusal
behavior of the final configuration is exact by construction.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

from .chunking import ChunkParams, Strategy
from .chunk_store import chunk_document
from .corpus import Collection, Document
from .embedding import EmptyTextError, HashedBagOfWordsEmbedder
from .evaluation import QAPair, write_qa_pairs
from .index import VectorIndex

# (fact sentence, question, answer substring) -- all slots share parameters.
FACT_TEMPLATES = [
    (
        "Employees in grade {g} receive {n} days of annual leave under policy {code}.",
        "How many days of annual leave do employees in grade {g} receive under policy {code}?",
        "{n} days",
    ),
    (
        "The {team} team submits its monthly summary on day {n} under rule {code}.",
        "On which day does the {team} team submit its monthly summary under rule {code}?",
        "day {n}",
    ),
    (
        "Overtime inside unit {g} is paid at {n} percent of the hourly rate per clause {code}.",
        "At what percent of the hourly rate is overtime paid inside unit {g} per clause {code}?",
        "{n} percent",
    ),
    (
        "The calibration interval for gauge {code} in lab {g} is {n} weeks.",
        "What is the calibration interval for gauge {code} in lab {g}?",
        "{n} weeks",
    ),
    (
        "Inspection lot {code} at station {g} requires a sample of {n} pieces.",
        "How many pieces does inspection lot {code} at station {g} require?",
        "{n} pieces",
    ),
    (
        "Supplier {code} assigned to depot {g} holds a quality score of {n} points.",
        "What quality score does supplier {code} assigned to depot {g} hold?",
        "{n} points",
    ),
    (
        "Defects of class {g} logged under {code} must be closed within {n} days.",
        "Within how many days must defects of class {g} logged under {code} be closed?",
        "{n} days",
    ),
    (
        "The travel stipend for region {g} under scheme {code} is {n} rupees daily.",
        "How many rupees daily is the travel stipend for region {g} under scheme {code}?",
        "{n} rupees",
    ),
    (
        "Training course {code} for cohort {g} lasts {n} hours.",
        "How many hours does training course {code} for cohort {g} last?",
        "{n} hours",
    ),
    (
        "Shift {g} under roster {code} starts after {n} hundred hours.",
        "After how many hundred hours does shift {g} under roster {code} start?",
        "{n} hundred",
    ),
]

FILLER_SENTENCES = [
    "All related records remain archived in the central registry.",
    "The responsible officer reviews this section each quarter.",
    "Updates to this procedure take effect once the process owner signs off.",
    "Employees can consult the handbook for the full wording.",
    "Exceptions call for written approval ahead of time.",
    "The checklist template lives on the shared drive.",
    "Line supervisors walk new staff through this part of the procedure.",
    "Any ambiguity gets escalated to the compliance cell.",
]

SECTION_HEADINGS = [
    "Entitlements",
    "Approvals",
    "Reporting Cadence",
    "Compensation Rules",
    "Inspection Duties",
    "Calibration Plan",
    "Supplier Oversight",
    "Defect Closure",
    "Travel Arrangements",
    "Training Matters",
    "Shift Coverage",
    "General Notes",
]

# Off-domain question templates. They deliberately avoid the corpus
# vocabulary (including frequent function words), and candidates are still
# verified against the generated index before acceptance.
OUT_OF_CONTEXT_TEMPLATES = [
    "Which planet displays {n} bright rings tonight?",
    "Who scored {n} goals during yesterday's football final?",
    "How spicy does biryani taste when simmered slowly?",
    "Which guitar chord repeats {n} times throughout that melody?",
    "Who painted {n} portraits during her studio residency?",
    "Which mountain peak rises {n} metres above sea level?",
    "How often do comets brighten near distant galaxies?",
    "Which chess opening sacrifices {n} pawns early?",
    "Who directed {n} silent films starring circus acrobats?",
    "Which recipe folds saffron into warm basmati rice?",
    "How deep can whales dive while hunting giant squid?",
    "Which constellation appears brightest during winter nights?",
    "Who won {n} tennis championships playing left-handed?",
    "Which violin string vibrates fastest when bowed gently?",
    "How far away orbits that newly discovered moon?",
    "Which dinosaur species grew {n} metres long?",
    "Who brewed {n} cups of cardamom tea this morning?",
    "Which waterfall drops {n} metres through rainforest canyon?",
    "How many pyramids stand along that ancient river?",
    "Which poet wrote {n} ghazals about moonlight?",
    "Who juggled {n} flaming torches at tonight's carnival?",
    "Which ocean current warms {n} coastal islands?",
    "How loudly do cicadas sing during summer dusk?",
    "Which library shelf keeps {n} antique atlases?",
    "Who climbed {n} frozen ridges without oxygen tanks?",
]

TEAM_NAMES = ["packing", "dyeing", "knitting", "stitching", "finishing", "logistics"]
CODE_PREFIXES = ["LP", "QP", "TR", "AU", "CA", "SC", "RS"]


@dataclass
class SyntheticSuite:
    documents: list[Document]
    qa_pairs: list[QAPair]
    manifest: dict[str, str]


def generate_suite(
    seed: int = 7,
    n_docs: int = 20,
    sections_per_doc: int = 5,
    n_in_context: int = 50,
    n_out_of_context: int = 50,
    grounding_threshold: float = 0.15,
    params: ChunkParams | None = None,
) -> SyntheticSuite:
    rng = random.Random(seed)
    params = params or ChunkParams()

    grades = [f"{letter}{digit}" for letter in "BCDFGHJKLMNPRSTVWXYZ" for digit in range(1, 9)]
    rng.shuffle(grades)
    codes = [
        f"{prefix}-{number}"
        for prefix in CODE_PREFIXES
        for number in range(100, 700, 7)
    ]
    rng.shuffle(codes)

    documents: list[Document] = []
    manifest: dict[str, str] = {}
    facts: list[tuple[str, str, str, str]] = []  # doc_id, sentence, question, answer

    for doc_idx in range(n_docs):
        is_hr = doc_idx < n_docs // 2
        collection = Collection.HR if is_hr else Collection.QA
        doc_id = f"{'hr' if is_hr else 'qa'}_{doc_idx:02d}"
        title = f"{'HR' if is_hr else 'Quality'} Procedure {doc_idx:02d}"
        parts = [f"# {title}"]
        for _ in range(sections_per_doc):
            fact_tpl, question_tpl, answer_tpl = rng.choice(FACT_TEMPLATES)
            values = {
                "g": grades.pop(),
                "code": codes.pop(),
                "n": rng.randint(2, 600),
                "team": rng.choice(TEAM_NAMES),
            }
            fact = fact_tpl.format(**values)
            question = question_tpl.format(**values)
            answer = answer_tpl.format(**values)
            heading = rng.choice(SECTION_HEADINGS)
            fact_par = fact + " " + rng.choice(FILLER_SENTENCES)
            filler_par = " ".join(rng.sample(FILLER_SENTENCES, 2))
            parts.append(f"## {heading}\n\n{fact_par}\n\n{filler_par}")
            facts.append((doc_id, fact, question, answer))
        text = "\n\n".join(parts) + "\n"
        documents.append(
            Document(
                doc_id=doc_id,
                collection=collection,
                title=title,
                text=text,
                source_path=f"{doc_id}.md",
            )
        )
        manifest[f"{doc_id}.md"] = collection.value

    # Canonical fixed-window chunks drive span labeling and the filter index.
    chunks = []
    for doc in documents:
        chunks.extend(chunk_document(doc, Strategy.FIXED_WINDOW, params))
    index = VectorIndex.build(chunks, HashedBagOfWordsEmbedder())
    by_doc = {doc.doc_id: doc for doc in documents}

    qa_pairs: list[QAPair] = []
    for doc_id, fact, question, answer in rng.sample(facts, min(n_in_context, len(facts))):
        start = by_doc[doc_id].text.find(fact)
        span = (start, start + len(fact))
        expected_ids = [
            c.chunk_id
            for c in chunks
            if c.doc_id == doc_id and max(c.char_start, span[0]) < min(c.char_end, span[1])
        ]
        qa_pairs.append(
            QAPair(
                question=question,
                in_context=True,
                expected_doc_id=doc_id,
                expected_span=span,
                expected_chunk_ids=expected_ids,
                expected_answer_substring=answer,
            )
        )

    accepted: list[str] = []
    seen: set[str] = set()
    attempts = 0
    while len(accepted) < n_out_of_context:
        attempts += 1
        if attempts > 100 * n_out_of_context:
            raise RuntimeError(
                "could not find enough out-of-context questions below the "
                "grounding threshold; loosen the templates"
            )
        template = rng.choice(OUT_OF_CONTEXT_TEMPLATES)
        question = template.format(n=rng.randint(7000, 9999))
        if question in seen:
            continue
        seen.add(question)
        try:
            results = index.search_text(question, 1)
        except EmptyTextError:
            continue
        if results and results[0].score >= grounding_threshold:
            continue
        accepted.append(question)
    qa_pairs.extend(QAPair(question=q, in_context=False) for q in accepted)

    return SyntheticSuite(documents=documents, qa_pairs=qa_pairs, manifest=manifest)


def write_suite(suite: SyntheticSuite, out_dir: str | Path) -> Path:
    """Materialize the suite as a corpus directory consumable by the CLI."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for doc in suite.documents:
        (out_dir / f"{doc.doc_id}.md").write_text(doc.text, encoding="utf-8")
    (out_dir / "manifest.json").write_text(
        json.dumps(suite.manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    write_qa_pairs(suite.qa_pairs, out_dir / "qa_pairs.jsonl")
    return out_dir
