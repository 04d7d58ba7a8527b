"""Corpus loading: plain-text/markdown files on disk -> Document objects."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

logger = logging.getLogger(__name__)

TEXT_SUFFIXES = {".txt", ".md", ".markdown"}


class Collection(str, Enum):
    HR = "HR"
    QA = "QA"
    OTHER = "OTHER"


class CorpusError(Exception):
    """Corpus-level failure (empty directory, duplicate document ids)."""


@dataclass
class CorpusFileError:
    """A single file that could not be loaded; the rest of the load continues."""

    path: str
    reason: str


@dataclass
class Document:
    doc_id: str
    collection: Collection
    title: str
    text: str
    source_path: str


def _normalize_newlines(text: str) -> str:
    return text.replace("\r\n", "\n").replace("\r", "\n")


def load_manifest(path: str | Path) -> dict[str, Collection]:
    """Read a JSON manifest mapping filename (or relative path) -> collection name."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, dict):
        raise CorpusError(f"manifest {path} must be a JSON object")
    manifest = {}
    for name, coll in raw.items():
        try:
            manifest[name] = Collection(coll)
        except ValueError:
            raise CorpusError(
                f"manifest {path}: unknown collection {coll!r} for {name!r}"
            ) from None
    return manifest


def load_corpus(
    root: str | Path,
    manifest: str | Path | None = None,
    errors: list[CorpusFileError] | None = None,
) -> list[Document]:
    """Load every text/markdown file under `root` as one Document.

    Documents come back in lexicographic order of their relative path, so a
    given directory always loads the same way. Files that cannot be read
    (bad encoding, empty content) are appended to `errors` if a list is
    passed, logged either way, and skipped.

    Raises CorpusError if the directory yields no documents at all.
    """
    root = Path(root)
    if not root.is_dir():
        raise CorpusError(f"corpus root {root} is not a directory")

    collections = load_manifest(manifest) if manifest else {}

    paths = sorted(
        (p for p in root.rglob("*") if p.is_file() and p.suffix.lower() in TEXT_SUFFIXES),
        key=lambda p: p.relative_to(root).as_posix(),
    )

    docs: list[Document] = []
    seen: set[str] = set()
    for path in paths:
        rel = path.relative_to(root).as_posix()
        try:
            text = _normalize_newlines(path.read_text(encoding="utf-8"))
        except (OSError, UnicodeDecodeError) as exc:
            _collect(errors, path, f"unreadable: {exc}")
            continue
        if not text.strip():
            _collect(errors, path, "empty file")
            continue

        doc_id = rel[: -len(path.suffix)] if path.suffix else rel
        if doc_id in seen:
            _collect(errors, path, f"duplicate doc_id {doc_id!r}")
            continue
        seen.add(doc_id)

        collection = collections.get(path.name) or collections.get(rel) or Collection.OTHER
        docs.append(
            Document(
                doc_id=doc_id,
                collection=collection,
                title=path.stem,
                text=text,
                source_path=str(path),
            )
        )

    if not docs:
        raise CorpusError(f"no loadable documents under {root}")
    return docs


def _collect(errors: list[CorpusFileError] | None, path: Path, reason: str) -> None:
    logger.warning("skipping %s: %s", path, reason)
    if errors is not None:
        errors.append(CorpusFileError(path=str(path), reason=reason))
