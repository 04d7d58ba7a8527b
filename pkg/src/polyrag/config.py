"""Service configuration: YAML file with packaged-fixture defaults."""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from importlib.resources import files
from pathlib import Path

import yaml


class ConfigError(Exception):
    pass


def data_path(*parts: str) -> Path:
    """Path of a fixture shipped inside the package's data directory."""
    return Path(str(files("polyrag").joinpath("data", *parts)))


@dataclass
class ServiceConfig:
    chunk_store: str = "data/chunks.jsonl"
    index_path: str | None = None  # omit to build the index in memory at startup
    journal_path: str = "data/journal.jsonl"
    media_dir: str | None = None

    retrieval_k: int = 4
    grounding_threshold: float = 0.15
    history_window: int = 5
    session_ttl_hours: float = 24.0
    speech_max_inflight: int = 4

    listen_host: str = "127.0.0.1"
    listen_port: int = 8080
    webhook_token: str | None = None
    ui_dir: str | None = None

    templates_path: str = field(default_factory=lambda: str(data_path("templates.txt")))
    translations_tsv: str = field(
        default_factory=lambda: str(data_path("translations.tsv"))
    )
    translate_profiles_csv: str = field(
        default_factory=lambda: str(data_path("table3.csv"))
    )
    tts_profiles_csv: str = field(default_factory=lambda: str(data_path("table4.csv")))
    llm_profiles_csv: str = field(default_factory=lambda: str(data_path("table5.csv")))

    # Provider adapters; only "mock" ships, real adapters register here.
    translator: str = "mock"
    stt: str = "mock"
    tts: str = "mock"
    llm: str = "mock"

    @classmethod
    def from_file(cls, path: str | Path) -> "ServiceConfig":
        path = Path(path)
        try:
            raw = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError(f"config {path} must be a YAML mapping")
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        config = cls(**raw)
        # Relative paths resolve against the config file's directory.
        base = path.parent
        for name in ("chunk_store", "index_path", "journal_path", "media_dir", "ui_dir"):
            value = getattr(config, name)
            if value is not None and not Path(value).is_absolute():
                setattr(config, name, str(base / value))
        return config
