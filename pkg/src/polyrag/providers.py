"""Provider profiles and the deterministic selection policy.

A profile is one measured row (accuracy, latency, cost) for an external
service. Selection filters by capability and latency budget, then picks the
most accurate candidate; ties fall to lower latency, then lower cost, then
name. The policy is a pure function of the profile list, so permuting the
input never changes the outcome.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum
from pathlib import Path


class ProviderSelectionError(Exception):
    pass


class Capability(str, Enum):
    TRANSLATE = "Translate"
    TTS = "TTS"
    STT = "STT"
    LLM = "LLM"


@dataclass(frozen=True)
class ProviderProfile:
    name: str
    capability: Capability
    accuracy: float  # percent, 0..100
    latency_ms: float
    cost: float  # currency per call

    def __post_init__(self) -> None:
        if not 0 <= self.accuracy <= 100:
            raise ProviderSelectionError(
                f"accuracy must be in [0, 100], got {self.accuracy}"
            )
        if self.latency_ms < 0 or self.cost < 0:
            raise ProviderSelectionError("latency and cost must be non-negative")


def load_provider_profiles(path: str | Path) -> list[ProviderProfile]:
    """Read profiles from a CSV with header name,capability,accuracy,latency_ms,cost."""
    path = Path(path)
    if not path.is_file():
        raise ProviderSelectionError(f"profile fixture not found: {path}")
    profiles = []
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            profiles.append(
                ProviderProfile(
                    name=row["name"],
                    capability=Capability(row["capability"]),
                    accuracy=float(row["accuracy"]),
                    latency_ms=float(row["latency_ms"]),
                    cost=float(row["cost"]),
                )
            )
    return profiles


def select_provider(
    profiles: list[ProviderProfile],
    capability: Capability,
    latency_budget_ms: float | None = None,
) -> ProviderProfile:
    """Highest-accuracy profile with the capability, within the latency budget."""
    capable = [p for p in profiles if p.capability is capability]
    if not capable:
        raise ProviderSelectionError(f"no provider offers {capability.value}")
    if latency_budget_ms is not None:
        candidates = [p for p in capable if p.latency_ms <= latency_budget_ms]
        if not candidates:
            nearest = min(p.latency_ms for p in capable)
            raise ProviderSelectionError(
                f"no {capability.value} provider within {latency_budget_ms} ms "
                f"(nearest is {nearest} ms)"
            )
    else:
        candidates = capable
    return min(candidates, key=lambda p: (-p.accuracy, p.latency_ms, p.cost, p.name))
