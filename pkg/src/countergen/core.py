"""Domain types shared across the pipeline, plus veracity label normalization."""

from __future__ import annotations

import enum
from dataclasses import dataclass


class VeracityLabel(enum.Enum):
    """Canonical veracity verdicts. Anything unrecognized becomes OTHER."""

    TRUE = "true"
    FALSE = "false"
    MIXTURE = "mixture"
    UNPROVEN = "unproven"
    OTHER = "other"


class ElementKind(enum.Enum):
    """The three checkable element families."""

    NUMBER = "number"
    ENTITY = "entity"
    TOPIC = "topic"


_CANONICAL_LABELS = {
    label.value: label
    for label in (
        VeracityLabel.TRUE,
        VeracityLabel.FALSE,
        VeracityLabel.MIXTURE,
        VeracityLabel.UNPROVEN,
    )
}


def normalize_label(raw: str) -> VeracityLabel:
    """Map a raw dataset label onto the canonical set.

    Case- and whitespace-insensitive; total: unknown labels map to OTHER.
    """
    key = " ".join(str(raw).split()).casefold()
    return _CANONICAL_LABELS.get(key, VeracityLabel.OTHER)


@dataclass(frozen=True)
class CounterResponse:
    """A generated counter-response, before (initial) or after (refined) feedback."""

    text: str
    stage: str = "initial"

    def __post_init__(self) -> None:
        if self.stage not in ("initial", "refined"):
            raise ValueError(f"unknown counter-response stage: {self.stage!r}")


@dataclass(frozen=True)
class FactCheckArticle:
    """One fact-checking article: a claim, curated evidence, and the journalist explanation.

    Immutable; text fields are stored exactly as received so that character
    offsets computed against them stay valid.
    """

    id: str
    claim: str
    evidence: str = ""
    explanation: str | None = None
    label: VeracityLabel = VeracityLabel.OTHER
    source: str = ""

    def __post_init__(self) -> None:
        if not self.claim.strip():
            raise ValueError("claim must be non-empty")

    def require_evidence(self) -> str:
        if not self.evidence.strip():
            raise ValueError(f"article {self.id}: evidence must be non-empty for this use")
        return self.evidence

    def require_explanation(self) -> str:
        if self.explanation is None or not self.explanation.strip():
            raise ValueError(f"article {self.id}: explanation must be present for this use")
        return self.explanation
