"""Training-data factory: factual and counter-factual critic training instances.

Number and entity corruption is a pure function of the article; only
off-topic rewriting calls a completion endpoint. Instances are emitted as
JSONL, one object per line, with a fixed field order.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Sequence

from .core import ElementKind, FactCheckArticle
from .elements import ElementSpan, extract_entities, extract_numbers
from .errors import GenerationError
from .llm import CompletionClient
from .prompts import load_prompt

logger = logging.getLogger(__name__)

__all__ = [
    "AFFIRMATIVE_CRITIQUES",
    "Replacement",
    "TrainingInstance",
    "make_factual_instances",
    "make_number_replacements",
    "make_entity_replacements",
    "make_offtopic_instances",
    "emit_jsonl",
    "read_jsonl",
]

AFFIRMATIVE_CRITIQUES = {
    ElementKind.NUMBER: "The numbers are correct",
    ElementKind.ENTITY: "The entities are correct",
    ElementKind.TOPIC: "The explanation is on the topic of the claim",
}

NUMBER_CRITIQUE_TEMPLATE = "{substitute} is not correct, the correct number is {original}"
ENTITY_CRITIQUE_TEMPLATE = "{substitute} is not correct, the correct text is {original}"

DEFAULT_REPLACEMENT_CAP = 20
DEFAULT_OFFTOPIC_COUNT = 3


@dataclass(frozen=True)
class Replacement:
    """The single edit that turned an explanation into a counterfactual variant.

    Offsets index into the variant text; variant[start:end] == substitute.
    """

    original: str
    substitute: str
    start: int
    end: int


@dataclass(frozen=True)
class TrainingInstance:
    """One (input, explanation-variant, critique) row of critic training data."""

    id: str
    claim: str
    evidence: str
    explanation_variant: str
    critique: str
    element_kind: ElementKind
    label: str  # "factual" | "counterfactual"
    replacement: Replacement | None = None

    def __post_init__(self) -> None:
        if self.label not in ("factual", "counterfactual"):
            raise ValueError(f"unknown instance label: {self.label!r}")
        if self.label == "factual" and self.replacement is not None:
            raise ValueError("factual instances must not carry a replacement")
        if self.replacement is not None:
            got = self.explanation_variant[self.replacement.start:self.replacement.end]
            if got != self.replacement.substitute:
                raise ValueError("replacement offsets do not match the variant text")

    def restore_original(self) -> str:
        """Apply the inverse replacement, reproducing the original explanation."""
        if self.replacement is None:
            return self.explanation_variant
        r = self.replacement
        return (
            self.explanation_variant[: r.start]
            + r.original
            + self.explanation_variant[r.end:]
        )


def make_factual_instances(article: FactCheckArticle) -> list[TrainingInstance]:
    """One factual instance per element kind, with the affirmative critique."""
    explanation = article.require_explanation()
    article.require_evidence()
    return [
        TrainingInstance(
            id=f"{article.id}:{kind.value}:factual",
            claim=article.claim,
            evidence=article.evidence,
            explanation_variant=explanation,
            critique=AFFIRMATIVE_CRITIQUES[kind],
            element_kind=kind,
            label="factual",
        )
        for kind in (ElementKind.NUMBER, ElementKind.ENTITY, ElementKind.TOPIC)
    ]


def _distinct_by_canonical(spans: Sequence[ElementSpan]) -> list[ElementSpan]:
    seen: set[str] = set()
    distinct = []
    for span in spans:
        if span.canonical not in seen:
            seen.add(span.canonical)
            distinct.append(span)
    return distinct


def _replacement_instances(
    article: FactCheckArticle,
    kind: ElementKind,
    explanation_spans: Sequence[ElementSpan],
    evidence_spans: Sequence[ElementSpan],
    critique_template: str,
    cap: int | None,
) -> list[TrainingInstance]:
    explanation = article.require_explanation()
    candidates = _distinct_by_canonical(evidence_spans)
    instances: list[TrainingInstance] = []
    for target in explanation_spans:  # explanation-major, document order
        for candidate in candidates:  # evidence-minor, document order
            if candidate.canonical == target.canonical:
                continue
            if cap is not None and len(instances) >= cap:
                return instances
            variant = (
                explanation[: target.start]
                + candidate.surface
                + explanation[target.end:]
            )
            instances.append(
                TrainingInstance(
                    id=f"{article.id}:{kind.value}:{len(instances)}",
                    claim=article.claim,
                    evidence=article.evidence,
                    explanation_variant=variant,
                    critique=critique_template.format(
                        substitute=candidate.surface, original=target.surface
                    ),
                    element_kind=kind,
                    label="counterfactual",
                    replacement=Replacement(
                        original=target.surface,
                        substitute=candidate.surface,
                        start=target.start,
                        end=target.start + len(candidate.surface),
                    ),
                )
            )
    return instances


def make_number_replacements(
    article: FactCheckArticle, cap: int | None = DEFAULT_REPLACEMENT_CAP
) -> list[TrainingInstance]:
    """Replace each explanation number with each distinct-valued evidence number."""
    explanation = article.require_explanation()
    article.require_evidence()
    return _replacement_instances(
        article,
        ElementKind.NUMBER,
        extract_numbers(explanation),
        extract_numbers(article.evidence),
        NUMBER_CRITIQUE_TEMPLATE,
        cap,
    )


def make_entity_replacements(
    article: FactCheckArticle, cap: int | None = DEFAULT_REPLACEMENT_CAP
) -> list[TrainingInstance]:
    """Replace each explanation entity with each distinct evidence entity."""
    explanation = article.require_explanation()
    article.require_evidence()
    return _replacement_instances(
        article,
        ElementKind.ENTITY,
        extract_entities(explanation),
        extract_entities(article.evidence),
        ENTITY_CRITIQUE_TEMPLATE,
        cap,
    )


def _parse_offtopic_reply(reply: str) -> list[tuple[str, str]]:
    """Pull (rewritten_explanation, reason) pairs out of a JSON-list reply.

    Tolerates code fences and prose around the list; items missing either
    field are skipped.
    """
    start = reply.find("[")
    end = reply.rfind("]")
    if start < 0 or end <= start:
        return []
    try:
        items = json.loads(reply[start : end + 1])
    except json.JSONDecodeError:
        return []
    if not isinstance(items, list):
        return []
    pairs = []
    for item in items:
        if not isinstance(item, dict):
            continue
        rewritten = item.get("rewritten_explanation")
        reason = item.get("reason")
        if isinstance(rewritten, str) and rewritten.strip() and isinstance(reason, str) and reason.strip():
            pairs.append((rewritten, reason))
    return pairs


def make_offtopic_instances(
    article: FactCheckArticle,
    llm: CompletionClient,
    count: int = DEFAULT_OFFTOPIC_COUNT,
    retries: int = 2,
) -> list[TrainingInstance]:
    """Ask the completion endpoint to rewrite the explanation off-topic.

    Issues up to 1 + ``retries`` calls until ``count`` parseable items arrive;
    returns fewer with a warning when the budget runs out, and raises
    GenerationError when nothing parseable came back at all.
    """
    if count == 0:
        return []
    explanation = article.require_explanation()
    article.require_evidence()
    prompt = load_prompt("offtopic_rewrite").format(
        claim=article.claim, explanation=explanation, evidence=article.evidence
    )
    pairs: list[tuple[str, str]] = []
    for attempt in range(retries + 1):
        reply = llm.complete([("user", prompt)])
        parsed = _parse_offtopic_reply(reply)
        if not parsed:
            logger.warning(
                "off-topic rewrite attempt %d for %s was unparseable", attempt + 1, article.id
            )
        pairs.extend(parsed)
        if len(pairs) >= count:
            break
    if not pairs:
        raise GenerationError(
            f"no parseable off-topic rewrites for article {article.id} "
            f"after {retries + 1} attempts"
        )
    if len(pairs) < count:
        logger.warning(
            "article %s: only %d of %d off-topic rewrites parsed",
            article.id,
            len(pairs),
            count,
        )
    return [
        TrainingInstance(
            id=f"{article.id}:topic:{i}",
            claim=article.claim,
            evidence=article.evidence,
            explanation_variant=rewritten,
            critique=reason,
            element_kind=ElementKind.TOPIC,
            label="counterfactual",
        )
        for i, (rewritten, reason) in enumerate(pairs[:count])
    ]


_JSONL_FIELDS = (
    "id",
    "claim",
    "evidence",
    "explanation_variant",
    "critique",
    "element_kind",
    "label",
    "replacement",
)


def instance_to_dict(instance: TrainingInstance) -> dict:
    replacement = None
    if instance.replacement is not None:
        replacement = {
            "original": instance.replacement.original,
            "substitute": instance.replacement.substitute,
            "start": instance.replacement.start,
            "end": instance.replacement.end,
        }
    record = {
        "id": instance.id,
        "claim": instance.claim,
        "evidence": instance.evidence,
        "explanation_variant": instance.explanation_variant,
        "critique": instance.critique,
        "element_kind": instance.element_kind.value,
        "label": instance.label,
        "replacement": replacement,
    }
    return {key: record[key] for key in _JSONL_FIELDS}


def instance_from_dict(record: dict) -> TrainingInstance:
    replacement = None
    if record.get("replacement") is not None:
        r = record["replacement"]
        replacement = Replacement(
            original=r["original"],
            substitute=r["substitute"],
            start=int(r["start"]),
            end=int(r["end"]),
        )
    return TrainingInstance(
        id=record["id"],
        claim=record["claim"],
        evidence=record["evidence"],
        explanation_variant=record["explanation_variant"],
        critique=record["critique"],
        element_kind=ElementKind(record["element_kind"]),
        label=record["label"],
        replacement=replacement,
    )


def emit_jsonl(instances: Iterable[TrainingInstance], sink: IO[str] | str | Path) -> int:
    """Write one JSON object per line; returns the number of lines written."""

    def _write(handle: IO[str]) -> int:
        written = 0
        for instance in instances:
            handle.write(json.dumps(instance_to_dict(instance), ensure_ascii=False))
            handle.write("\n")
            written += 1
        return written

    if hasattr(sink, "write"):
        return _write(sink)  # type: ignore[arg-type]
    with open(sink, "w", encoding="utf-8") as handle:  # type: ignore[arg-type]
        return _write(handle)


def read_jsonl(source: IO[str] | str | Path) -> list[TrainingInstance]:
    """Parse instances back from JSONL; the inverse of emit_jsonl."""

    def _read(handle: IO[str]) -> list[TrainingInstance]:
        return [instance_from_dict(json.loads(line)) for line in handle if line.strip()]

    if hasattr(source, "read"):
        return _read(source)  # type: ignore[arg-type]
    with open(source, "r", encoding="utf-8") as handle:  # type: ignore[arg-type]
        return _read(handle)
