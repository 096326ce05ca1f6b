"""Element-level critics for generated counter-responses.

The rule critics are pure functions: no network, no randomness. A number or
entity in the response is judged against the evidence occurrence whose local
context (comma/semicolon-delimited segment) best overlaps the response
sentence it appears in; membership alone is not enough, because a value can
be real yet attached to the wrong statement. Model-backed critics speak the
/critique wire protocol and plug in behind the same interface.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import httpx

from .core import ElementKind
from .elements import (
    ElementSpan,
    TermProfile,
    content_terms,
    extract_entities,
    extract_numbers,
)
from .errors import CriticError, ProtocolError

logger = logging.getLogger(__name__)

__all__ = [
    "Critique",
    "FlaggedElement",
    "AggregatedCritique",
    "critique_numbers",
    "critique_entities",
    "critique_topic",
    "model_critique",
    "aggregate",
    "RuleCritics",
    "ModelCritics",
    "DEFAULT_TOPIC_THRESHOLD",
    "MAX_CRITIQUE_TOKENS",
    "PART_TOKEN_RANGE",
]

DEFAULT_TOPIC_THRESHOLD = 0.15
# Aggregate critique budget; enforced on model-backed critic text.
MAX_CRITIQUE_TOKENS = 150
# Informational per-part generation budget for trained critic models.
PART_TOKEN_RANGE = (5, 30)

AFFIRMATIVE_TEXTS = {
    ElementKind.NUMBER: "The numbers are correct",
    ElementKind.ENTITY: "The entities are correct",
    ElementKind.TOPIC: "The explanation is on the topic of the claim",
}

_KIND_ORDER = (ElementKind.NUMBER, ElementKind.ENTITY, ElementKind.TOPIC)


@dataclass(frozen=True)
class FlaggedElement:
    """One offending surface and, when derivable, its suggested correction."""

    surface: str
    suggestion: str | None = None


@dataclass(frozen=True)
class Critique:
    """One element-level judgment on a response."""

    element_kind: ElementKind
    positive: bool
    text: str
    flagged: tuple[FlaggedElement, ...] = ()
    source: str = "rule"

    def __post_init__(self) -> None:
        if self.positive and self.flagged:
            raise ValueError("a positive critique cannot flag elements")
        if not self.positive and not self.text:
            raise ValueError("a negative critique needs text")


@dataclass(frozen=True)
class AggregatedCritique:
    """The ordered concatenation of per-kind critiques (number, entity, topic)."""

    parts: tuple[Critique, ...]
    all_positive: bool
    text: str


# Sentence boundaries: ., !, ? followed by whitespace (or end of text).
_SENTENCE_SPLIT_RE = re.compile(r"[.!?](?=\s|$)")
# Segment boundaries additionally cut at commas/semicolons/colons followed by
# whitespace, so separators inside numbers ("122,494") never split.
_SEGMENT_SPLIT_RE = re.compile(r"[.!?,;:](?=\s|$)")


def _intervals(text: str, splitter: re.Pattern) -> list[tuple[int, int]]:
    intervals = []
    previous = 0
    for match in splitter.finditer(text):
        intervals.append((previous, match.end()))
        previous = match.end()
    if previous < len(text):
        intervals.append((previous, len(text)))
    return intervals or [(0, 0)]


def _profile_for(
    text: str, intervals: Sequence[tuple[int, int]], cache: dict[int, TermProfile], index: int
) -> TermProfile:
    if index not in cache:
        start, end = intervals[index]
        cache[index] = content_terms(text[start:end])
    return cache[index]


def _containing(intervals: Sequence[tuple[int, int]], position: int) -> int:
    for i, (start, end) in enumerate(intervals):
        if start <= position < end:
            return i
    return len(intervals) - 1


def _contextual_flags(
    response: str,
    response_spans: Sequence[ElementSpan],
    candidates: Sequence[tuple[ElementSpan, TermProfile]],
) -> list[FlaggedElement]:
    """Flag response spans whose best context match disagrees on value.

    For each response span, every candidate (grounding occurrence plus its
    segment profile) is scored by term overlap with the response sentence
    containing the span; ties break toward earliest candidate position. The
    span passes when some top-scoring candidate shares its canonical value.
    """
    sentences = _intervals(response, _SENTENCE_SPLIT_RE)
    sentence_profiles: dict[int, TermProfile] = {}
    flags: list[FlaggedElement] = []
    for span in response_spans:
        if not candidates:
            flags.append(FlaggedElement(surface=span.surface))
            continue
        profile = _profile_for(
            response, sentences, sentence_profiles, _containing(sentences, span.start)
        )
        scores = [profile.overlap(context) for _, context in candidates]
        best = max(scores)
        top = [candidate for (candidate, _), score in zip(candidates, scores) if score == best]
        if any(candidate.canonical == span.canonical for candidate in top):
            continue
        flags.append(FlaggedElement(surface=span.surface, suggestion=top[0].surface))
    return flags


def _candidate_contexts(text: str, spans: Sequence[ElementSpan]) -> list[tuple[ElementSpan, TermProfile]]:
    segments = _intervals(text, _SEGMENT_SPLIT_RE)
    cache: dict[int, TermProfile] = {}
    return [
        (span, _profile_for(text, segments, cache, _containing(segments, span.start)))
        for span in spans
    ]


def _negative_text(flags: Sequence[FlaggedElement], noun: str) -> str:
    sentences = []
    for flag in flags:
        if flag.suggestion is not None:
            sentences.append(
                f"{flag.surface} is not correct, the correct {noun} is {flag.suggestion}"
            )
        else:
            sentences.append(f"{flag.surface} is not supported by the evidence")
    return ". ".join(sentences)


def critique_numbers(claim: str, evidence: str, response: str) -> Critique:
    """Judge every number in the response against its evidence context."""
    response_spans = extract_numbers(response)
    candidates = _candidate_contexts(evidence, extract_numbers(evidence))
    flags = _contextual_flags(response, response_spans, candidates)
    if not flags:
        return Critique(ElementKind.NUMBER, True, AFFIRMATIVE_TEXTS[ElementKind.NUMBER])
    return Critique(
        ElementKind.NUMBER, False, _negative_text(flags, "number"), tuple(flags)
    )


def critique_entities(claim: str, evidence: str, response: str) -> Critique:
    """Judge every entity in the response; evidence entities plus claim entities ground it."""
    response_spans = extract_entities(response)
    candidates = _candidate_contexts(evidence, extract_entities(evidence))
    candidates += _candidate_contexts(claim, extract_entities(claim))
    flags = _contextual_flags(response, response_spans, candidates)
    if not flags:
        return Critique(ElementKind.ENTITY, True, AFFIRMATIVE_TEXTS[ElementKind.ENTITY])
    return Critique(
        ElementKind.ENTITY, False, _negative_text(flags, "text"), tuple(flags)
    )


def critique_topic(
    claim: str, evidence: str, response: str, threshold: float = DEFAULT_TOPIC_THRESHOLD
) -> Critique:
    """Compare claim and response term profiles by cosine similarity."""
    if not claim.strip():
        raise ValueError("claim must be non-empty")
    claim_profile = content_terms(claim)
    response_profile = content_terms(response)
    similarity = claim_profile.cosine(response_profile)
    if response.strip() and similarity >= threshold:
        return Critique(ElementKind.TOPIC, True, AFFIRMATIVE_TEXTS[ElementKind.TOPIC])
    text = (
        "The explanation is not on the topic of the claim. "
        f"The claim is about {', '.join(claim_profile.top_terms(3))}, "
        f"but the explanation is about {', '.join(response_profile.top_terms(3))}."
    )
    return Critique(ElementKind.TOPIC, False, text)


_TEMPLATE_SENTENCE_RE = re.compile(
    r"(?P<substitute>.+?) is not correct, the correct (?:number|text) is (?P<original>.+)"
)


def parse_template_flags(text: str) -> tuple[FlaggedElement, ...]:
    """Recover (offending, suggested) pairs from templated critique text."""
    flags = []
    for sentence in re.split(r"(?<=[.!?])\s+", text):
        sentence = sentence.strip().rstrip(".")
        match = _TEMPLATE_SENTENCE_RE.fullmatch(sentence)
        if match:
            flags.append(
                FlaggedElement(
                    surface=match.group("substitute"),
                    suggestion=match.group("original"),
                )
            )
    return tuple(flags)


def _truncate_tokens(text: str, budget: int) -> str:
    tokens = text.split()
    if len(tokens) <= budget:
        return text
    return " ".join(tokens[:budget])


def model_critique(
    endpoint: str,
    element_kind: ElementKind,
    claim: str,
    evidence: str,
    response: str,
    max_critique_tokens: int = MAX_CRITIQUE_TOKENS,
    timeout: float = 60.0,
) -> Critique:
    """Request one critique from a model-backed critic service."""
    try:
        reply = httpx.post(
            f"{endpoint.rstrip('/')}/critique",
            json={
                "element_kind": element_kind.value,
                "claim": claim,
                "evidence": evidence,
                "response": response,
            },
            timeout=timeout,
        )
        reply.raise_for_status()
    except httpx.HTTPError as exc:
        raise CriticError(f"critic service request failed: {exc}") from exc
    try:
        payload = reply.json()
        positive = payload["positive"]
        text = payload["critique"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ProtocolError(f"malformed critic response: {exc}") from exc
    if not isinstance(positive, bool) or not isinstance(text, str):
        raise ProtocolError("critic response fields have the wrong types")
    text = _truncate_tokens(text, max_critique_tokens)
    if positive:
        if " ".join(text.split()) != AFFIRMATIVE_TEXTS[element_kind]:
            raise ProtocolError(
                "critic service returned positive with non-affirmative text"
            )
        return Critique(element_kind, True, AFFIRMATIVE_TEXTS[element_kind], source="model")
    return Critique(element_kind, False, text, parse_template_flags(text), source="model")


def aggregate(
    *parts: Critique, expected_kinds: Iterable[ElementKind] = _KIND_ORDER
) -> AggregatedCritique:
    """Order critiques number, entity, topic and concatenate their texts."""
    by_kind: dict[ElementKind, Critique] = {}
    for part in parts:
        if part.element_kind in by_kind:
            raise ValueError(f"duplicate critique kind: {part.element_kind.value}")
        by_kind[part.element_kind] = part
    expected = [kind for kind in _KIND_ORDER if kind in set(expected_kinds)]
    missing = [kind.value for kind in expected if kind not in by_kind]
    unexpected = [kind.value for kind in by_kind if kind not in expected]
    if missing:
        raise ValueError(f"missing critique kinds: {', '.join(missing)}")
    if unexpected:
        raise ValueError(f"unexpected critique kinds: {', '.join(unexpected)}")
    ordered = tuple(by_kind[kind] for kind in expected)
    return AggregatedCritique(
        parts=ordered,
        all_positive=all(part.positive for part in ordered),
        text="\n".join(part.text for part in ordered),
    )


class RuleCritics:
    """The built-in deterministic critic suite."""

    def __init__(self, topic_threshold: float = DEFAULT_TOPIC_THRESHOLD) -> None:
        self.topic_threshold = topic_threshold

    def critique(
        self, kind: ElementKind, claim: str, evidence: str, response: str
    ) -> Critique:
        if kind is ElementKind.NUMBER:
            return critique_numbers(claim, evidence, response)
        if kind is ElementKind.ENTITY:
            return critique_entities(claim, evidence, response)
        return critique_topic(claim, evidence, response, self.topic_threshold)


class ModelCritics:
    """Critic suite backed by /critique services, one endpoint per kind.

    With a fallback suite configured, critic errors degrade to the rule
    critic for that kind; without one they propagate.
    """

    def __init__(
        self,
        endpoints: Mapping[ElementKind, str],
        fallback: RuleCritics | None = None,
        max_critique_tokens: int = MAX_CRITIQUE_TOKENS,
        timeout: float = 60.0,
    ) -> None:
        self.endpoints = dict(endpoints)
        self.fallback = fallback
        self.max_critique_tokens = max_critique_tokens
        self.timeout = timeout

    def critique(
        self, kind: ElementKind, claim: str, evidence: str, response: str
    ) -> Critique:
        endpoint = self.endpoints.get(kind)
        if endpoint is None:
            if self.fallback is not None:
                return self.fallback.critique(kind, claim, evidence, response)
            raise CriticError(f"no critic endpoint configured for {kind.value}")
        try:
            return model_critique(
                endpoint,
                kind,
                claim,
                evidence,
                response,
                max_critique_tokens=self.max_critique_tokens,
                timeout=self.timeout,
            )
        except CriticError:
            if self.fallback is None:
                raise
            logger.warning("model critic for %s failed; falling back to rules", kind.value)
            return self.fallback.critique(kind, claim, evidence, response)
