"""Extraction of checkable elements: numbers, named entities, and topic terms.

All offsets are character offsets into the exact input text; every returned
span satisfies ``text[start:end] == surface``. Extraction is deterministic:
the same text always yields the same spans.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from typing import Mapping

import httpx

from .core import ElementKind
from .errors import ExtractionError, ProtocolError

__all__ = [
    "ElementSpan",
    "TermProfile",
    "TaggerClient",
    "extract_numbers",
    "normalize_number",
    "extract_entities",
    "content_terms",
    "STOPWORDS",
]

STOPWORDS: frozenset[str] = frozenset(
    resources.files(__package__).joinpath("data/stopwords.txt").read_text("utf-8").split()
)


@dataclass(frozen=True)
class ElementSpan:
    """One extracted number or entity occurrence.

    ``canonical`` is the comparison key: the normalized decimal rendering for
    numbers, the case-folded whitespace-collapsed surface for entities.
    """

    surface: str
    start: int
    end: int
    kind: ElementKind
    numeric_value: int | float | None = None
    is_percent: bool = False
    canonical: str = ""

    def __post_init__(self) -> None:
        if self.kind is ElementKind.NUMBER and self.numeric_value is None:
            raise ValueError("number spans require a numeric value")
        if self.kind is ElementKind.ENTITY and self.numeric_value is not None:
            raise ValueError("entity spans must not carry a numeric value")


@dataclass(frozen=True)
class TermProfile:
    """Bag of content words: case-folded, stopword-filtered occurrence counts."""

    terms: Mapping[str, int] = field(default_factory=dict)

    def cosine(self, other: "TermProfile") -> float:
        """Cosine similarity between the two count vectors; 0.0 if either is empty."""
        if not self.terms or not other.terms:
            return 0.0
        dot = sum(count * other.terms.get(term, 0) for term, count in self.terms.items())
        norm_a = sum(c * c for c in self.terms.values()) ** 0.5
        norm_b = sum(c * c for c in other.terms.values()) ** 0.5
        return dot / (norm_a * norm_b)

    def overlap(self, other: "TermProfile") -> int:
        """Shared-term weight: sum over shared terms of the smaller count."""
        return sum(
            min(count, other.terms[term])
            for term, count in self.terms.items()
            if term in other.terms
        )

    def top_terms(self, k: int = 3) -> list[str]:
        """Top-k terms, counts descending, then alphabetical."""
        ranked = sorted(self.terms.items(), key=lambda item: (-item[1], item[0]))
        return [term for term, _ in ranked[:k]]


_WORD_RE = re.compile(r"[A-Za-z]+")

# Digit numerals: optional thousands separators, optional decimal part.
# Lookarounds keep word-embedded digits ("3rd", "v1") from becoming spans.
_DIGIT_NUMBER_RE = re.compile(r"(?<![\w.])(?:\d{1,3}(?:,\d{3})+|\d+)(?:\.\d+)?(?!\w)")

# Percent marker directly after a number span: "%", "percent", "per cent".
_PERCENT_RE = re.compile(r"(?:\s?%|\s(?:percent|per\s+cent)\b)", re.IGNORECASE)

_UNIT_WORDS = {
    "one": 1, "two": 2, "three": 3, "four": 4, "five": 5,
    "six": 6, "seven": 7, "eight": 8, "nine": 9,
}
_TEEN_WORDS = {
    "ten": 10, "eleven": 11, "twelve": 12, "thirteen": 13, "fourteen": 14,
    "fifteen": 15, "sixteen": 16, "seventeen": 17, "eighteen": 18, "nineteen": 19,
}
_TENS_WORDS = {
    "twenty": 20, "thirty": 30, "forty": 40, "fifty": 50,
    "sixty": 60, "seventy": 70, "eighty": 80, "ninety": 90,
}
_SCALE_WORDS = {"thousand": 10**3, "million": 10**6, "billion": 10**9}

# Which token classes may continue a cardinal-word phrase after each class.
_NEXT_ALLOWED = {
    "start": {"unit", "teen", "tens", "hundred", "scale"},
    "unit": {"hundred", "scale"},
    "teen": {"hundred", "scale"},
    "tens": {"unit", "hundred", "scale"},
    "hundred": {"unit", "teen", "tens", "scale"},
    "scale": {"unit", "teen", "tens"},
}

_TOKEN_GAP_RE = re.compile(r"[\s\-]+")


def _classify_number_word(word: str) -> tuple[str, int] | None:
    folded = word.casefold()
    if folded in _UNIT_WORDS:
        return "unit", _UNIT_WORDS[folded]
    if folded in _TEEN_WORDS:
        return "teen", _TEEN_WORDS[folded]
    if folded in _TENS_WORDS:
        return "tens", _TENS_WORDS[folded]
    if folded == "hundred":
        return "hundred", 100
    if folded in _SCALE_WORDS:
        return "scale", _SCALE_WORDS[folded]
    return None


def _canonical_number(value: int | float) -> str:
    if isinstance(value, float) and value.is_integer():
        return str(int(value))
    return repr(value) if isinstance(value, float) else str(value)


def _word_number_phrases(text: str) -> list[tuple[int, int, int]]:
    """Find cardinal-word phrases; returns (start, end, value) triples."""
    tokens = [
        (m.start(), m.end(), _classify_number_word(m.group()))
        for m in _WORD_RE.finditer(text)
    ]
    phrases: list[tuple[int, int, int]] = []
    i = 0
    n = len(tokens)
    while i < n:
        start, end, cls = tokens[i]
        if cls is None:
            i += 1
            continue
        # Extend the phrase while the next lexicon token is adjacent
        # (whitespace/hyphen gap) and the transition is grammatical.
        current = 0
        total = 0
        state = "start"
        phrase_end = end
        j = i
        while j < n:
            tok_start, tok_end, tok_cls = tokens[j]
            if tok_cls is None:
                break
            kind, value = tok_cls
            if kind not in _NEXT_ALLOWED[state]:
                break
            if j > i:
                gap = text[tokens[j - 1][1]:tok_start]
                if not _TOKEN_GAP_RE.fullmatch(gap):
                    break
            if kind in ("unit", "teen", "tens"):
                current += value
            elif kind == "hundred":
                current = (current or 1) * 100
            else:  # scale
                total += (current or 1) * value
                current = 0
            state = kind
            phrase_end = tok_end
            j += 1
        phrases.append((start, phrase_end, total + current))
        i = j if j > i else i + 1
    return phrases


def _attach_percent(text: str, end: int) -> tuple[int, bool]:
    marker = _PERCENT_RE.match(text, end)
    if marker:
        return marker.end(), True
    return end, False


def extract_numbers(text: str) -> list[ElementSpan]:
    """Extract digit numerals, percent forms, and cardinal-word numbers.

    Ordinals ("3rd", "first") are not numbers. Unparseable near-numbers are
    simply not spans.
    """
    found: list[tuple[int, int, int | float]] = []
    for m in _DIGIT_NUMBER_RE.finditer(text):
        raw = m.group().replace(",", "")
        value: int | float = float(raw) if "." in raw else int(raw)
        found.append((m.start(), m.end(), value))
    found.extend(_word_number_phrases(text))
    found.sort(key=lambda item: item[0])

    spans = []
    for start, end, value in found:
        end, is_percent = _attach_percent(text, end)
        spans.append(
            ElementSpan(
                surface=text[start:end],
                start=start,
                end=end,
                kind=ElementKind.NUMBER,
                numeric_value=value,
                is_percent=is_percent,
                canonical=_canonical_number(value),
            )
        )
    return spans


def normalize_number(surface: str) -> tuple[int | float, bool]:
    """Parse one number surface into (numeric value, percent flag).

    Rejects input that does not match the number grammar.
    """
    stripped = surface.strip()
    spans = extract_numbers(stripped)
    if len(spans) != 1 or spans[0].start != 0 or spans[0].end != len(stripped):
        raise ValueError(f"not a number surface: {surface!r}")
    span = spans[0]
    return span.numeric_value, span.is_percent


_SENTENCE_BOUNDARY_RE = re.compile(r"[.!?]\s+")


def _sentence_start_positions(text: str) -> set[int]:
    starts = {len(text) - len(text.lstrip())}
    for m in _SENTENCE_BOUNDARY_RE.finditer(text):
        starts.add(m.end())
    return starts


_WS_GAP_RE = re.compile(r"\s+")


def _heuristic_entities(text: str) -> list[ElementSpan]:
    number_spans = extract_numbers(text)
    sentence_starts = _sentence_start_positions(text)

    def in_number(start: int, end: int) -> bool:
        return any(ns.start < end and start < ns.end for ns in number_spans)

    capitalized = [
        (m.start(), m.end(), m.group())
        for m in _WORD_RE.finditer(text)
        if m.group()[0].isupper() and not in_number(m.start(), m.end())
    ]

    groups: list[list[tuple[int, int, str]]] = []
    for token in capitalized:
        gap = text[groups[-1][-1][1]:token[0]] if groups else ""
        if groups and _WS_GAP_RE.fullmatch(gap):
            groups[-1].append(token)
        else:
            groups.append([token])

    spans = []
    for group in groups:
        first_start, _, first_word = group[0]
        if first_start in sentence_starts and first_word.casefold() in STOPWORDS:
            group = group[1:]
        if not group:
            continue
        start = group[0][0]
        end = group[-1][1]
        surface = text[start:end]
        spans.append(
            ElementSpan(
                surface=surface,
                start=start,
                end=end,
                kind=ElementKind.ENTITY,
                canonical=" ".join(surface.split()).casefold(),
            )
        )
    return spans


class TaggerClient:
    """HTTP client for an external entity tagger speaking the /tag protocol.

    Stateless: one POST per call, safe to share across threads.
    """

    def __init__(self, base_url: str, timeout: float = 30.0) -> None:
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout

    def tag(self, text: str) -> list[ElementSpan]:
        try:
            response = httpx.post(
                f"{self.base_url}/tag", json={"text": text}, timeout=self.timeout
            )
            response.raise_for_status()
        except httpx.HTTPError as exc:
            raise ExtractionError(f"entity tagger request failed: {exc}") from exc
        try:
            raw_spans = response.json()["spans"]
            spans = [
                ElementSpan(
                    surface=item["surface"],
                    start=int(item["start"]),
                    end=int(item["end"]),
                    kind=ElementKind.ENTITY,
                    canonical=" ".join(item["surface"].split()).casefold(),
                )
                for item in raw_spans
            ]
        except (KeyError, TypeError, ValueError) as exc:
            raise ProtocolError(f"malformed tagger response: {exc}") from exc
        spans.sort(key=lambda s: s.start)
        previous_end = 0
        for span in spans:
            if text[span.start:span.end] != span.surface:
                raise ProtocolError(
                    f"tagger span offsets do not match the request text: {span.surface!r}"
                )
            if span.start < previous_end:
                raise ProtocolError("tagger returned overlapping spans")
            previous_end = span.end
        return spans


def extract_entities(text: str, tagger: TaggerClient | None = None) -> list[ElementSpan]:
    """Extract named-entity spans.

    Without a tagger, a built-in heuristic returns maximal capitalized-token
    sequences (leading sentence-initial function words trimmed, number spans
    excluded). With a tagger, spans come from the external service and the
    heuristic is bypassed; invalid service spans raise rather than degrade.
    """
    if tagger is not None:
        return tagger.tag(text)
    return _heuristic_entities(text)


def content_terms(text: str) -> TermProfile:
    """Case-fold, split on non-letter boundaries, drop stopwords, count the rest."""
    counts = Counter(
        token
        for token in (m.group().casefold() for m in _WORD_RE.finditer(text))
        if token not in STOPWORDS
    )
    return TermProfile(terms=dict(counts))
