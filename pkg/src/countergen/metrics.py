"""Response quality metrics: grounding proxies, judge-scored dimensions,
atomic-fact precision, and the overall average."""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass
from typing import Sequence

from .core import ElementKind
from .elements import extract_entities, extract_numbers
from .errors import CountergenError, MetricError
from .llm import CompletionClient
from .prompts import load_prompt

logger = logging.getLogger(__name__)

__all__ = [
    "JUDGE_DIMENSIONS",
    "MetricReport",
    "grounding_score",
    "geval_score",
    "factscore",
    "overall",
    "score_response",
]

JUDGE_DIMENSIONS = ("numerical", "entity", "faithfulness", "refutation")

_DIMENSION_PROMPTS = {
    "numerical": "judge_numerical",
    "entity": "judge_entity",
    "faithfulness": "judge_faithfulness",
    "refutation": "judge_refutation",
}

DEFAULT_FACT_PENALTY_GAMMA = 10


@dataclass(frozen=True)
class MetricReport:
    """All scores for one response; overall is the mean of the five components."""

    response_id: str
    numerical: float
    entity: float
    faithfulness: float
    refutation: float
    factscore: float
    overall: float
    atomic_fact_count: int
    judge_model: str


def grounding_score(response: str, evidence: str, claim: str, kind: ElementKind) -> float:
    """Fraction of response elements of the given kind grounded by membership.

    Numbers ground against evidence values; entities against evidence plus
    claim entities. A response with no such elements scores 1.0.
    """
    if kind is ElementKind.NUMBER:
        spans = extract_numbers(response)
        grounded = {s.canonical for s in extract_numbers(evidence)}
    elif kind is ElementKind.ENTITY:
        spans = extract_entities(response)
        grounded = {s.canonical for s in extract_entities(evidence)}
        grounded |= {s.canonical for s in extract_entities(claim)}
    else:
        raise ValueError("grounding_score applies to numbers and entities only")
    if not spans:
        return 1.0
    return sum(1 for s in spans if s.canonical in grounded) / len(spans)


_INTEGER_RE = re.compile(r"\b\d+\b")


def _parse_scale_score(reply: str) -> int | None:
    for match in _INTEGER_RE.finditer(reply):
        value = int(match.group())
        if 1 <= value <= 5:
            return value
    return None


def geval_score(
    judge: CompletionClient,
    dimension: str,
    claim: str,
    evidence: str,
    response: str,
    retries: int = 2,
) -> float:
    """Judge one dimension on a 1-5 scale and map it linearly onto [0,1]."""
    if dimension not in _DIMENSION_PROMPTS:
        raise ValueError(f"unknown judge dimension: {dimension!r}")
    prompt = load_prompt(_DIMENSION_PROMPTS[dimension]).format(
        claim=claim, evidence=evidence, response=response
    )
    for attempt in range(retries + 1):
        reply = judge.complete([("user", prompt)])
        score = _parse_scale_score(reply)
        if score is not None:
            return (score - 1) / 4
        logger.warning("judge reply for %s had no 1-5 score (attempt %d)", dimension, attempt + 1)
    raise MetricError(f"judge produced no parseable {dimension} score after {retries + 1} attempts")


_BULLET_RE = re.compile(r"^\s*(?:[-*•]|\d+[.)])\s*")
_VERDICT_RE = re.compile(r"\b(true|false)\b", re.IGNORECASE)


def _parse_fact_lines(reply: str) -> list[str]:
    facts = []
    for line in reply.splitlines():
        stripped = _BULLET_RE.sub("", line).strip()
        if stripped:
            facts.append(stripped)
    return facts


def factscore(
    judge: CompletionClient,
    response: str,
    evidence: str,
    gamma: float = DEFAULT_FACT_PENALTY_GAMMA,
    retries: int = 2,
) -> tuple[float, int]:
    """Atomic-fact precision with a short-output penalty.

    Phase 1 extracts one fact per line; phase 2 verdicts each fact against
    the evidence. Returns (precision * min(1, exp(1 - gamma/n)), n).
    """
    extract_prompt = load_prompt("facts_extract").format(response=response)
    facts: list[str] = []
    for attempt in range(retries + 1):
        reply = judge.complete([("user", extract_prompt)])
        facts = _parse_fact_lines(reply)
        if facts:
            break
    if not facts:
        logger.warning("no atomic facts extracted; scoring 0.0")
        return 0.0, 0

    supported = 0
    verify_template = load_prompt("facts_verify")
    for fact in facts:
        prompt = verify_template.format(evidence=evidence, fact=fact)
        verdict: bool | None = None
        for attempt in range(retries + 1):
            reply = judge.complete([("user", prompt)])
            match = _VERDICT_RE.search(reply)
            if match:
                verdict = match.group(1).casefold() == "true"
                break
            logger.warning("fact verdict unparseable (attempt %d)", attempt + 1)
        if verdict is None:
            raise MetricError(f"judge produced no verdict for fact: {fact[:80]!r}")
        supported += int(verdict)

    precision = supported / len(facts)
    penalty = min(1.0, math.exp(1 - gamma / len(facts)))
    return precision * penalty, len(facts)


def overall(scores: Sequence[float | None]) -> float:
    """Arithmetic mean of the five component scores; no partial averaging.

    fsum keeps the mean exactly permutation-invariant.
    """
    values = list(scores)
    if len(values) != 5 or any(v is None for v in values):
        raise MetricError("overall requires all five component scores")
    return math.fsum(values) / 5  # type: ignore[arg-type]


def score_response(
    judge: CompletionClient,
    response_id: str,
    claim: str,
    evidence: str,
    response: str,
    gamma: float = DEFAULT_FACT_PENALTY_GAMMA,
    retries: int = 2,
) -> MetricReport:
    """Full per-response report: four judge dimensions, factscore, overall."""
    dims = {
        dim: geval_score(judge, dim, claim, evidence, response, retries=retries)
        for dim in JUDGE_DIMENSIONS
    }
    fact_value, fact_count = factscore(judge, response, evidence, gamma=gamma, retries=retries)
    components = [dims["numerical"], dims["entity"], dims["faithfulness"],
                  dims["refutation"], fact_value]
    return MetricReport(
        response_id=response_id,
        numerical=dims["numerical"],
        entity=dims["entity"],
        faithfulness=dims["faithfulness"],
        refutation=dims["refutation"],
        factscore=fact_value,
        overall=overall(components),
        atomic_fact_count=fact_count,
        judge_model=judge.model,
    )
