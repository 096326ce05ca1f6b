"""The generation loop: prompt, critique, refine, trace.

One article flows through: initial prompt -> LLM -> critics -> (if any
critique is negative and rounds remain) refine prompt -> LLM -> ... The
final refinement is reported, not re-critiqued, unless verify_final is set.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

from .core import CounterResponse, ElementKind, FactCheckArticle
from .critics import AggregatedCritique, Critique, aggregate
from .errors import CountergenError, GenerationError, PromptError, TransportError
from .llm import CompletionClient, CompletionResult, Message
from .prompts import load_prompt

logger = logging.getLogger(__name__)

__all__ = [
    "PromptMessages",
    "GenerationConfig",
    "GenerationTrace",
    "build_initial_prompt",
    "build_refine_prompt",
    "chat_complete",
    "generate_counter_response",
]

ALL_KINDS = frozenset((ElementKind.NUMBER, ElementKind.ENTITY, ElementKind.TOPIC))


@dataclass(frozen=True)
class PromptMessages:
    """An ordered chat transcript to send; the first message is the system one."""

    messages: tuple[Message, ...]

    def __post_init__(self) -> None:
        if not self.messages:
            raise ValueError("prompt must contain at least one message")
        if self.messages[0][0] != "system":
            raise ValueError("the first prompt message must be the system message")
        for role, _ in self.messages:
            if role not in ("system", "user", "assistant"):
                raise ValueError(f"unknown message role: {role!r}")

    def total_chars(self) -> int:
        return sum(len(content) for _, content in self.messages)

    def as_list(self) -> list[Message]:
        return list(self.messages)


@dataclass(frozen=True)
class GenerationConfig:
    """Everything one generation run needs to know."""

    endpoint: str
    model_name: str
    temperature: float = 1.0
    max_tokens: int | None = None
    max_rounds: int = 1
    critic_mode: str = "rule"  # "rule" | "model" | "mixed"
    enabled_critics: frozenset[ElementKind] = ALL_KINDS
    topic_threshold: float = 0.15
    seed: int | None = None
    prompt_char_budget: int | None = None
    truncate_evidence: bool = False
    verify_final: bool = False
    retry_budget: int = 2
    timeout: float = 60.0
    template_dir: str | Path | None = None

    def __post_init__(self) -> None:
        if self.max_rounds < 0:
            raise ValueError("max_rounds must be >= 0")
        if self.critic_mode not in ("rule", "model", "mixed"):
            raise ValueError(f"unknown critic mode: {self.critic_mode!r}")


@dataclass(frozen=True)
class GenerationTrace:
    """Full record of one pipeline run for one article."""

    article_id: str
    initial: CounterResponse
    rounds: tuple[AggregatedCritique, ...]
    refined: CounterResponse
    llm_calls: int
    latencies_s: tuple[float, ...]
    prompts: tuple[PromptMessages, ...]
    evidence_truncated: bool = False
    verify: AggregatedCritique | None = None


class CriticSuite(Protocol):
    def critique(
        self, kind: ElementKind, claim: str, evidence: str, response: str
    ) -> Critique: ...


def _fit_budget(
    system: str, user_template: str, fields: dict[str, str], config: GenerationConfig
) -> tuple[str, bool]:
    """Render the user message inside the char budget, truncating evidence if allowed."""
    user = user_template.format(**fields)
    budget = config.prompt_char_budget
    if budget is None or len(system) + len(user) <= budget:
        return user, False
    if not config.truncate_evidence:
        raise PromptError(
            f"prompt of {len(system) + len(user)} chars exceeds budget {budget}"
        )
    overflow = len(system) + len(user) - budget
    evidence = fields["evidence"]
    if overflow >= len(evidence):
        raise PromptError("evidence cannot be truncated enough to fit the budget")
    trimmed = dict(fields, evidence=evidence[: len(evidence) - overflow])
    return user_template.format(**trimmed), True


def _build_initial(
    claim: str, evidence: str, config: GenerationConfig
) -> tuple[PromptMessages, bool]:
    if not claim.strip():
        raise ValueError("claim must be non-empty")
    if not evidence.strip():
        raise ValueError("evidence must be non-empty")
    system = load_prompt("counter_initial_system", config.template_dir)
    template = load_prompt("counter_initial_user", config.template_dir)
    user, truncated = _fit_budget(
        system, template, {"claim": claim, "evidence": evidence}, config
    )
    return PromptMessages(messages=(("system", system), ("user", user))), truncated


def build_initial_prompt(
    claim: str, evidence: str, config: GenerationConfig | None = None
) -> PromptMessages:
    """Render the first-pass prompt: task statement plus labeled claim and facts."""
    config = config or GenerationConfig(endpoint="", model_name="")
    return _build_initial(claim, evidence, config)[0]


def _build_refine(
    claim: str,
    evidence: str,
    initial: CounterResponse,
    agg: AggregatedCritique,
    config: GenerationConfig,
) -> tuple[PromptMessages, bool]:
    if agg.all_positive:
        raise ValueError("refinement requires at least one negative critique")
    if not claim.strip() or not evidence.strip():
        raise ValueError("claim and evidence must be non-empty")
    system = load_prompt("counter_initial_system", config.template_dir)
    template = load_prompt("counter_refine_user", config.template_dir)
    fields = {
        "claim": claim,
        "evidence": evidence,
        "response": initial.text,
        "critique": agg.text,
    }
    user, truncated = _fit_budget(system, template, fields, config)
    return PromptMessages(messages=(("system", system), ("user", user))), truncated


def build_refine_prompt(
    claim: str,
    evidence: str,
    initial: CounterResponse,
    agg: AggregatedCritique,
    config: GenerationConfig | None = None,
) -> PromptMessages:
    """Render the feedback prompt; only built when some critique is negative."""
    config = config or GenerationConfig(endpoint="", model_name="")
    return _build_refine(claim, evidence, initial, agg, config)[0]


def _client(config: GenerationConfig) -> CompletionClient:
    return CompletionClient(
        endpoint=config.endpoint,
        model=config.model_name,
        temperature=config.temperature,
        max_tokens=config.max_tokens,
        seed=config.seed,
        retry_budget=config.retry_budget,
        timeout=config.timeout,
    )


def _complete(client: CompletionClient, prompt: PromptMessages) -> CompletionResult:
    try:
        return client.complete_detailed(prompt.as_list())
    except TransportError as exc:
        raise GenerationError(f"generation endpoint failed: {exc}") from exc


def chat_complete(config: GenerationConfig, messages: PromptMessages) -> str:
    """Send one chat-completions request per the configured endpoint."""
    return _complete(_client(config), messages).text


def _run_critics(
    suite: CriticSuite, config: GenerationConfig, claim: str, evidence: str, response: str
) -> AggregatedCritique:
    kinds = [k for k in (ElementKind.NUMBER, ElementKind.ENTITY, ElementKind.TOPIC)
             if k in config.enabled_critics]
    parts = [suite.critique(kind, claim, evidence, response) for kind in kinds]
    return aggregate(*parts, expected_kinds=kinds)


def generate_counter_response(
    article: FactCheckArticle,
    config: GenerationConfig,
    critics: CriticSuite,
) -> GenerationTrace:
    """Produce the initial response, critique it, and refine while rounds remain.

    Raises with the partial trace attached (``exc.partial_trace``) when a
    prompt, generation, or critic step fails mid-run.
    """
    claim = article.claim
    evidence = article.require_evidence()
    client = _client(config)

    prompts: list[PromptMessages] = []
    latencies: list[float] = []
    rounds: list[AggregatedCritique] = []
    initial: CounterResponse | None = None
    current: CounterResponse | None = None
    refinements = 0
    evidence_truncated = False

    def _partial_trace() -> GenerationTrace | None:
        if initial is None:
            return None
        return GenerationTrace(
            article_id=article.id,
            initial=initial,
            rounds=tuple(rounds),
            refined=current if current is not None else initial,
            llm_calls=1 + refinements,
            latencies_s=tuple(latencies),
            prompts=tuple(prompts),
            evidence_truncated=evidence_truncated,
        )

    try:
        prompt, truncated = _build_initial(claim, evidence, config)
        evidence_truncated = evidence_truncated or truncated
        prompts.append(prompt)
        result = _complete(client, prompt)
        latencies.append(result.latency_s)
        initial = CounterResponse(text=result.text, stage="initial")
        current = initial

        while config.enabled_critics:
            agg = _run_critics(critics, config, claim, evidence, current.text)
            rounds.append(agg)
            if agg.all_positive or refinements == config.max_rounds:
                break
            prompt, truncated = _build_refine(claim, evidence, current, agg, config)
            evidence_truncated = evidence_truncated or truncated
            prompts.append(prompt)
            result = _complete(client, prompt)
            latencies.append(result.latency_s)
            current = CounterResponse(text=result.text, stage="refined")
            refinements += 1
            if refinements == config.max_rounds:
                break  # final refinement is reported, not re-critiqued

        verify = None
        if config.verify_final and refinements > 0:
            verify = _run_critics(critics, config, claim, evidence, current.text)

        return GenerationTrace(
            article_id=article.id,
            initial=initial,
            rounds=tuple(rounds),
            refined=current,
            llm_calls=1 + refinements,
            latencies_s=tuple(latencies),
            prompts=tuple(prompts),
            evidence_truncated=evidence_truncated,
            verify=verify,
        )
    except CountergenError as exc:
        exc.partial_trace = _partial_trace()  # type: ignore[attr-defined]
        raise


def trace_to_dict(trace: GenerationTrace, include_latencies: bool = False) -> dict:
    """Serialize a trace; latencies are omitted by default so artifact files
    stay byte-comparable across runs (they live in run metadata instead)."""

    def _agg(agg: AggregatedCritique) -> dict:
        return {
            "parts": [
                {
                    "element_kind": part.element_kind.value,
                    "positive": part.positive,
                    "text": part.text,
                    "flagged": [
                        {"surface": f.surface, "suggestion": f.suggestion}
                        for f in part.flagged
                    ],
                    "source": part.source,
                }
                for part in agg.parts
            ],
            "all_positive": agg.all_positive,
            "text": agg.text,
        }

    record = {
        "article_id": trace.article_id,
        "initial": {"text": trace.initial.text, "stage": trace.initial.stage},
        "rounds": [_agg(agg) for agg in trace.rounds],
        "refined": {"text": trace.refined.text, "stage": trace.refined.stage},
        "llm_calls": trace.llm_calls,
        "prompts": [
            [{"role": role, "content": content} for role, content in prompt.messages]
            for prompt in trace.prompts
        ],
        "evidence_truncated": trace.evidence_truncated,
        "verify": _agg(trace.verify) if trace.verify is not None else None,
    }
    if include_latencies:
        record["latencies_s"] = list(trace.latencies_s)
    return record
