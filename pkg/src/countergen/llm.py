"""OpenAI-compatible chat-completions client used by generation, datagen, and judges.

Wire format: POST {endpoint}/v1/chat/completions with
{"model", "messages": [{"role", "content"}], "temperature", "max_tokens", "seed"?};
the completion is read from choices[0].message.content.
"""

from __future__ import annotations

import logging
import os
import time
from dataclasses import dataclass, field

import httpx

from .errors import GenerationError, ProtocolError, TransportError

logger = logging.getLogger(__name__)

API_KEY_ENV_VAR = "LLM_API_KEY"

Message = tuple[str, str]

_RETRYABLE_STATUS = {429, 500, 502, 503, 504}


@dataclass(frozen=True)
class CompletionResult:
    text: str
    attempts: int
    latency_s: float


@dataclass
class CompletionClient:
    """Synchronous chat-completions client with idempotent retry on transient failures.

    Stateless between calls; safe to share across threads.
    """

    endpoint: str
    model: str
    temperature: float = 1.0
    max_tokens: int | None = None
    seed: int | None = None
    retry_budget: int = 2
    backoff_s: float = 0.1
    timeout: float = 60.0
    api_key: str | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.api_key is None:
            self.api_key = os.environ.get(API_KEY_ENV_VAR)

    def _body(self, messages: list[Message]) -> dict:
        body: dict = {
            "model": self.model,
            "messages": [{"role": role, "content": content} for role, content in messages],
            "temperature": self.temperature,
        }
        if self.max_tokens is not None:
            body["max_tokens"] = self.max_tokens
        if self.seed is not None:
            body["seed"] = self.seed
        return body

    def complete_detailed(self, messages: list[Message]) -> CompletionResult:
        url = f"{self.endpoint.rstrip('/')}/v1/chat/completions"
        headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
        body = self._body(messages)
        started = time.perf_counter()
        last_error: Exception | None = None
        attempts = 0
        for attempt in range(self.retry_budget + 1):
            attempts = attempt + 1
            try:
                response = httpx.post(url, json=body, headers=headers, timeout=self.timeout)
            except httpx.HTTPError as exc:
                last_error = exc
                logger.warning("completion attempt %d failed: %s", attempts, exc)
                time.sleep(self.backoff_s * attempt)
                continue
            if response.status_code in _RETRYABLE_STATUS:
                last_error = TransportError(
                    f"completion endpoint returned HTTP {response.status_code}"
                )
                logger.warning(
                    "completion attempt %d got HTTP %d", attempts, response.status_code
                )
                time.sleep(self.backoff_s * attempt)
                continue
            if response.status_code != 200:
                raise TransportError(
                    f"completion endpoint returned HTTP {response.status_code}: "
                    f"{response.text[:200]}"
                )
            try:
                content = response.json()["choices"][0]["message"]["content"]
            except (KeyError, IndexError, TypeError, ValueError) as exc:
                raise ProtocolError(f"malformed completion response: {exc}") from exc
            if not isinstance(content, str) or not content.strip():
                raise GenerationError("completion endpoint returned an empty message")
            return CompletionResult(
                text=content,
                attempts=attempts,
                latency_s=time.perf_counter() - started,
            )
        raise TransportError(
            f"completion endpoint unreachable after {attempts} attempts: {last_error}"
        ) from last_error

    def complete(self, messages: list[Message]) -> str:
        return self.complete_detailed(messages).text
