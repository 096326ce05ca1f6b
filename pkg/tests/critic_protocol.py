"""Reusable conformance check for the critic wire protocol (POST /critique).

Run by the library's own tests against a stub service, and by any real
critic server's tests to prove drop-in compatibility.
"""

from __future__ import annotations

import httpx

from countergen import ElementKind, model_critique

CLAIM = "the transit office in Ardale counted the wrong number of permits."
EVIDENCE = (
    "the transit office in Ardale counted 4,210 permits this year. "
    "the harbor office in Brinton counted 57 manifests this year."
)
RESPONSE = "the transit office in Ardale counted 4,210 permits this year."


def assert_critic_protocol(base_url: str, timeout: float = 60.0) -> None:
    for kind in ElementKind:
        critique = model_critique(
            base_url, kind, CLAIM, EVIDENCE, RESPONSE, timeout=timeout
        )
        assert critique.element_kind is kind
        assert isinstance(critique.positive, bool)
        assert critique.source == "model"
        assert critique.text.strip()
        assert len(critique.text.split()) <= 150

    unknown_kind = httpx.post(
        f"{base_url}/critique",
        json={
            "element_kind": "sentiment",
            "claim": CLAIM,
            "evidence": EVIDENCE,
            "response": RESPONSE,
        },
        timeout=timeout,
    )
    assert 400 <= unknown_kind.status_code < 500

    malformed = httpx.post(
        f"{base_url}/critique",
        content=b"{not json",
        headers={"Content-Type": "application/json"},
        timeout=timeout,
    )
    assert 400 <= malformed.status_code < 500
