"""HTTP service implementing the critic wire protocol.

POST /critique with {"element_kind", "claim", "evidence", "response"} returns
{"positive": bool, "critique": str}. A critique is positive exactly when the
generated text, after whitespace normalization, equals one of the three
affirmative templates; that rule is a pure function of the text.
"""

from __future__ import annotations

import logging
from pathlib import Path

import uvicorn
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .data import ELEMENT_KINDS, render_input
from .train import ARTIFACT_NAME, load_artifact

logger = logging.getLogger(__name__)

AFFIRMATIVE_TEMPLATES = (
    "The numbers are correct",
    "The entities are correct",
    "The explanation is on the topic of the claim",
)


def is_affirmative(text: str) -> bool:
    return " ".join(text.split()) in AFFIRMATIVE_TEMPLATES


class CritiqueRequest(BaseModel):
    element_kind: str
    claim: str
    evidence: str
    response: str


def create_app(model_dir: str | Path) -> FastAPI:
    model_dir = Path(model_dir)
    models = {}
    for kind in ELEMENT_KINDS:
        if (model_dir / kind / ARTIFACT_NAME).exists():
            models[kind] = load_artifact(model_dir / kind)
            logger.info("loaded %s critic from %s", kind, model_dir / kind)
    if not models:
        raise FileNotFoundError(f"no trained critic artifacts under {model_dir}")

    app = FastAPI(title="critic-server")

    @app.post("/critique")
    def critique(request: CritiqueRequest) -> dict:
        if request.element_kind not in ELEMENT_KINDS:
            raise HTTPException(status_code=400, detail=f"unknown element_kind {request.element_kind!r}")
        if request.element_kind not in models:
            raise HTTPException(status_code=400, detail=f"no model trained for {request.element_kind!r}")
        model, vocab, meta = models[request.element_kind]
        source = render_input(
            request.element_kind, request.claim, request.evidence, request.response
        )
        ids = vocab.encode(source, limit=meta["max_input_tokens"]) or [vocab.pad_id]
        generated = model.generate(
            ids, vocab.bos_id, vocab.eos_id, max_tokens=meta["max_output_tokens"]
        )
        text = vocab.decode(generated)
        return {"positive": is_affirmative(text), "critique": text}

    return app


def serve(model_dir: str | Path, port: int, host: str = "127.0.0.1") -> None:
    """Blocking server start; handles concurrent requests."""
    uvicorn.run(create_app(model_dir), host=host, port=port, log_level="warning")
