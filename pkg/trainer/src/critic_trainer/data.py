"""Training JSONL ingestion and text encoding.

Consumes the counter-response training schema exactly as emitted:
one object per line with id, claim, evidence, explanation_variant, critique,
element_kind, label, replacement. Schema violations raise DataError naming
the offending line number.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

ELEMENT_KINDS = ("number", "entity", "topic")

_REQUIRED_FIELDS = (
    "id",
    "claim",
    "evidence",
    "explanation_variant",
    "critique",
    "element_kind",
    "label",
)

PAD, BOS, EOS, UNK = "<pad>", "<bos>", "<eos>", "<unk>"
_SPECIALS = (PAD, BOS, EOS, UNK)


class DataError(Exception):
    """A training JSONL line does not match the schema."""


@dataclass(frozen=True)
class Example:
    input_text: str
    target_text: str
    element_kind: str
    label: str


def render_input(element_kind: str, claim: str, evidence: str, text: str) -> str:
    """The model input serialization; `text` is the explanation variant during
    training and the response being critiqued at inference."""
    return f"critique {element_kind} | claim: {claim} | evidence: {evidence} | explanation: {text}"


def load_examples(path: str | Path, element_kind: str | None = None) -> list[Example]:
    """Read and validate the JSONL; optionally keep one element kind only."""
    if element_kind is not None and element_kind not in ELEMENT_KINDS:
        raise ValueError(f"unknown element kind: {element_kind!r}")
    examples = []
    with open(path, encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"line {line_number}: not valid JSON ({exc})") from exc
            if not isinstance(record, dict):
                raise DataError(f"line {line_number}: expected an object")
            for field in _REQUIRED_FIELDS:
                if field not in record:
                    raise DataError(f"line {line_number}: missing field {field!r}")
                if not isinstance(record[field], str) or not record[field]:
                    raise DataError(f"line {line_number}: field {field!r} must be a non-empty string")
            if record["element_kind"] not in ELEMENT_KINDS:
                raise DataError(
                    f"line {line_number}: unknown element_kind {record['element_kind']!r}"
                )
            if record["label"] not in ("factual", "counterfactual"):
                raise DataError(f"line {line_number}: unknown label {record['label']!r}")
            if element_kind is not None and record["element_kind"] != element_kind:
                continue
            examples.append(
                Example(
                    input_text=render_input(
                        record["element_kind"],
                        record["claim"],
                        record["evidence"],
                        record["explanation_variant"],
                    ),
                    target_text=record["critique"],
                    element_kind=record["element_kind"],
                    label=record["label"],
                )
            )
    return examples


def tokenize(text: str) -> list[str]:
    """Whitespace tokens; keeps case and punctuation so decoded critiques can
    reproduce template text exactly up to whitespace normalization."""
    return text.split()


class Vocab:
    """Word-level vocabulary built from training text."""

    def __init__(self, tokens: list[str]) -> None:
        self.itos = list(_SPECIALS) + sorted(set(tokens) - set(_SPECIALS))
        self.stoi = {token: index for index, token in enumerate(self.itos)}

    def __len__(self) -> int:
        return len(self.itos)

    @property
    def pad_id(self) -> int:
        return self.stoi[PAD]

    @property
    def bos_id(self) -> int:
        return self.stoi[BOS]

    @property
    def eos_id(self) -> int:
        return self.stoi[EOS]

    def encode(self, text: str, limit: int | None = None) -> list[int]:
        unk = self.stoi[UNK]
        ids = [self.stoi.get(token, unk) for token in tokenize(text)]
        if limit is not None:
            ids = ids[:limit]
        return ids

    def decode(self, ids: list[int]) -> str:
        words = []
        for token_id in ids:
            token = self.itos[token_id] if 0 <= token_id < len(self.itos) else UNK
            if token in (EOS, PAD):
                break
            if token in (BOS, UNK):
                continue
            words.append(token)
        return " ".join(words)

    @classmethod
    def from_examples(cls, examples: list[Example]) -> "Vocab":
        tokens: list[str] = []
        for example in examples:
            tokens.extend(tokenize(example.input_text))
            tokens.extend(tokenize(example.target_text))
        return cls(tokens)
