"""Dataset loading, label filtering, statistics, and deterministic splits.

Loaders are total: every input row becomes either an article or a reject
record; nothing is silently repaired or dropped.
"""

from __future__ import annotations

import csv
import json
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .core import FactCheckArticle, VeracityLabel, normalize_label
from .elements import extract_entities, extract_numbers
from .errors import SchemaError

__all__ = [
    "FieldMap",
    "RejectRecord",
    "LoadResult",
    "SectionStats",
    "DatasetStats",
    "load_tsv",
    "load_shared_evidence",
    "filter_by_label",
    "dataset_stats",
    "split",
]


@dataclass(frozen=True)
class FieldMap:
    """Maps article fields to source column/key names."""

    claim: str
    evidence: str
    label: str
    explanation: str | None = None
    id: str | None = None


@dataclass(frozen=True)
class RejectRecord:
    row: int  # 1-based data row number
    reason: str
    raw: dict


@dataclass
class LoadResult:
    articles: list[FactCheckArticle] = field(default_factory=list)
    rejects: list[RejectRecord] = field(default_factory=list)

    @property
    def total_rows(self) -> int:
        return len(self.articles) + len(self.rejects)


def _build_article(
    row: dict, row_number: int, field_map: FieldMap, dataset_name: str, evidence: str | None
) -> FactCheckArticle:
    claim = (row.get(field_map.claim) or "").strip()
    if evidence is None:
        evidence = (row.get(field_map.evidence) or "").strip()
    if not claim:
        raise ValueError("empty claim")
    if not evidence:
        raise ValueError("empty evidence")
    explanation = None
    if field_map.explanation is not None:
        explanation = row.get(field_map.explanation) or None
    article_id = (
        str(row.get(field_map.id)) if field_map.id and row.get(field_map.id) else f"row{row_number}"
    )
    return FactCheckArticle(
        id=article_id,
        claim=claim,
        evidence=evidence,
        explanation=explanation,
        label=normalize_label(row.get(field_map.label) or ""),
        source=f"{dataset_name}:{article_id}",
    )


def _require_columns(columns: Sequence[str] | None, field_map: FieldMap, path: str) -> None:
    present = set(columns or [])
    required = {"claim": field_map.claim, "evidence": field_map.evidence, "label": field_map.label}
    if field_map.explanation is not None:
        required["explanation"] = field_map.explanation
    for role, column in required.items():
        if column not in present:
            raise SchemaError(f"{path}: missing {role} column {column!r}")


def load_tsv(
    path: str | Path, field_map: FieldMap, dataset_name: str = "tsv"
) -> LoadResult:
    """Load a tab-separated file with a header row."""
    result = LoadResult()
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle, delimiter="\t")
        _require_columns(reader.fieldnames, field_map, str(path))
        for row_number, row in enumerate(reader, start=1):
            try:
                result.articles.append(
                    _build_article(row, row_number, field_map, dataset_name, evidence=None)
                )
            except ValueError as exc:
                result.rejects.append(RejectRecord(row=row_number, reason=str(exc), raw=dict(row)))
    return result


def load_shared_evidence(
    claims_path: str | Path,
    evidence_path: str | Path,
    field_map: FieldMap,
    dataset_name: str = "shared",
) -> LoadResult:
    """Pair every claim row with the full text of one shared evidence document."""
    evidence = Path(evidence_path).read_text(encoding="utf-8")
    if not evidence.strip():
        raise SchemaError(f"{evidence_path}: evidence document is empty")

    claims_path = Path(claims_path)
    result = LoadResult()
    if claims_path.suffix in (".jsonl", ".json"):
        with open(claims_path, encoding="utf-8") as handle:
            rows = [json.loads(line) for line in handle if line.strip()]
        if rows:
            _require_columns_shared(rows[0].keys(), field_map, str(claims_path))
        for row_number, row in enumerate(rows, start=1):
            try:
                result.articles.append(
                    _build_article(row, row_number, field_map, dataset_name, evidence=evidence)
                )
            except ValueError as exc:
                result.rejects.append(RejectRecord(row=row_number, reason=str(exc), raw=dict(row)))
        return result

    with open(claims_path, encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle, delimiter="\t")
        _require_columns_shared(reader.fieldnames, field_map, str(claims_path))
        for row_number, row in enumerate(reader, start=1):
            try:
                result.articles.append(
                    _build_article(row, row_number, field_map, dataset_name, evidence=evidence)
                )
            except ValueError as exc:
                result.rejects.append(RejectRecord(row=row_number, reason=str(exc), raw=dict(row)))
    return result


def _require_columns_shared(columns: Iterable[str] | None, field_map: FieldMap, path: str) -> None:
    present = set(columns or [])
    required = {"claim": field_map.claim, "label": field_map.label}
    if field_map.explanation is not None:
        required["explanation"] = field_map.explanation
    for role, column in required.items():
        if column not in present:
            raise SchemaError(f"{path}: missing {role} column {column!r}")


def filter_by_label(
    articles: Iterable[FactCheckArticle], keep: Iterable[VeracityLabel]
) -> list[FactCheckArticle]:
    keep_set = set(keep)
    return [article for article in articles if article.label in keep_set]


@dataclass(frozen=True)
class SectionStats:
    avg_tokens: float
    avg_numbers: float
    avg_entities: float


@dataclass(frozen=True)
class DatasetStats:
    claim: SectionStats
    evidence: SectionStats
    explanation: SectionStats | None
    n_articles: int


def _section_stats(texts: Sequence[str]) -> SectionStats:
    n = len(texts)
    return SectionStats(
        avg_tokens=sum(len(text.split()) for text in texts) / n,
        avg_numbers=sum(len(extract_numbers(text)) for text in texts) / n,
        avg_entities=sum(len(extract_entities(text)) for text in texts) / n,
    )


def dataset_stats(articles: Sequence[FactCheckArticle]) -> DatasetStats:
    """Average token/number/entity counts per section.

    Tokens are whitespace-delimited. Explanation averages cover only the
    articles that have an explanation.
    """
    if not articles:
        raise ValueError("dataset_stats requires at least one article")
    explanations = [a.explanation for a in articles if a.explanation]
    return DatasetStats(
        claim=_section_stats([a.claim for a in articles]),
        evidence=_section_stats([a.evidence for a in articles]),
        explanation=_section_stats(explanations) if explanations else None,
        n_articles=len(articles),
    )


def split(
    articles: Sequence[FactCheckArticle],
    ratios: tuple[float, float, float] = (0.8, 0.1, 0.1),
    seed: int = 0,
) -> tuple[list[FactCheckArticle], list[FactCheckArticle], list[FactCheckArticle]]:
    """Deterministic shuffled split at cumulative floor boundaries.

    For n=10 at 0.8/0.1/0.1 the sizes are (8,1,1); for n=9 they are (7,1,1).
    """
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError("split ratios must sum to 1")
    if any(r < 0 for r in ratios):
        raise ValueError("split ratios must be non-negative")
    order = list(articles)
    random.Random(seed).shuffle(order)
    n = len(order)
    cut1 = math.floor(n * ratios[0] + 1e-9)
    cut2 = math.floor(n * (ratios[0] + ratios[1]) + 1e-9)
    return order[:cut1], order[cut1:cut2], order[cut2:]
