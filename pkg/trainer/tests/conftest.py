"""Trainer test setup.

The toy training JSONL is produced through the primary library's datagen
(the file format is the integration surface), and the primary's critic
protocol check is imported unchanged from its test tree.
"""

from __future__ import annotations

import sys
from pathlib import Path

import pytest

PRIMARY_TESTS = Path(__file__).resolve().parents[2] / "tests"
if str(PRIMARY_TESTS) not in sys.path:
    sys.path.insert(0, str(PRIMARY_TESTS))


@pytest.fixture(scope="session")
def toy_jsonl(tmp_path_factory) -> Path:
    """A 50-instance training file covering all kinds and both labels."""
    from countergen import (
        emit_jsonl,
        make_entity_replacements,
        make_factual_instances,
        make_number_replacements,
    )
    from countergen.core import ElementKind
    from countergen.datagen import TrainingInstance

    from fixtures import article_batch

    pools: dict[tuple[str, str], list[TrainingInstance]] = {}
    for article in article_batch(20, seed=9001, grounded=True):
        for instance in (
            make_factual_instances(article)
            + make_number_replacements(article, cap=3)
            + make_entity_replacements(article, cap=3)
        ):
            pools.setdefault((instance.element_kind.value, instance.label), []).append(instance)
    # topic counterfactuals, in the emitted schema, without a live endpoint
    for i, article in enumerate(article_batch(4, seed=9002, grounded=True)):
        pools.setdefault(("topic", "counterfactual"), []).append(
            TrainingInstance(
                id=f"{article.id}:topic:{i}",
                claim=article.claim,
                evidence=article.evidence,
                explanation_variant="the office repainted its lobby in spring colors.",
                critique=(
                    "The claim is about counted figures, but the explanation is not "
                    "correct because it is about lobby decoration."
                ),
                element_kind=ElementKind.TOPIC,
                label="counterfactual",
            )
        )

    quota = {
        ("number", "factual"): 7,
        ("number", "counterfactual"): 14,
        ("entity", "factual"): 7,
        ("entity", "counterfactual"): 14,
        ("topic", "factual"): 4,
        ("topic", "counterfactual"): 4,
    }
    instances = []
    for key, need in quota.items():
        assert len(pools.get(key, [])) >= need, f"pool too small for {key}"
        instances.extend(pools[key][:need])
    assert len(instances) == 50

    path = tmp_path_factory.mktemp("data") / "toy_train.jsonl"
    count = emit_jsonl(instances, path)
    assert count == 50
    return path
