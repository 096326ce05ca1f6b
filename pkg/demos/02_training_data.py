"""
Building critic training data from a fact-checking article
===========================================================

A fact-checking article (claim, evidence, journalist explanation) becomes
factual instances with affirmative critiques, plus counterfactual instances
where one number or entity is systematically replaced by a different one
taken from the evidence.
"""

import io

from countergen import (
    FactCheckArticle,
    VeracityLabel,
    emit_jsonl,
    make_entity_replacements,
    make_factual_instances,
    make_number_replacements,
)

article = FactCheckArticle(
    id="homelessness",
    claim="122,000 people sleeping rough.",
    evidence=(
        "Official figures show that 122,494 people were experiencing homelessness, "
        "only 7,636 of those people were sleeping rough."
    ),
    explanation="only 7,636 people were sleeping rough.",
    label=VeracityLabel.FALSE,
)

# Factual instances pair the untouched explanation with affirmative critiques.
print("factual instances:")
for instance in make_factual_instances(article):
    print(f"  [{instance.element_kind.value:6}] {instance.critique}")

# Counterfactual number instances: each explanation number is swapped for
# each distinct-valued evidence number; the critique names the fix.
print("\nnumber replacements:")
for instance in make_number_replacements(article):
    print(f"  variant:  {instance.explanation_variant}")
    print(f"  critique: {instance.critique}")
    print(f"  edit:     {instance.replacement}")
    assert instance.restore_original() == article.explanation

print("\nentity replacements:", make_entity_replacements(article) or "(explanation has none)")

# Everything serializes to JSONL, one instance per line.
buffer = io.StringIO()
count = emit_jsonl(make_factual_instances(article) + make_number_replacements(article), buffer)
print(f"\n{count} JSONL lines, first line:")
print(buffer.getvalue().splitlines()[0][:120], "...")
