"""Shared test fixtures: the worked-example article and a seeded article generator.

Generated articles mirror the fact-checking data model: evidence sentences
each carry one number and one place-name entity inside a distinctive word
context, and grounded explanations reuse evidence sentences verbatim, so
element substitutions are detectable from context alone.
"""

from __future__ import annotations

import random

from countergen import FactCheckArticle, VeracityLabel

HOMELESSNESS = FactCheckArticle(
    id="homelessness",
    claim="122,000 people sleeping rough.",
    evidence=(
        "Official figures show that 122,494 people were experiencing homelessness, "
        "only 7,636 of those people were sleeping rough."
    ),
    explanation="only 7,636 people were sleeping rough.",
    label=VeracityLabel.FALSE,
    source="fixture:worked-example",
)

_NOUNS = [
    "harvest", "transit", "housing", "fisheries", "tourism", "energy", "water",
    "forestry", "census", "payroll", "customs", "zoning", "parks", "library",
    "airport", "harbor", "railway", "postal", "election", "weather",
]

_ITEMS = [
    "permits", "tickets", "claims", "parcels", "samples", "visits", "manifests",
    "licenses", "readings", "ballots", "vouchers", "inspections", "shipments",
    "bookings", "deliveries", "surveys", "audits", "filings", "renewals",
    "transfers",
]

_PLACES = [
    "Ardale", "Brinton", "Corvey", "Dunmore", "Eastfall", "Farrow", "Glenmere",
    "Halvett", "Ironbay", "Jorvik", "Kelsford", "Lowmoor", "Marbury", "Nethcote",
    "Oakridge", "Penhale", "Quarrow", "Ravenstone", "Selbourne", "Tarnwick",
]


def _number_surface(rng: random.Random) -> str:
    style = rng.randrange(4)
    if style == 0:
        return f"{rng.randrange(1_000, 999_999):,}"
    if style == 1:
        return str(rng.randrange(2, 999))
    if style == 2:
        return f"{rng.randrange(1, 99)}.{rng.randrange(1, 9)}"
    return f"{rng.randrange(2, 99)}%"


def make_article(
    seed: int,
    grounded: bool = True,
    max_evidence_segments: int = 15,
    max_explanation_segments: int = 4,
) -> FactCheckArticle:
    """One deterministic synthetic article.

    grounded=True reuses evidence sentences as the explanation (the critics'
    soundness regime); grounded=False writes explanation sentences whose
    elements never occur in the evidence.
    """
    rng = random.Random(seed)
    n_segments = rng.randint(0, max_evidence_segments)

    nouns = rng.sample(_NOUNS, k=min(len(_NOUNS), max(n_segments, 1)))
    items = rng.sample(_ITEMS, k=min(len(_ITEMS), max(n_segments, 1)))
    places = rng.sample(_PLACES, k=min(len(_PLACES), max(n_segments, 1)))

    values: set[float] = set()
    sentences = []
    for i in range(n_segments):
        surface = _number_surface(rng)
        value = float(surface.rstrip("%").replace(",", ""))
        while value in values:
            surface = _number_surface(rng)
            value = float(surface.rstrip("%").replace(",", ""))
        values.add(value)
        sentences.append(
            f"the {nouns[i]} office in {places[i]} counted {surface} {items[i]} this year."
        )
    evidence = " ".join(sentences) if sentences else "the office released no figures this year."

    n_selected = rng.randint(0, min(max_explanation_segments, n_segments))
    selected = sorted(rng.sample(range(n_segments), k=n_selected)) if n_selected else []

    if grounded:
        explanation_sentences = [sentences[i] for i in selected]
    else:
        spare_nouns = [n for n in _NOUNS if n not in nouns]
        spare_items = [n for n in _ITEMS if n not in items]
        spare_places = [p for p in _PLACES if p not in places]
        explanation_sentences = []
        for j in range(n_selected):
            surface = _number_surface(rng)
            explanation_sentences.append(
                f"the {spare_nouns[j]} bureau in {spare_places[j]} counted "
                f"{surface} {spare_items[j]} overall."
            )

    if explanation_sentences:
        explanation = " ".join(explanation_sentences)
        anchor = selected[0] if grounded else 0
        noun = nouns[anchor] if grounded else spare_nouns[0]
        place = places[anchor] if grounded else spare_places[0]
        item = items[anchor] if grounded else spare_items[0]
        office = "office" if grounded else "bureau"
        claim = f"the {noun} {office} in {place} counted the wrong number of {item}."
    else:
        explanation = "the office closed the matter after a routine review."
        claim = "the office never reviewed the matter, critics say."

    return FactCheckArticle(
        id=f"fixture-{seed}-{'g' if grounded else 'u'}",
        claim=claim,
        evidence=evidence,
        explanation=explanation,
        label=VeracityLabel.FALSE,
        source="fixture:generated",
    )


def article_batch(count: int, seed: int = 0, grounded: bool = True) -> list[FactCheckArticle]:
    return [make_article(seed * 10_000 + i, grounded=grounded) for i in range(count)]
