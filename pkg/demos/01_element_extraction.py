"""
Extracting checkable elements from text
=======================================

Numbers, named entities, and topic term profiles are the raw material for
everything else: training-data corruption, critics, and dataset statistics.
"""

from countergen import content_terms, extract_entities, extract_numbers, normalize_number

EVIDENCE = (
    "Official figures show that 122,494 people were experiencing homelessness, "
    "only 7,636 of those people were sleeping rough. Eighty percent of them "
    "were counted in Australia by the Bureau of Statistics."
)

# Numbers: digit forms, separators, percent markers, cardinal words.
print("numbers:")
for span in extract_numbers(EVIDENCE):
    print(f"  {span.surface!r:20} value={span.numeric_value} percent={span.is_percent} "
          f"at [{span.start}:{span.end}]")

# Every span slices back to its surface, byte for byte.
for span in extract_numbers(EVIDENCE):
    assert EVIDENCE[span.start:span.end] == span.surface

# Normalization makes differently written numbers comparable.
print("\nnormalize_number('122,494')  ->", normalize_number("122,494"))
print("normalize_number('eighty percent') ->", normalize_number("eighty percent"))

# Entities: capitalized-token sequences, minus sentence-initial function
# words and anything inside a number span.
print("\nentities:")
for span in extract_entities(EVIDENCE):
    print(f"  {span.surface!r:25} canonical={span.canonical!r}")

# Term profiles: case-folded, stopword-filtered content word counts.
profile = content_terms("homelessness in Australia, homelessness is rising")
print("\nterm profile:", profile.terms)
print("top terms:   ", profile.top_terms(2))
