"""
Rule critics: judging a counter-response element by element
===========================================================

The three deterministic critics check numbers, entities, and topic. A number
or entity passes only when the evidence occurrence whose local context best
matches the response sentence agrees on the value, so a real figure quoted in
the wrong context is still flagged.
"""

from countergen import aggregate, critique_entities, critique_numbers, critique_topic

CLAIM = "122,000 people sleeping rough."
EVIDENCE = (
    "Official figures show that 122,494 people were experiencing homelessness, "
    "only 7,636 of those people were sleeping rough."
)

RESPONSES = {
    "faithful": "Only 7,636 of those people were sleeping rough.",
    "wrong context": "Only 122,494 people were sleeping rough.",  # real figure, wrong statement
    "off topic": "The weather forecast promises sunny skies tomorrow.",
}

for label, response in RESPONSES.items():
    number = critique_numbers(CLAIM, EVIDENCE, response)
    entity = critique_entities(CLAIM, EVIDENCE, response)
    topic = critique_topic(CLAIM, EVIDENCE, response, threshold=0.15)
    agg = aggregate(number, entity, topic)
    print(f"--- {label}")
    print(f"    all_positive={agg.all_positive}")
    for line in agg.text.splitlines():
        print(f"    {line}")

# The aggregate is always ordered number, entity, topic, and its text is the
# newline-joined concatenation fed back to the generator as feedback.
