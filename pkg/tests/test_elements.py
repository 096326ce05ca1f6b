import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from countergen import (
    ElementKind,
    ExtractionError,
    ProtocolError,
    TaggerClient,
    content_terms,
    extract_entities,
    extract_numbers,
    normalize_number,
)

from mockserver import MockEndpoint


class TestExtractNumbers:
    def test_separated_figures(self):
        text = (
            "Official figures show that 122,494 people were experiencing homelessness, "
            "only 7,636 of those people were sleeping rough."
        )
        spans = extract_numbers(text)
        assert [(s.surface, s.numeric_value) for s in spans] == [
            ("122,494", 122494),
            ("7,636", 7636),
        ]

    def test_empty_input(self):
        assert extract_numbers("") == []

    def test_cardinal_word_percent(self):
        spans = extract_numbers("Eighty percent of people agreed")
        assert [(s.surface, s.numeric_value, s.is_percent) for s in spans] == [
            ("Eighty percent", 80, True)
        ]

    def test_digit_percent_forms(self):
        for text, value in (("80%", 80), ("80 percent", 80), ("80 per cent", 80)):
            (span,) = extract_numbers(f"about {text} agreed")
            assert span.numeric_value == value
            assert span.is_percent

    def test_decimal_and_plain(self):
        spans = extract_numbers("growth of 3.14 times over 1200 days")
        assert [(s.surface, s.numeric_value) for s in spans] == [("3.14", 3.14), ("1200", 1200)]

    def test_word_compositions(self):
        cases = {
            "twenty one": 21,
            "three hundred": 300,
            "two hundred fifty seven": 257,
            "five hundred thousand": 500_000,
            "one million two hundred thousand": 1_200_000,
            "seventy-five": 75,
        }
        for phrase, value in cases.items():
            (span,) = extract_numbers(f"we saw {phrase} birds")
            assert span.numeric_value == value, phrase

    def test_ordinals_are_not_numbers(self):
        assert extract_numbers("the 3rd of May, their first attempt") == []

    def test_digits_inside_words_are_not_numbers(self):
        assert extract_numbers("model v12 and b2b sales") == []

    def test_adjacent_word_numbers_split(self):
        spans = extract_numbers("rooms one two and three")
        assert [s.numeric_value for s in spans] == [1, 2, 3]

    def test_sentence_final_number_keeps_separators(self):
        (span,) = extract_numbers("the count was 7,636.")
        assert span.surface == "7,636"

    def test_offsets_slice_back_to_surface(self):
        text = "From 1,200 to 3.5% in Ten years, Eighty percent of 42 cases."
        for span in extract_numbers(text):
            assert text[span.start:span.end] == span.surface

    def test_spans_sorted_and_disjoint(self):
        text = "1,204 then twenty two percent and 9.5 after eighty"
        spans = extract_numbers(text)
        assert spans == sorted(spans, key=lambda s: s.start)
        for left, right in zip(spans, spans[1:]):
            assert left.end <= right.start


class TestNormalizeNumber:
    def test_comma_removal(self):
        assert normalize_number("122,494") == (122494, False)

    def test_percent_marker(self):
        assert normalize_number("80%") == (80, True)

    def test_cardinal_words(self):
        assert normalize_number("seventy per cent") == (70, True)

    def test_separator_equivalence(self):
        assert normalize_number("1,234") == normalize_number("1234")

    def test_rejects_non_numbers(self):
        for bad in ("", "abc", "12abc", "1,2", "3rd"):
            with pytest.raises(ValueError):
                normalize_number(bad)

    def test_canonical_keys_of_equal_values_match(self):
        texts = extract_numbers("both 1,234 and 1234 appear")
        assert texts[0].canonical == texts[1].canonical


class TestExtractEntities:
    def test_midsentence_proper_noun(self):
        (span,) = extract_entities("the problem of homelessness in Australia is growing")
        assert span.surface == "Australia"
        assert span.kind is ElementKind.ENTITY

    def test_no_capitalized_spans(self):
        assert extract_entities("all lowercase words here") == []

    def test_multiword_sequence_with_leading_function_word_trimmed(self):
        (span,) = extract_entities("The report by the World Health Organization was cited")
        assert span.surface == "World Health Organization"

    def test_sentence_initial_content_word_is_kept(self):
        spans = extract_entities("Canberra released figures. Officials disagreed in Sydney.")
        assert [s.surface for s in spans] == ["Canberra", "Officials", "Sydney"]

    def test_number_spans_excluded(self):
        spans = extract_entities("Eighty percent of voters in Dunmore agreed")
        assert [s.surface for s in spans] == ["Dunmore"]

    def test_canonical_is_casefolded(self):
        (span,) = extract_entities("figures from AUSTRALIA were cited")
        assert span.canonical == "australia"

    def test_punctuation_breaks_sequences(self):
        spans = extract_entities("offices in Sydney, Australia were counted")
        assert [s.surface for s in spans] == ["Sydney", "Australia"]

    def test_number_entity_disjointness(self):
        text = "Eighty percent of people in Ten Mile Creek saw 42 incidents"
        numbers = extract_numbers(text)
        entities = extract_entities(text)
        taken = [(n.start, n.end) for n in numbers]
        for entity in entities:
            for start, end in taken:
                assert entity.end <= start or end <= entity.start


class TestTaggerProtocol:
    def test_spans_come_from_service(self):
        text = "figures from the capital were cited"
        with MockEndpoint() as server:
            server.respond_with(
                "/tag",
                lambda body: (
                    200,
                    {
                        "spans": [
                            {
                                "surface": "capital",
                                "start": body["text"].index("capital"),
                                "end": body["text"].index("capital") + len("capital"),
                                "kind": "entity",
                            }
                        ]
                    },
                ),
            )
            spans = extract_entities(text, tagger=TaggerClient(server.base_url))
        assert [(s.surface, s.canonical) for s in spans] == [("capital", "capital")]

    def test_unreachable_tagger_raises_extraction_error(self):
        tagger = TaggerClient("http://127.0.0.1:9", timeout=0.2)
        with pytest.raises(ExtractionError):
            extract_entities("anything", tagger=tagger)

    def test_offset_mismatch_raises_protocol_error(self):
        with MockEndpoint() as server:
            server.respond_with(
                "/tag",
                lambda body: (
                    200,
                    {"spans": [{"surface": "wrong", "start": 0, "end": 5, "kind": "entity"}]},
                ),
            )
            with pytest.raises(ProtocolError):
                extract_entities("right words only", tagger=TaggerClient(server.base_url))


class TestContentTerms:
    def test_empty(self):
        assert content_terms("").terms == {}

    def test_hand_counted_profile(self):
        profile = content_terms("homelessness in Australia, homelessness is rising")
        assert profile.terms == {"homelessness": 2, "australia": 1, "rising": 1}

    def test_all_stopwords(self):
        assert content_terms("the of and").terms == {}

    def test_cosine_identity_and_orthogonality(self):
        a = content_terms("homelessness rising in Australia")
        assert a.cosine(a) == pytest.approx(1.0)
        b = content_terms("sunny weather forecast tomorrow")
        assert a.cosine(b) == 0.0

    def test_top_terms_order(self):
        profile = content_terms("beta beta alpha gamma gamma")
        assert profile.top_terms(3) == ["beta", "gamma", "alpha"]


_words = st.sampled_from(
    ["the", "figures", "show", "people", "Rough", "Australia", "counted", "were", "of"]
)
_numbers = st.sampled_from(["122,494", "7,636", "80%", "3.5", "eighty percent", "42"])
_chunks = st.lists(st.one_of(_words, _numbers), min_size=0, max_size=30)


@settings(max_examples=200, deadline=None)
@given(_chunks)
def test_extraction_properties_hold_on_generated_text(chunks):
    text = " ".join(chunks)
    spans = extract_numbers(text)
    assert spans == extract_numbers(text)  # deterministic
    previous_end = 0
    for span in spans:
        assert text[span.start:span.end] == span.surface
        assert span.start >= previous_end
        previous_end = span.end
    entities = extract_entities(text)
    number_positions = {(n.start, n.end) for n in spans}
    for entity in entities:
        assert text[entity.start:entity.end] == entity.surface
        for start, end in number_positions:
            assert entity.end <= start or end <= entity.start
