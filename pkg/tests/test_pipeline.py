import pytest

from countergen import (
    AggregatedCritique,
    CounterResponse,
    FactCheckArticle,
    VeracityLabel,
    Critique,
    ElementKind,
    GenerationConfig,
    GenerationError,
    PromptError,
    PromptMessages,
    RuleCritics,
    build_initial_prompt,
    build_refine_prompt,
    chat_complete,
    generate_counter_response,
)
from countergen.pipeline import trace_to_dict

from fixtures import HOMELESSNESS
from mockserver import MockEndpoint

ALL = frozenset(ElementKind)

# Script A: an in-context-wrong figure first, the corrected text second.
WRONG_RESPONSE = "Only 122,494 people were sleeping rough."
RIGHT_RESPONSE = "Only 7,636 of those people were sleeping rough."


def _config(server, **kwargs):
    defaults = dict(endpoint=server.base_url, model_name="mock", retry_budget=0)
    defaults.update(kwargs)
    return GenerationConfig(**defaults)


class TestPromptBuilding:
    def test_initial_prompt_embeds_texts_under_headings(self):
        prompt = build_initial_prompt(HOMELESSNESS.claim, HOMELESSNESS.evidence)
        assert prompt.messages[0][0] == "system"
        user = prompt.messages[1][1]
        assert f"Claim:\n{HOMELESSNESS.claim}" in user
        assert f"Facts:\n{HOMELESSNESS.evidence}" in user

    def test_empty_evidence_rejected(self):
        with pytest.raises(ValueError):
            build_initial_prompt(HOMELESSNESS.claim, "   ")

    def test_oversized_evidence_without_truncation_is_prompt_error(self):
        config = GenerationConfig(
            endpoint="", model_name="", prompt_char_budget=80, truncate_evidence=False
        )
        with pytest.raises(PromptError):
            build_initial_prompt("short claim", "x" * 500, config)

    def test_refine_prompt_carries_critique_verbatim(self):
        number = Critique(
            ElementKind.NUMBER, False, "122,494 is not correct, the correct number is 7,636"
        )
        entity = Critique(ElementKind.ENTITY, True, "The entities are correct")
        topic = Critique(
            ElementKind.TOPIC, True, "The explanation is on the topic of the claim"
        )
        from countergen import aggregate

        agg = aggregate(number, entity, topic)
        prompt = build_refine_prompt(
            HOMELESSNESS.claim,
            HOMELESSNESS.evidence,
            CounterResponse(WRONG_RESPONSE),
            agg,
        )
        user = prompt.messages[1][1]
        assert "122,494 is not correct, the correct number is 7,636" in user
        assert WRONG_RESPONSE in user
        assert user.index("122,494 is not correct") > user.index(WRONG_RESPONSE)
        lines = agg.text.splitlines()
        assert all(line in user for line in lines)

    def test_refine_prompt_requires_a_negative_part(self):
        from countergen import aggregate

        parts = [
            Critique(ElementKind.NUMBER, True, "The numbers are correct"),
            Critique(ElementKind.ENTITY, True, "The entities are correct"),
            Critique(ElementKind.TOPIC, True, "The explanation is on the topic of the claim"),
        ]
        with pytest.raises(ValueError):
            build_refine_prompt(
                HOMELESSNESS.claim,
                HOMELESSNESS.evidence,
                CounterResponse("x"),
                aggregate(*parts),
            )

    def test_first_message_must_be_system(self):
        with pytest.raises(ValueError):
            PromptMessages(messages=(("user", "hello"),))


class TestChatComplete:
    def test_passthrough(self):
        with MockEndpoint() as server:
            server.chat_script(["a canned response"])
            config = _config(server)
            text = chat_complete(config, build_initial_prompt("c", "e", config))
        assert text == "a canned response"

    def test_retry_contract_on_transient_failure(self):
        with MockEndpoint() as server:
            server.chat_script([(500, None), "recovered"])
            config = _config(server, retry_budget=1)
            from countergen.llm import CompletionClient

            client = CompletionClient(
                endpoint=server.base_url, model="mock", retry_budget=1, backoff_s=0.0
            )
            result = client.complete_detailed([("system", "s"), ("user", "u")])
        assert result.text == "recovered"
        assert result.attempts == 2

    def test_empty_completion_is_generation_error(self):
        with MockEndpoint() as server:
            server.chat_script(["   "])
            config = _config(server)
            with pytest.raises(GenerationError):
                chat_complete(config, build_initial_prompt("c", "e", config))

    def test_request_carries_configured_sampling_fields(self):
        with MockEndpoint() as server:
            server.chat_script(["ok"])
            config = _config(server, temperature=1.0, max_tokens=128, seed=7)
            chat_complete(config, build_initial_prompt("c", "e", config))
            _, body = server.requests[0]
        assert body["model"] == "mock"
        assert body["temperature"] == 1.0
        assert body["max_tokens"] == 128
        assert body["seed"] == 7
        assert body["messages"][0]["role"] == "system"


class TestGenerationLoop:
    def test_ungrounded_then_corrected_script(self):
        with MockEndpoint() as server:
            server.chat_script([WRONG_RESPONSE, RIGHT_RESPONSE])
            trace = generate_counter_response(
                HOMELESSNESS, _config(server), RuleCritics()
            )
        assert trace.llm_calls == 2
        assert trace.initial.text == WRONG_RESPONSE
        assert trace.refined.text == RIGHT_RESPONSE
        assert len(trace.rounds) == 1
        assert not trace.rounds[0].all_positive
        suite = RuleCritics()
        assert all(
            suite.critique(k, HOMELESSNESS.claim, HOMELESSNESS.evidence, trace.refined.text).positive
            for k in ElementKind
        )
        assert len(trace.prompts) == 2
        assert len(trace.latencies_s) == 2

    def test_grounded_script_stops_early(self):
        with MockEndpoint() as server:
            server.chat_script([RIGHT_RESPONSE])
            trace = generate_counter_response(
                HOMELESSNESS, _config(server), RuleCritics()
            )
        assert trace.llm_calls == 1
        assert trace.refined is trace.initial
        assert trace.rounds[0].all_positive

    def test_call_bound_respected_when_never_clean(self):
        with MockEndpoint() as server:
            server.chat_responder(WRONG_RESPONSE)
            trace = generate_counter_response(
                HOMELESSNESS, _config(server, max_rounds=3), RuleCritics()
            )
        assert trace.llm_calls == 1 + 3
        assert len(trace.rounds) == 3  # the final refinement is not re-critiqued

    def test_max_rounds_zero_records_critique_but_never_refines(self):
        with MockEndpoint() as server:
            server.chat_script([WRONG_RESPONSE])
            trace = generate_counter_response(
                HOMELESSNESS, _config(server, max_rounds=0), RuleCritics()
            )
        assert trace.llm_calls == 1
        assert trace.refined is trace.initial
        assert len(trace.rounds) == 1

    def test_determinism_under_scripted_llm(self):
        def run():
            with MockEndpoint() as server:
                server.chat_script([WRONG_RESPONSE, RIGHT_RESPONSE])
                return generate_counter_response(
                    HOMELESSNESS, _config(server), RuleCritics()
                )

        first, second = run(), run()
        assert trace_to_dict(first) == trace_to_dict(second)

    def test_verify_final_records_post_refinement_aggregate(self):
        with MockEndpoint() as server:
            server.chat_script([WRONG_RESPONSE, RIGHT_RESPONSE])
            trace = generate_counter_response(
                HOMELESSNESS, _config(server, verify_final=True), RuleCritics()
            )
        assert trace.verify is not None
        assert trace.verify.all_positive

    def test_partial_trace_attached_on_mid_run_failure(self):
        with MockEndpoint() as server:
            server.chat_script([WRONG_RESPONSE, (500, None)])
            with pytest.raises(GenerationError) as exc_info:
                generate_counter_response(HOMELESSNESS, _config(server), RuleCritics())
        partial = exc_info.value.partial_trace
        assert partial is not None
        assert partial.initial.text == WRONG_RESPONSE
        assert partial.llm_calls == 1


class TestAblations:
    def _run(self, enabled):
        with MockEndpoint() as server:
            server.chat_script([WRONG_RESPONSE, RIGHT_RESPONSE])
            return generate_counter_response(
                HOMELESSNESS,
                _config(server, enabled_critics=frozenset(enabled)),
                RuleCritics(),
            )

    def test_without_number_entity_critics_number_errors_never_trigger_refinement(self):
        trace = self._run({ElementKind.TOPIC})
        assert trace.llm_calls == 1
        assert trace.refined is trace.initial
        (topic_part,) = trace.rounds[0].parts
        assert topic_part.element_kind is ElementKind.TOPIC

    def test_ablation_removes_exactly_that_part(self):
        full = self._run(ALL)
        without_topic = self._run({ElementKind.NUMBER, ElementKind.ENTITY})
        without_nne = self._run({ElementKind.TOPIC})

        full_parts = {p.element_kind: p for p in full.rounds[0].parts}
        wt_parts = {p.element_kind: p for p in without_topic.rounds[0].parts}
        assert set(wt_parts) == {ElementKind.NUMBER, ElementKind.ENTITY}
        for kind, part in wt_parts.items():
            assert part == full_parts[kind]

        nne_parts = {p.element_kind: p for p in without_nne.rounds[0].parts}
        assert set(nne_parts) == {ElementKind.TOPIC}
        assert nne_parts[ElementKind.TOPIC] == full_parts[ElementKind.TOPIC]

    def test_no_critics_is_a_no_feedback_baseline(self):
        with MockEndpoint() as server:
            server.chat_script([WRONG_RESPONSE])
            trace = generate_counter_response(
                HOMELESSNESS,
                _config(server, enabled_critics=frozenset()),
                RuleCritics(),
            )
        assert trace.llm_calls == 1
        assert trace.rounds == ()
        assert trace.refined is trace.initial


class TestEvidenceTruncation:
    def test_truncation_annotated_in_trace(self):
        long_article = FactCheckArticle(
            id="long",
            claim="a short claim about permits",
            evidence="permits " * 600,
            label=VeracityLabel.FALSE,
        )
        with MockEndpoint() as server:
            server.chat_responder("a response without numbers")
            config = _config(
                server,
                prompt_char_budget=2000,
                truncate_evidence=True,
                enabled_critics=frozenset({ElementKind.NUMBER}),
            )
            trace = generate_counter_response(long_article, config, RuleCritics())
        assert trace.evidence_truncated
        assert trace.prompts[0].total_chars() <= 2000

    def test_untruncated_run_is_not_annotated(self):
        with MockEndpoint() as server:
            server.chat_script([RIGHT_RESPONSE])
            trace = generate_counter_response(HOMELESSNESS, _config(server), RuleCritics())
        assert not trace.evidence_truncated
