"""
Metrics and the throughput harness
==================================

Grounding proxies need no network. Judge-based metrics (four scored
dimensions and atomic-fact precision) talk to any chat-completions endpoint,
so they are not demonstrated live here. The throughput harness compares a
measured subject against calibrated simulated latencies.
"""

import math

from countergen import ElementKind, LatencyModel, grounding_score, measure_throughput, overall
from countergen.bench import critique_workload, rule_critique_subject

EVIDENCE = (
    "Official figures show that 122,494 people were experiencing homelessness, "
    "only 7,636 of those people were sleeping rough."
)
CLAIM = "122,000 people sleeping rough."

# Grounding: membership of response element values in the evidence.
print("number grounding, faithful response: ",
      grounding_score("7,636 slept rough", EVIDENCE, CLAIM, ElementKind.NUMBER))
print("number grounding, fabricated figure: ",
      grounding_score("122,000 slept rough", EVIDENCE, CLAIM, ElementKind.NUMBER))

# Overall = arithmetic mean of four judge dimensions plus the fact score.
print("overall((0.987, 0.873, 0.881, 0.716, 0.733)) =",
      round(overall((0.987, 0.873, 0.881, 0.716, 0.733)), 3))

# The atomic-fact length penalty: min(1, exp(1 - gamma/n)) at gamma=10.
for n in (5, 10, 12):
    print(f"length penalty at n={n}: {min(1.0, math.exp(1 - 10 / n)):.4f}")

# Throughput: one sequential instance, measured vs simulated.
workload = critique_workload(100, seed=0)

measured = measure_throughput(
    rule_critique_subject(), workload, mode="measured", subject_name="rule-critics"
)
critic_sim = measure_throughput(
    lambda item: item, workload, mode="simulated",
    latency_model=LatencyModel(fixed_s=1 / 0.925), subject_name="critic-model-simulated",
)
feedback_sim = measure_throughput(
    lambda item: item, workload, mode="simulated",
    latency_model=LatencyModel(fixed_s=1 / 0.165), subject_name="feedback-simulated",
)

for result in (measured, critic_sim, feedback_sim):
    print(f"{result.subject:28} {result.rate_per_s:10.3f} items/s  ({result.mode})")
print(f"simulated rate ratio: {critic_sim.rate_per_s / feedback_sim.rate_per_s:.2f}")
