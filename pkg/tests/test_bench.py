import time

import pytest

from countergen import LatencyModel, measure_throughput
from countergen.bench import critique_workload, rule_critique_subject


class TestSimulatedMode:
    def test_fixed_latency_arithmetic(self):
        result = measure_throughput(
            lambda item: item,
            list(range(10)),
            mode="simulated",
            latency_model=LatencyModel(fixed_s=0.2),
            subject_name="fixed-200ms",
        )
        assert result.items_processed == 10
        assert result.wall_time_s == pytest.approx(2.0)
        assert result.rate_per_s == pytest.approx(5.0)
        assert result.mode == "simulated"
        assert result.latency_model == {"fixed_s": 0.2}

    def test_rate_times_wall_time_recovers_items(self):
        result = measure_throughput(
            lambda item: item,
            list(range(100)),
            mode="simulated",
            latency_model=LatencyModel(fixed_s=1 / 0.925),
        )
        assert result.rate_per_s * result.wall_time_s == pytest.approx(100, abs=1e-9)

    def test_calibrated_rate_ratio_matches_reported_speedup(self):
        workload = critique_workload(100, seed=0)
        fast = measure_throughput(
            lambda item: item, workload, mode="simulated",
            latency_model=LatencyModel(fixed_s=1 / 0.925),
        )
        slow = measure_throughput(
            lambda item: item, workload, mode="simulated",
            latency_model=LatencyModel(fixed_s=1 / 0.165),
        )
        ratio = fast.rate_per_s / slow.rate_per_s
        assert abs(ratio - 5.6) <= 0.1

    def test_sampled_latencies_are_seeded(self):
        model = LatencyModel(mean_s=0.5, stddev_s=0.1, seed=9)
        first = measure_throughput(lambda i: i, range(20), "simulated", model)
        second = measure_throughput(lambda i: i, range(20), "simulated", model)
        assert first.wall_time_s == second.wall_time_s

    def test_simulated_requires_model(self):
        with pytest.raises(ValueError):
            measure_throughput(lambda i: i, [1], mode="simulated")


class TestMeasuredMode:
    def test_sequential_wall_clock(self):
        result = measure_throughput(
            lambda item: time.sleep(0.01),
            list(range(5)),
            mode="measured",
            subject_name="sleeper",
        )
        assert result.items_processed == 5
        assert result.wall_time_s >= 0.05
        assert result.rate_per_s == pytest.approx(5 / result.wall_time_s)

    def test_subject_failure_reports_partial_counts(self):
        def subject(item):
            if item == 3:
                raise RuntimeError("boom")

        result = measure_throughput(subject, list(range(10)), mode="measured")
        assert result.items_processed == 3
        assert result.error is not None and "boom" in result.error

    def test_rule_critics_beat_the_simulated_model_baseline(self):
        workload = critique_workload(100, seed=1)
        measured = measure_throughput(
            rule_critique_subject(), workload, mode="measured", subject_name="rule-critics"
        )
        baseline = measure_throughput(
            lambda item: item, workload, mode="simulated",
            latency_model=LatencyModel(fixed_s=1.081),
        )
        assert measured.items_processed == 100
        assert measured.rate_per_s > baseline.rate_per_s

    def test_empty_workload_rejected(self):
        with pytest.raises(ValueError):
            measure_throughput(lambda i: i, [], mode="measured")

    def test_unknown_mode_rejected(self):
        with pytest.raises(ValueError):
            measure_throughput(lambda i: i, [1], mode="parallel")
