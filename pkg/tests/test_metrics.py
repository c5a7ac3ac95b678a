import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ccshare.config import scenario1
from ccshare.harness import run_paired, run_simulation
from ccshare.metrics import (
    RateCdf,
    build_summary,
    favor_stats,
    improvement,
    outcome_census,
    percentile,
    read_rates_csv,
    write_outputs,
    write_rates_csv,
)
from ccshare.protocol import MessageKind
from ccshare.ran import Operator

from oracles import percentile_oracle

A, B = Operator.A, Operator.B


class TestPercentile:
    def test_median_of_five(self):
        assert percentile([1, 2, 3, 4, 5], 50) == 3.0

    def test_constant_samples(self):
        for p in (1, 10, 50, 90, 99):
            assert percentile([7.0] * 10, p) == 7.0

    def test_linear_interpolation(self):
        # rank (2-1)*0.25 = 0.25 between 10 and 20
        assert percentile([10.0, 20.0], 25) == pytest.approx(12.5)

    def test_rejects_empty_and_bad_p(self):
        with pytest.raises(ValueError):
            percentile([], 50)
        with pytest.raises(ValueError):
            percentile([1.0], 0)
        with pytest.raises(ValueError):
            percentile([1.0], 100)

    def test_matches_sort_and_index_oracle(self):
        rng = np.random.default_rng(12)
        for _ in range(200):
            samples = rng.exponential(1e7, size=rng.integers(1, 400))
            p = float(rng.uniform(0.5, 99.5))
            assert percentile(samples, p) == pytest.approx(
                percentile_oracle(samples, p), rel=1e-12
            )

    @settings(max_examples=200, deadline=None)
    @given(
        samples=st.lists(st.floats(1e3, 1e9), min_size=1, max_size=100),
        p1=st.floats(1, 99),
        p2=st.floats(1, 99),
    )
    def test_monotone_in_p(self, samples, p1, p2):
        lo, hi = sorted((p1, p2))
        assert percentile(samples, lo) <= percentile(samples, hi)


class TestImprovement:
    def test_identical_sets_zero(self):
        s = [1.0, 2.0, 3.0]
        assert improvement(s, s, 50) == 0.0

    def test_pointwise_scaling(self):
        base = np.linspace(1e6, 1e8, 200)
        mode = 1.47 * base
        for p in (10, 50, 90):
            assert improvement(mode, base, p) == pytest.approx(47.0)

    def test_zero_baseline_is_undefined(self):
        assert improvement([1.0, 2.0], [0.0, 0.0], 50) is None

    def test_invariant_to_common_rescaling(self):
        rng = np.random.default_rng(4)
        base = rng.exponential(1e7, 300)
        mode = rng.exponential(1.3e7, 300)
        before = improvement(mode, base, 10)
        after = improvement(mode * 3.7, base * 3.7, 10)
        assert after == pytest.approx(before, rel=1e-9)


class TestRateCdf:
    def test_single_sample_step(self):
        cdf = RateCdf.from_samples(A, "combined", [5e6])
        rates, probs = cdf.points()
        assert list(rates) == [5e6]
        assert list(probs) == [1.0]

    def test_sorted_and_complete(self):
        cdf = RateCdf.from_samples(A, "combined", [3.0, 1.0, 2.0])
        rates, probs = cdf.points()
        assert list(rates) == [1.0, 2.0, 3.0]
        assert probs[-1] == 1.0


class TestFavorStats:
    def test_no_sharing_all_zero(self):
        res = run_simulation(scenario1(mode="no-sharing", n_stages=60))
        stats = favor_stats(res.stage_results)
        assert stats["asks"] == {"A": 0, "B": 0}
        assert stats["grants"] == {"A": 0, "B": 0}
        assert stats["max_abs_balance"] == 0

    def test_counts_consistent_with_message_log(self):
        cfg = scenario1(mode="combined", n_stages=250)
        cfg.strategy.theta_g_init = 0.0
        cfg.strategy.adaptive = False
        cfg.strategy.grant = "always"
        res = run_simulation(cfg)
        stats = favor_stats(res.stage_results)
        asks = {op: 0 for op in (A, B)}
        grants = {op: 0 for op in (A, B)}
        for r in res.stage_results:
            for m in r.messages:
                if m.kind is MessageKind.ASK_FAVOR:
                    asks[m.sender] += 1
                if m.kind is MessageKind.GRANT:
                    grants[m.sender] += 1
        assert stats["asks"] == {"A": asks[A], "B": asks[B]}
        assert stats["grants"] == {"A": grants[A], "B": grants[B]}


class TestFiles:
    def test_rates_csv_round_trip_preserves_percentiles(self, tmp_path):
        rng = np.random.default_rng(8)
        samples = rng.exponential(2e7, 500)
        path = tmp_path / "rates_A_test.csv"
        write_rates_csv(path, samples)
        back = read_rates_csv(path)
        assert np.array_equal(np.sort(samples), np.sort(back))
        for p in (10, 50, 90):
            assert percentile(back, p) == percentile(samples, p)

    def test_write_outputs_layout(self, tmp_path):
        results = run_paired(scenario1(n_stages=40), ["no-sharing", "combined"])
        summary = write_outputs(tmp_path, results)
        assert (tmp_path / "stages.csv").exists()
        assert (tmp_path / "summary.json").exists()
        for op in ("A", "B"):
            for mode in ("no-sharing", "combined"):
                assert (tmp_path / f"rates_{op}_{mode}.csv").exists()
                assert (tmp_path / f"cdf_{op}_{mode}.csv").exists()
        entries = {(e["operator"], e["mode"]): e for e in summary["results"]}
        combined_a = entries[("A", "combined")]
        assert combined_a["p10"] is not None
        assert combined_a["improvement_vs_nosharing_p10"] is not None
        assert entries[("A", "no-sharing")]["improvement_vs_nosharing_p10"] is None

    def test_summary_census_counts_stages(self):
        results = run_paired(scenario1(n_stages=40), ["no-sharing"])
        summary = build_summary(results)
        census = summary["outcome_census"]["no-sharing"]
        assert census == {"O1": 40}

    def test_cdf_csv_matches_percentiles(self, tmp_path):
        results = run_paired(scenario1(n_stages=40), ["combined"])
        write_outputs(tmp_path, results)
        import csv

        with open(tmp_path / "cdf_A_combined.csv") as f:
            rows = list(csv.DictReader(f))
        rates = np.array([float(r["rate_bps"]) for r in rows])
        probs = np.array([float(r["cdf"]) for r in rows])
        assert np.all(np.diff(rates) >= 0)
        assert probs[-1] == 1.0
        samples = results["combined"].rate_samples(A)
        assert rates.size == samples.size
        assert percentile(rates, 50) == pytest.approx(percentile(samples, 50))
