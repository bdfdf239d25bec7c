"""Pipeline tests: counting loop, rounding, hybrid mode, report shape."""

import json

import numpy as np
import pytest

from perfectsum import (
    ApproxConfig,
    PipelineError,
    approximate_perfect_sum,
    auto_granularity,
    binomial,
    exact_perfect_sum,
)
from perfectsum.pipeline import _round_half_even

from conftest import brute_counts


class TestRounding:
    def test_round_half_even(self):
        assert _round_half_even(0.5, 5) == 2  # 2.5 -> 2
        assert _round_half_even(0.5, 7) == 4  # 3.5 -> 4
        assert _round_half_even(0.3, 10) == 3
        assert _round_half_even(1.0, 12345) == 12345
        assert _round_half_even(0.0, 99) == 0

    def test_full_precision_product(self):
        from fractions import Fraction

        # the float is expanded exactly: 0.1 is 0.100000000000000005551...,
        # so times 10 it lands just above 1 and must round to 1, and times
        # 10**30 the rounding error stays within half a unit of the exact
        # binary rational.
        assert _round_half_even(0.1, 10) == 1
        big = 10**30
        expected = Fraction(0.1) * big
        assert abs(_round_half_even(0.1, big) - expected) <= Fraction(1, 2)


class TestApproximatePerfectSum:
    def test_normal_close_to_exact(self):
        report = approximate_perfect_sum([1, 2, 3, 4], 5, ApproxConfig(relation="ge"))
        assert abs(report.total - 9) <= 2

    def test_constant_set_degenerate(self):
        report = approximate_perfect_sum(
            [1.0] * 10, 3, ApproxConfig(relation="eq", granularity=1)
        )
        by_k = report.counts_by_k()
        assert by_k[3] == binomial(10, 3)
        assert report.total == binomial(10, 3)
        assert all(c == 0 for k, c in by_k.items() if k != 3)

    def test_target_above_max_sum(self):
        for method in ("normal", "kde"):
            report = approximate_perfect_sum(
                [1, 2, 3, 4], 100, ApproxConfig(method=method, relation="ge", seed=1)
            )
            assert report.total == 0

    def test_k_equals_n_is_degenerate(self):
        report = approximate_perfect_sum([1, 2, 3, 4], 10, ApproxConfig(relation="ge"))
        assert report.counts_by_k()[4] == 1
        report = approximate_perfect_sum(
            [1, 2, 3, 4], 10, ApproxConfig(method="chi_square", df=2.0, relation="ge")
        )
        assert report.counts_by_k()[4] == 1

    def test_counts_within_bounds(self, rng):
        for _ in range(5):
            values = rng.integers(0, 21, 12).tolist()
            target = float(rng.integers(0, 130))
            for method, extra in (
                ("normal", {}),
                ("irwin_hall", {"low": 0.0, "high": 20.0}),
                ("chi_square", {"df": 3.0}),
                ("kde", {"samples": 500, "seed": 3}),
            ):
                for relation in ("eq", "ge", "le"):
                    report = approximate_perfect_sum(
                        values, target,
                        ApproxConfig(method=method, relation=relation, **extra),
                    )
                    n = len(values)
                    for k, c in report.counts_by_k().items():
                        assert 0 <= c <= binomial(n, k)
                    assert report.total <= 2**n - 1
                    assert report.total == sum(report.counts)
                    assert np.all(report.probabilities >= 0)
                    assert np.all(report.probabilities <= 1)

    def test_monotone_in_target_for_ge(self, rng):
        values = rng.integers(0, 21, 14).tolist()
        config = ApproxConfig(relation="ge")
        totals = [
            approximate_perfect_sum(values, t, config).total
            for t in np.linspace(-10, sum(values) + 10, 25)
        ]
        assert all(a >= b for a, b in zip(totals, totals[1:]))

    def test_hybrid_equals_exact_when_all_strata_exact(self, rng):
        values = rng.integers(0, 30, 12).tolist()
        target = float(rng.integers(10, 200))
        for relation in ("eq", "ge", "le"):
            report = approximate_perfect_sum(
                values, target, ApproxConfig(relation=relation, exact_small_k=12)
            )
            exact = exact_perfect_sum(values, target, relation)
            assert report.total == exact.total
            assert report.counts_by_k() == exact.counts_by_k()
            assert set(report.methods) == {"exact"}

    def test_hybrid_small_strata_only(self):
        values = list(range(1, 15))
        report = approximate_perfect_sum(
            values, 30.0, ApproxConfig(relation="ge", exact_small_k=2)
        )
        assert report.methods[0] == "exact"
        assert report.methods[1] == "exact"
        assert set(report.methods[2:]) == {"normal"}
        brute = brute_counts(values, 30.0, "ge")
        assert report.counts_by_k()[1] == brute[1]
        assert report.counts_by_k()[2] == brute[2]

    def test_k_range_restriction(self):
        report = approximate_perfect_sum(
            [1, 2, 3, 4, 5], 6, ApproxConfig(relation="ge", k_min=2, k_max=3)
        )
        assert report.ks.tolist() == [2, 3]

    def test_vectorized_normal_path_matches_scalar_queries(self, rng):
        # the fast path shares the moment formulas bit for bit
        from perfectsum import normal_sum_approx, probability_query, set_statistics

        values = rng.uniform(-10, 30, 17).tolist()
        stats = set_statistics(values)
        for relation in ("eq", "ge", "le"):
            report = approximate_perfect_sum(
                values, 25.0, ApproxConfig(relation=relation, granularity=2.0)
            )
            for i, k in enumerate(report.ks.tolist()):
                dist = normal_sum_approx(stats, k)
                expected = probability_query(dist, 25.0, relation, 2.0)
                assert report.probabilities[i] == expected, (relation, k)

    def test_kde_per_stratum_seeds_are_stable(self):
        values = [3, 1, 4, 1, 5, 9, 2, 6]
        config = ApproxConfig(method="kde", relation="ge", samples=400, seed=5)
        a = approximate_perfect_sum(values, 15, config)
        b = approximate_perfect_sum(values, 15, config)
        assert a.counts == b.counts
        # restricting the k range must not shift other strata's randomness
        c = approximate_perfect_sum(
            values, 15, ApproxConfig(method="kde", relation="ge", samples=400, seed=5,
                                     k_min=3, k_max=3)
        )
        assert c.counts[0] == a.counts_by_k()[3]

    def test_missing_family_params_fail_with_k(self):
        with pytest.raises(PipelineError, match="k=1"):
            approximate_perfect_sum([1, 2, 3], 2, ApproxConfig(method="irwin_hall"))
        with pytest.raises(PipelineError, match="k=1"):
            approximate_perfect_sum([1, 2, 3], 2, ApproxConfig(method="chi_square"))

    def test_eq_needs_granularity_on_real_sets(self):
        with pytest.raises(ValueError, match="granularity"):
            approximate_perfect_sum([1.5, 2.25, 3.75], 4.0, ApproxConfig(relation="eq"))

    def test_empty_set_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            approximate_perfect_sum([], 1.0, ApproxConfig())


class TestAutoGranularity:
    def test_integer_sets_use_gcd(self):
        assert auto_granularity([2, 4, 10]) == 2.0
        assert auto_granularity([0, 5, 20]) == 5.0
        assert auto_granularity([1, 2, 3]) == 1.0

    def test_constant_integer_set(self):
        assert auto_granularity([7, 7, 7]) == 1.0

    def test_real_sets_disable(self):
        assert auto_granularity([1.5, 2.0]) == 0.0


class TestExactPerfectSum:
    def test_eq_example(self):
        report = exact_perfect_sum([1, 2, 3, 4], 5, "eq")
        assert report.total == 2

    def test_le_zero_with_positive_set(self):
        assert exact_perfect_sum([1, 2, 3, 4], 0, "le").total == 0

    def test_engines_agree(self, rng):
        values = rng.integers(0, 40, 18).tolist()
        target = float(rng.integers(0, 300))
        for relation in ("eq", "ge", "le"):
            dp = exact_perfect_sum(values, target, relation, engine="dp")
            en = exact_perfect_sum(values, target, relation, engine="enumerate")
            assert dp.total == en.total
            assert dp.counts_by_k() == en.counts_by_k()

    def test_probability_column(self):
        report = exact_perfect_sum([1, 2, 3, 4], 5, "ge")
        assert report.probabilities.tolist() == pytest.approx([0.0, 4 / 6, 4 / 4, 1.0])

    def test_real_values_go_through_enumeration(self):
        report = exact_perfect_sum([1.5, 2.5, 3.0], 4.0, "ge")
        assert report.meta["method"] == "enumerate"
        assert report.total == sum(brute_counts([1.5, 2.5, 3.0], 4.0, "ge").values())


class TestReportSerialization:
    def test_counts_as_decimal_strings(self):
        report = exact_perfect_sum([1, 2, 3, 4], 5, "ge")
        doc = report.to_json_dict()
        assert doc["total"] == "9"
        assert all(isinstance(c, str) for c in doc["per_k"]["count"])
        json.dumps(doc)  # must be serializable as-is

    def test_zero_rows_elided(self):
        report = exact_perfect_sum([1, 2, 3, 4], 5, "eq")
        doc = report.to_json_dict()
        assert doc["per_k"]["k"] == [2]
        assert doc["per_k"]["count"] == ["2"]

    def test_rows_iterator_covers_all_k(self):
        report = exact_perfect_sum([1, 2, 3, 4], 5, "eq")
        rows = list(report.rows())
        assert [r["k"] for r in rows] == [1, 2, 3, 4]
        assert sum(r["count"] for r in rows) == 2

    def test_diagnostics_serialization(self):
        report = approximate_perfect_sum(
            [1, 2, 3, 4, 5], 7, ApproxConfig(relation="ge", diagnostics=True)
        )
        doc = report.to_json_dict()
        assert len(doc["diagnostics"]["bound_over_c"]) == 5
        # k = n entry is the infinite delta1 branch, serialized as a string
        assert doc["diagnostics"]["bound_over_c"][-1] == "inf"
        json.dumps(doc)

    def test_diagnostics_on_constant_set_aborts(self):
        with pytest.raises(PipelineError, match="diagnostics"):
            approximate_perfect_sum(
                [2.0, 2.0, 2.0], 4, ApproxConfig(relation="ge", diagnostics=True)
            )
