"""Experiment-harness tests: generation, error curves, divergence tables."""

import json
import math

import numpy as np
import pytest

from perfectsum import (
    ApproxConfig,
    InfeasibleError,
    SetSpec,
    divergence_experiment,
    error_experiment,
    generate_set,
)


class TestGenerateSet:
    def test_discrete_uniform_range_and_integrality(self):
        spec = SetSpec(family="discrete_uniform", n=26, seed=7, low=0, high=20)
        values = generate_set(spec)
        assert values.size == 26
        assert np.array_equal(values, np.rint(values))
        assert values.min() >= 0 and values.max() <= 20

    def test_chi_square_sample_mean(self):
        spec = SetSpec(family="chi_square", n=20_000, seed=3, df=3)
        values = generate_set(spec)
        # mean df, variance 2*df; CLT tolerance on the sample mean
        assert abs(values.mean() - 3) <= 3 * math.sqrt(2 * 3 / 20_000) * 1.5

    def test_uniform_bounds(self):
        values = generate_set(SetSpec(family="uniform", n=500, seed=1, low=-2, high=5))
        assert values.min() >= -2 and values.max() <= 5

    def test_custom_file_verbatim(self, tmp_path):
        path = tmp_path / "vals.txt"
        path.write_text("1.5\n-2\n42\n")
        values = generate_set(SetSpec(family="custom_file", n=3, path=str(path)))
        assert values.tolist() == [1.5, -2.0, 42.0]

    def test_unknown_family(self):
        with pytest.raises(ValueError, match="unknown family"):
            SetSpec(family="zipf", n=5)

    def test_deterministic(self):
        spec = SetSpec(family="uniform", n=50, seed=11, low=0, high=1)
        assert np.array_equal(generate_set(spec), generate_set(spec))


class TestErrorExperiment:
    FAMILY = SetSpec(family="discrete_uniform", n=1, seed=0, low=0, high=20)

    def test_exact_hybrid_has_zero_error(self):
        config = ApproxConfig(relation="ge", exact_small_k=12)
        result = error_experiment(self.FAMILY, [12], config, seeds=[4])
        (value,) = result.values(metric="abs_rel_error")
        assert value == 0.0

    def test_empty_seeds_empty_result(self):
        result = error_experiment(self.FAMILY, [10], ApproxConfig(), seeds=[])
        assert result.rows == []

    def test_infeasible_n_fails_before_work(self):
        with pytest.raises(InfeasibleError, match="cap"):
            error_experiment(self.FAMILY, [10, 40], ApproxConfig(), seeds=[0])

    def test_rows_and_aggregates(self):
        config = ApproxConfig(relation="ge")
        result = error_experiment(self.FAMILY, [10, 12], config, seeds=[0, 1, 2])
        points = [r for r in result.rows if r["metric"] == "abs_rel_error"]
        assert len(points) == 6
        assert all(r["seed"] is not None for r in points)
        means = [r for r in result.rows if r["metric"] == "mean_abs_rel_error"]
        sds = [r for r in result.rows if r["metric"] == "sd_abs_rel_error"]
        assert len(means) == 2 and len(sds) == 2
        for n in (10, 12):
            vals = result.values(metric="abs_rel_error", n=n)
            (mean_row,) = result.values(metric="mean_abs_rel_error", n=n)
            assert mean_row == pytest.approx(np.mean(vals))

    def test_metadata_echo(self):
        result = error_experiment(self.FAMILY, [8], ApproxConfig(), seeds=[0])
        assert result.metadata["experiment"] == "error"
        assert result.metadata["family"]["family"] == "discrete_uniform"
        assert result.metadata["target_rule"] == "half_total_sum"
        assert result.metadata["config"]["method"] == "normal"


class TestDivergenceExperiment:
    def test_uniform_set_k4_beats_k1(self):
        values = generate_set(SetSpec(family="discrete_uniform", n=26, seed=5, low=0, high=20))
        result = divergence_experiment(values, [1, 4], ["normal"])
        (jsd1,) = result.values(k=1, method="normal")
        (jsd4,) = result.values(k=4, method="normal")
        assert jsd4 < jsd1

    def test_infeasible_k_listed(self):
        with pytest.raises(ValueError, match=r"\[9\]"):
            divergence_experiment([1, 2, 3], [1, 9], ["normal"])

    def test_method_dicts(self):
        values = generate_set(SetSpec(family="chi_square", n=100, seed=2, df=3))
        result = divergence_experiment(
            values, [2], [{"method": "chi_square", "df": 3}, "normal"], seed=1
        )
        assert {r["method"] for r in result.rows} == {"chi_square", "normal"}
        assert result.metadata["reference"]["kind"]["2"] == "exact"

    def test_sampled_reference_for_large_real_sets(self):
        values = generate_set(SetSpec(family="chi_square", n=3000, seed=2, df=3))
        result = divergence_experiment(
            values, [3], ["normal"], seed=1, ref_samples=20_000
        )
        assert result.metadata["reference"]["kind"]["3"] == "sampled"
        (jsd,) = result.values(k=3, method="normal")
        assert 0 <= jsd <= math.log(2)

    def test_gapped_set_kde_beats_normal(self):
        rng = np.random.default_rng(0)
        values = np.concatenate([rng.uniform(0, 10, 10), rng.uniform(1000, 1010, 10)])
        result = divergence_experiment(
            values, [2], ["normal", {"method": "kde", "samples": 4000}], seed=3
        )
        (jsd_n,) = result.values(k=2, method="normal")
        (jsd_k,) = result.values(k=2, method="kde")
        assert jsd_k < jsd_n

    def test_determinism_byte_identical_files(self, tmp_path):
        values = generate_set(SetSpec(family="discrete_uniform", n=20, seed=9, low=0, high=20))
        paths = []
        for tag in ("a", "b"):
            result = divergence_experiment(values, [1, 3], ["normal", "kde"], seed=4)
            csv_path = tmp_path / f"{tag}.csv"
            json_path = tmp_path / f"{tag}.json"
            result.to_csv(csv_path)
            result.to_json(json_path)
            paths.append((csv_path.read_bytes(), json_path.read_bytes()))
        assert paths[0] == paths[1]

    def test_rows_sorted_canonically(self):
        values = generate_set(SetSpec(family="discrete_uniform", n=15, seed=1, low=0, high=20))
        result = divergence_experiment(values, [3, 1, 2], ["normal"])
        ks = [r["k"] for r in result.rows]
        assert ks == sorted(ks)
