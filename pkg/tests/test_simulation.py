import json

import numpy as np
import pytest

from pairmoments.distributions import DistributionSpec
from pairmoments.exact import FiniteDistribution
from pairmoments.simulation import (
    BiasReport,
    ExperimentConfig,
    check_invariants,
    config_from_json,
    run_bias_experiment,
    summarize,
)


def _minimal_config(**overrides):
    base = dict(
        distribution=DistributionSpec.exponential(2.0),
        orders=(2, 3, 4),
        replications=400,
        seed=1234,
        mode="minimal",
    )
    base.update(overrides)
    return ExperimentConfig(**base)


def _mc_config(**overrides):
    base = dict(
        distribution=DistributionSpec.exponential(2.0),
        orders=(2, 3),
        replications=40,
        seed=77,
        mode="mc",
        sample_sizes=(20,),
        mc_tuples=500,
    )
    base.update(overrides)
    return ExperimentConfig(**base)


class TestConfigValidation:
    def test_mc_needs_sizes(self):
        with pytest.raises(ValueError):
            _mc_config(sample_sizes=())

    def test_sizes_must_cover_orders(self):
        with pytest.raises(ValueError):
            _mc_config(orders=(2, 6), sample_sizes=(4,))

    def test_orders_at_least_two(self):
        with pytest.raises(ValueError):
            _minimal_config(orders=(1, 2))

    def test_mode_name(self):
        with pytest.raises(ValueError):
            _minimal_config(mode="bogus")


class TestMinimalMode:
    def test_point_mass_all_biases_zero(self):
        config = _minimal_config(
            distribution=DistributionSpec.finite(FiniteDistribution.point_mass(4.0)),
            replications=50,
        )
        report = run_bias_experiment(config)
        for row in report.rows:
            assert row.mean_bias == 0.0
            assert row.std_error == 0.0
            assert row.true_value == 0.0

    def test_row_layout(self):
        report = run_bias_experiment(_minimal_config())
        assert {r.estimator for r in report.rows} == {"natural", "diff-exhaustive"}
        assert all(r.n == r.order for r in report.rows)
        assert report.mc_tuples is None

    def test_order_two_unbiased_both(self):
        report = run_bias_experiment(_minimal_config(replications=3000))
        for est in ("natural", "diff-exhaustive"):
            row = report.row(est, 2, 2)
            assert abs(row.mean_bias) < 5 * row.std_error


class TestDeterminism:
    def test_thread_count_does_not_change_report(self):
        a = run_bias_experiment(_minimal_config(), threads=1)
        b = run_bias_experiment(_minimal_config(), threads=4)
        assert a == b

    def test_mc_mode_thread_invariance(self):
        a = run_bias_experiment(_mc_config(), threads=1)
        b = run_bias_experiment(_mc_config(), threads=3)
        assert a == b

    def test_seed_changes_results(self):
        a = run_bias_experiment(_minimal_config())
        b = run_bias_experiment(_minimal_config(seed=999))
        assert a != b


class TestSerialization:
    def test_json_round_trip(self):
        report = run_bias_experiment(_mc_config())
        again = BiasReport.from_json(report.to_json())
        assert again == report

    def test_csv_schema(self):
        report = run_bias_experiment(_minimal_config(replications=20))
        lines = report.to_csv().strip().splitlines()
        assert lines[0] == "estimator,n,order,true_value,mean_bias,std_error,replications"
        assert len(lines) == 1 + len(report.rows)
        # csv floats are repr round-trips
        cell = lines[1].split(",")[3]
        assert float(cell) == report.rows[0].true_value

    def test_markdown_layout(self):
        report = run_bias_experiment(_minimal_config(replications=20))
        md = report.to_markdown()
        lines = md.strip().splitlines()
        assert lines[0].startswith("| estimator | n | ord 2 |")
        assert lines[2].startswith("| true value |")

    def test_summarize_dispatch(self):
        report = run_bias_experiment(_minimal_config(replications=20))
        assert summarize(report, "csv").startswith("estimator,")
        assert summarize(report, "json").startswith("{")
        assert summarize(report, "md").startswith("| estimator")
        with pytest.raises(ValueError):
            summarize(report, "yaml")

    def test_config_from_json(self):
        payload = {
            "distribution": "exp:2",
            "orders": [2, 3],
            "replications": 10,
            "seed": 5,
            "mode": "mc",
            "sample_sizes": [10],
            "mc_tuples": 99,
        }
        config = config_from_json(json.dumps(payload))
        assert config.mc_tuples == 99
        assert config.distribution.kind == "exponential"


class TestInvariantChecks:
    def test_minimal_mode_passes_at_scale(self):
        report = run_bias_experiment(_minimal_config(replications=4000))
        ok, msgs = check_invariants(report)
        assert ok, msgs

    def test_detects_broken_report(self):
        report = run_bias_experiment(_minimal_config(replications=400))
        # corrupt the difference-estimator row: huge bias, tiny SE
        rows = tuple(
            r if r.estimator != "diff-exhaustive" or r.order != 3
            else type(r)(r.estimator, r.order, r.n, r.true_value, 99.0, 1e-6, r.replications)
            for r in report.rows
        )
        bad = BiasReport(
            distribution=report.distribution,
            mode=report.mode,
            seed=report.seed,
            replications=report.replications,
            mc_tuples=report.mc_tuples,
            rows=rows,
        )
        ok, msgs = check_invariants(bad)
        assert not ok and msgs
