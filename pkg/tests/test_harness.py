import csv

import numpy as np
import pytest

from cspsa_tomo import cspsa, harness, states
from cspsa_tomo.bounds import gill_massar_pure, total_ensemble
from cspsa_tomo.errors import ConfigInvalid, DegenerateIterate, IoFailure


def _small_config(**overrides):
    params = dict(
        d=2,
        n_est=100,
        k_max=5,
        num_states=2,
        num_guesses=3,
        num_reps=2,
        master_seed=11,
    )
    params.update(overrides)
    return harness.ExperimentConfig(**params)


class TestExperimentConfig:
    def test_default_gains_follow_shot_count(self):
        cfg = _small_config(n_est=2000)
        assert cfg.gains == cspsa.GainParams.for_shots(2000)

    def test_explicit_gains_kept(self):
        gains = cspsa.GainParams(a=1.0, b=0.2)
        assert _small_config(gains=gains).gains is gains

    def test_rejects_bad_values(self):
        for overrides in (
            {"d": 1},
            {"n_est": 0},
            {"k_max": 0},
            {"num_states": 0},
            {"num_guesses": 0},
            {"num_reps": 0},
            {"mode": "bayes"},
            {"master_seed": -1},
            {"master_seed": 2**64},
        ):
            with pytest.raises(ConfigInvalid):
                _small_config(**overrides)


class TestSeedDerivation:
    def test_streams_are_distinct(self):
        draws = {
            harness.truth_rng(3, 0).integers(2**62),
            harness.truth_rng(3, 1).integers(2**62),
            harness.guess_rng(3, 0, 0).integers(2**62),
            harness.trial_rng(3, 0, 0, 0).integers(2**62),
            harness.trial_rng(3, 0, 0, 1).integers(2**62),
            harness.trial_rng(4, 0, 0, 0).integers(2**62),
        }
        assert len(draws) == 6

    def test_streams_are_reproducible(self):
        a = harness.trial_rng(9, 1, 2, 3).standard_normal(8)
        b = harness.trial_rng(9, 1, 2, 3).standard_normal(8)
        np.testing.assert_array_equal(a, b)


class TestRunTrial:
    def test_trace_shape_and_range(self):
        cfg = _small_config(k_max=7)
        truth = states.haar_random_state(2, harness.truth_rng(11, 0))
        guess = states.haar_random_state(2, harness.guess_rng(11, 0, 0))
        trace = harness.run_trial(cfg, truth, guess, harness.trial_rng(11, 0, 0, 0))
        assert trace.infidelities.shape == (7,)
        assert np.all(np.isfinite(trace.infidelities))
        assert np.all(trace.infidelities >= 0.0)
        assert np.all(trace.infidelities <= 1.0)
        assert trace.degenerate_steps == 0

    def test_deterministic_given_rng(self):
        cfg = _small_config()
        truth = states.haar_random_state(2, harness.truth_rng(11, 0))
        guess = states.haar_random_state(2, harness.guess_rng(11, 0, 0))
        first = harness.run_trial(cfg, truth, guess, harness.trial_rng(11, 0, 0, 0))
        second = harness.run_trial(cfg, truth, guess, harness.trial_rng(11, 0, 0, 0))
        np.testing.assert_array_equal(first.infidelities, second.infidelities)

    def test_perfect_start_stays_near_truth(self):
        # Starting at the truth with 1e6 shots per measurement, the
        # estimate never wanders beyond 1e-3 infidelity (measured worst
        # case over these seeds is about 5e-5).
        for seed in range(20):
            cfg = harness.ExperimentConfig(
                d=2,
                n_est=10**6,
                k_max=10,
                num_states=1,
                num_guesses=1,
                num_reps=1,
                master_seed=seed,
            )
            truth = states.haar_random_state(2, harness.truth_rng(seed, 0))
            trace = harness.run_trial(
                cfg, truth, truth, harness.trial_rng(seed, 0, 0, 0)
            )
            assert trace.infidelities.max() <= 1e-3

    def test_degenerate_update_keeps_previous_iterate(self, monkeypatch):
        calls = {"n": 0}
        real_update = cspsa.update

        def flaky_update(z, a_k, grad):
            calls["n"] += 1
            if calls["n"] == 1:
                raise DegenerateIterate("stepped onto the origin")
            return real_update(z, a_k, grad)

        monkeypatch.setattr(harness, "update", flaky_update)
        cfg = _small_config(k_max=4)
        truth = states.haar_random_state(2, harness.truth_rng(11, 0))
        guess = states.haar_random_state(2, harness.guess_rng(11, 0, 0))
        trace = harness.run_trial(cfg, truth, guess, harness.trial_rng(11, 0, 0, 0))
        assert trace.degenerate_steps == 1
        assert np.all(np.isfinite(trace.infidelities))

    def test_dimension_mismatch(self):
        cfg = _small_config(d=3)
        truth = states.haar_random_state(2, harness.truth_rng(11, 0))
        with pytest.raises(ConfigInvalid):
            harness.run_trial(cfg, truth, truth, harness.trial_rng(11, 0, 0, 0))


class TestRunExperiment:
    def test_rerun_is_bit_identical(self):
        cfg = _small_config()
        first = harness.run_experiment(cfg)
        second = harness.run_experiment(cfg)
        for a, b in zip(first.pooled, second.pooled):
            assert a == b

    def test_single_trial_experiment_matches_run_trial(self):
        cfg = _small_config(num_states=1, num_guesses=1, num_reps=1)
        report = harness.run_experiment(cfg)
        truth = states.haar_random_state(2, harness.truth_rng(cfg.master_seed, 0))
        guess = states.haar_random_state(2, harness.guess_rng(cfg.master_seed, 0, 0))
        trace = harness.run_trial(
            cfg, truth, guess, harness.trial_rng(cfg.master_seed, 0, 0, 0)
        )
        for k in range(cfg.k_max):
            assert report.pooled[k].mean == trace.infidelities[k]
            assert report.pooled[k].count == 1

    def test_worker_count_does_not_change_results(self, tmp_path):
        serial_path = tmp_path / "serial.csv"
        parallel_path = tmp_path / "parallel.csv"
        harness.run_experiment(_small_config(output_path=str(serial_path)), workers=1)
        harness.run_experiment(
            _small_config(output_path=str(parallel_path)), workers=2
        )
        assert serial_path.read_bytes() == parallel_path.read_bytes()

    def test_rejects_bad_worker_count(self):
        with pytest.raises(ConfigInvalid):
            harness.run_experiment(_small_config(), workers=0)

    def test_bound_columns_track_consumed_copies(self):
        cfg = _small_config(d=3, k_max=6)
        report = harness.run_experiment(cfg)
        for k in range(1, cfg.k_max + 1):
            n = total_ensemble(cfg.n_est, k)
            assert n == 2 * k * cfg.n_est
            assert report.gm_pure[k - 1] == gill_massar_pure(cfg.d, n)

    def test_refinement_dominates_bare_updates(self):
        # With 1e3 shots the likelihood-refined estimate lands orders of
        # magnitude below the bare iterate (measured ratio is over 1e3;
        # a factor of 10 leaves wide margin).
        means = {}
        for mode in (harness.MODE_CSPSA_MLE, harness.MODE_CSPSA_ONLY):
            cfg = harness.ExperimentConfig(
                d=2,
                n_est=10**3,
                k_max=10,
                num_states=3,
                num_guesses=10,
                num_reps=2,
                mode=mode,
                master_seed=5,
            )
            means[mode] = harness.run_experiment(cfg).pooled[-1].mean
        assert means[harness.MODE_CSPSA_MLE] <= means[harness.MODE_CSPSA_ONLY] / 10.0

    def test_pooled_mean_trends_down(self):
        # Convergence check over six seeds: by iteration 10 the pooled
        # mean sits at most half its iteration-3 value, and the mean
        # sequence rises at most twice after iteration 3.
        for seed in range(6):
            cfg = harness.ExperimentConfig(
                d=2,
                n_est=100,
                k_max=10,
                num_states=2,
                num_guesses=10,
                num_reps=2,
                master_seed=seed,
            )
            means = np.array(
                [s.mean for s in harness.run_experiment(cfg).pooled]
            )
            assert means[-1] <= means[2] / 2.0
            assert int((np.diff(means)[2:] > 0).sum()) <= 2

    def test_per_state_blocks_partition_pool(self):
        cfg = _small_config()
        report = harness.run_experiment(cfg)
        runs_per_state = cfg.num_guesses * cfg.num_reps
        for k in range(cfg.k_max):
            assert report.pooled[k].count == cfg.num_states * runs_per_state
            state_means = [block[k].mean for block in report.per_state]
            assert np.mean(state_means) == pytest.approx(
                report.pooled[k].mean, rel=1e-12
            )


class TestWriteReport:
    def test_round_trip_preserves_values(self, tmp_path):
        cfg = _small_config()
        report = harness.run_experiment(cfg)
        path = tmp_path / "report.csv"
        harness.write_report(report, path)
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == cfg.k_max
        for k, row in enumerate(rows, start=1):
            assert row["d"] == str(cfg.d)
            assert row["mode"] == cfg.mode
            assert int(row["k"]) == k
            assert int(row["n_total"]) == total_ensemble(cfg.n_est, k)
            stats = report.pooled[k - 1]
            assert float(row["mean"]) == stats.mean
            assert float(row["variance"]) == stats.variance
            assert float(row["median"]) == stats.median
            assert float(row["q1"]) == stats.q1
            assert float(row["q3"]) == stats.q3
            assert float(row["gm_pure"]) == report.gm_pure[k - 1]
            assert float(row["gm_mixed"]) == report.gm_mixed[k - 1]

    def test_column_order(self, tmp_path):
        path = tmp_path / "report.csv"
        harness.write_report(harness.run_experiment(_small_config()), path)
        header = path.read_text().splitlines()[0]
        assert header == ",".join(harness.REPORT_COLUMNS)

    def test_per_state_rows_follow_pooled(self, tmp_path):
        cfg = _small_config()
        report = harness.run_experiment(cfg)
        path = tmp_path / "report.csv"
        harness.write_report(report, path, per_state=True)
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == cfg.k_max * (1 + cfg.num_states)
        pooled_rows = rows[: cfg.k_max]
        assert all(row["state_id"] == "" for row in pooled_rows)
        tail = rows[cfg.k_max :]
        seen = [int(row["state_id"]) for row in tail]
        assert seen == sorted(seen)
        first_state = tail[: cfg.k_max]
        for k, row in enumerate(first_state, start=1):
            assert float(row["mean"]) == report.per_state[0][k - 1].mean

    def test_output_path_in_config_triggers_write(self, tmp_path):
        path = tmp_path / "auto.csv"
        harness.run_experiment(_small_config(output_path=str(path)))
        assert path.exists()

    def test_unwritable_path_raises(self, tmp_path):
        report = harness.run_experiment(_small_config())
        with pytest.raises(IoFailure):
            harness.write_report(report, tmp_path / "missing" / "out.csv")


class TestConfigSummary:
    def test_mentions_selected_gain(self):
        cfg = _small_config(n_est=100)
        text = harness.config_summary(cfg)
        assert "b=0.3" in text
        assert "n_est=100" in text
        assert "seed=11" in text
