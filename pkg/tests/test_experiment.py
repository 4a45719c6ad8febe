import pytest

from phaseret import (
    ExperimentConfig,
    parse_config_file,
    rows_to_csv,
    run_experiment,
)

_HEADER = "algorithm,n,s,trials,successes,success_rate,mean_runtime_ms"


def _small_cfg(**overrides):
    base = dict(
        n=256,
        sparsities=(2, 3),
        trials_per_point=10,
        algorithm="combinatorial",
        seed=3,
    )
    base.update(overrides)
    return ExperimentConfig(**base)


def test_repeated_runs_are_identical():
    cfg = _small_cfg()
    first = run_experiment(cfg)
    second = run_experiment(cfg)
    assert first == second
    assert rows_to_csv(first) == rows_to_csv(second)


def test_grid_points_are_seed_isolated():
    full = run_experiment(_small_cfg(sparsities=(2, 3)))
    alone = run_experiment(_small_cfg(sparsities=(3,)))
    assert full[1] == alone[0]


def test_csv_header_and_shape():
    rows = run_experiment(_small_cfg(trials_per_point=5))
    text = rows_to_csv(rows)
    lines = text.splitlines()
    assert lines[0].startswith(_HEADER)
    assert len(lines) == 1 + len(rows)
    assert text.endswith("\n")
    extra = lines[0][len(_HEADER):]
    if extra:
        assert all(part.startswith("failures_") for part in extra.lstrip(",").split(","))


def test_success_and_failure_counts_add_up():
    rows = run_experiment(_small_cfg(n=64, sparsities=(2, 4, 8), trials_per_point=8))
    for row in rows:
        assert row.successes + sum(row.failure_breakdown.values()) == row.trials
        assert row.success_rate == pytest.approx(row.successes / row.trials)


def test_easy_grid_point_mostly_succeeds():
    rows = run_experiment(_small_cfg(n=1024, sparsities=(3,), trials_per_point=10))
    assert rows[0].success_rate >= 0.9


def test_both_algorithms_produce_one_row_each():
    cfg = _small_cfg(n=16, sparsities=(2,), trials_per_point=2, algorithm="both")
    rows = run_experiment(cfg)
    assert [row.algorithm for row in rows] == ["combinatorial", "sdp"]
    assert all(row.s == 2 and row.trials == 2 for row in rows)


def test_output_path_receives_csv(tmp_path):
    out = tmp_path / "sweep.csv"
    cfg = _small_cfg(trials_per_point=4, output_path=str(out))
    rows = run_experiment(cfg)
    assert out.read_text() == rows_to_csv(rows)


def test_runtime_column_defaults_to_zero():
    rows = run_experiment(_small_cfg(trials_per_point=4))
    assert all(row.mean_runtime_ms == 0.0 for row in rows)
    for line in rows_to_csv(rows).splitlines()[1:]:
        assert line.split(",")[6] == "0.000"


def test_runtime_column_opt_in():
    rows = run_experiment(_small_cfg(trials_per_point=4, record_runtime=True))
    assert any(row.mean_runtime_ms > 0.0 for row in rows)


def test_thread_pool_matches_sequential(monkeypatch):
    cfg = _small_cfg(n=128, sparsities=(2,), trials_per_point=8)
    monkeypatch.delenv("PHASERET_THREADS", raising=False)
    sequential = run_experiment(cfg)
    monkeypatch.setenv("PHASERET_THREADS", "4")
    threaded = run_experiment(cfg)
    assert sequential == threaded


class TestConfigValidation:
    def test_sparsity_must_fit_length(self):
        with pytest.raises(ValueError):
            ExperimentConfig(n=8, sparsities=(9,))

    def test_sparsity_must_be_positive(self):
        with pytest.raises(ValueError):
            ExperimentConfig(n=8, sparsities=(0,))

    def test_sparsities_must_be_nonempty(self):
        with pytest.raises(ValueError):
            ExperimentConfig(n=8, sparsities=())

    def test_algorithm_name_checked(self):
        with pytest.raises(ValueError):
            ExperimentConfig(n=8, sparsities=(2,), algorithm="magic")

    def test_trials_must_be_positive(self):
        with pytest.raises(ValueError):
            ExperimentConfig(n=8, sparsities=(2,), trials_per_point=0)


class TestConfigFile:
    def _write(self, tmp_path, text):
        path = tmp_path / "exp.cfg"
        path.write_text(text)
        return str(path)

    def test_round_trip(self, tmp_path):
        path = self._write(
            tmp_path,
            "# sweep settings\n"
            "n = 64\n"
            "sparsities = 2, 3, 5\n"
            "trials_per_point = 7\n"
            "algorithm = combinatorial\n"
            "seed = 12\n"
            "tol = 1e-7\n"
            "record_runtime = true\n"
            "\n",
        )
        cfg = parse_config_file(path)
        assert cfg == ExperimentConfig(
            n=64,
            sparsities=(2, 3, 5),
            trials_per_point=7,
            algorithm="combinatorial",
            seed=12,
            tol=1e-7,
            record_runtime=True,
        )

    def test_line_without_equals_rejected(self, tmp_path):
        path = self._write(tmp_path, "n = 8\nsparsities\n")
        with pytest.raises(ValueError, match="expected key = value"):
            parse_config_file(path)

    def test_unknown_key_rejected(self, tmp_path):
        path = self._write(tmp_path, "n = 8\nsparsities = 2\nwidth = 3\n")
        with pytest.raises(ValueError, match="unknown key"):
            parse_config_file(path)

    def test_duplicate_key_rejected(self, tmp_path):
        path = self._write(tmp_path, "n = 8\nn = 9\nsparsities = 2\n")
        with pytest.raises(ValueError, match="duplicate key"):
            parse_config_file(path)

    def test_required_keys_enforced(self, tmp_path):
        path = self._write(tmp_path, "n = 8\n")
        with pytest.raises(ValueError, match="required"):
            parse_config_file(path)

    def test_record_runtime_must_be_boolean(self, tmp_path):
        path = self._write(
            tmp_path, "n = 8\nsparsities = 2\nrecord_runtime = maybe\n"
        )
        with pytest.raises(ValueError, match="true or false"):
            parse_config_file(path)
