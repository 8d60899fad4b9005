import json
from pathlib import Path

import numpy as np
import pytest

from xxzchain.observables import LN2
from xxzchain.runner import (
    EnsembleAverages,
    ExperimentConfig,
    aggregate_directory,
    load_result,
    read_trajectory_csv,
    realization_paths,
    run_experiment,
    run_single_realization,
    w_dirname,
    write_aggregate_csv,
)
from xxzchain.spectral import two_spin_entropy


def tiny_config(outdir, **overrides):
    base = dict(
        length=4,
        realizations=2,
        seed=100,
        w_list=(5.0,),
        grid="log",
        t_min=0.1,
        t_max=10.0,
        points_per_decade=10,
        outdir=str(outdir),
    )
    base.update(overrides)
    return ExperimentConfig(**base)


def read_bytes_tree(root):
    return {
        str(p.relative_to(root)): p.read_bytes()
        for p in sorted(Path(root).rglob("*.csv"))
    }


class TestExperimentConfig:
    def test_log_grid_preset_shape(self):
        cfg = ExperimentConfig(length=4)
        grid = cfg.time_grid()
        assert grid.size == 251  # 50 points per decade over [0.1, 1e4]
        assert grid[0] == pytest.approx(0.1)
        assert grid[-1] == pytest.approx(1e4)

    def test_uniform_grid_preset_shape(self):
        cfg = ExperimentConfig(length=4, grid="uniform", t_max=400.0, dt=0.1)
        grid = cfg.time_grid()
        assert grid.size == 4001
        assert grid[0] == 0.0
        assert grid[-1] == pytest.approx(400.0)

    def test_hash_changes_with_config(self):
        a = ExperimentConfig(length=4, seed=1)
        b = ExperimentConfig(length=4, seed=2)
        assert a.config_hash() != b.config_hash()
        assert a.config_hash() == ExperimentConfig(length=4, seed=1).config_hash()

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"length": 4, "realizations": 0},
            {"length": 4, "w_list": (-1.0,)},
            {"length": 4, "grid": "geometric"},
            {"length": 4, "entropy_unit": "dits"},
            {"length": 4, "model": "two_spin"},  # needs length 2
            {"length": 4, "t_min": 0.0},
        ],
    )
    def test_validation(self, kwargs):
        with pytest.raises(ValueError):
            ExperimentConfig(**kwargs)


class TestRunSingleRealization:
    def test_two_spin_matches_closed_form(self, tmp_path):
        cfg = ExperimentConfig(
            length=2,
            model="two_spin",
            v_int=0.25,
            w_list=(0.0,),
            grid="uniform",
            t_max=8 * np.pi,
            dt=0.05,
            half_chain=False,
            outdir=str(tmp_path),
        )
        run_single_realization(cfg, 0.0, 0)
        csv_path, manifest_path = realization_paths(tmp_path, 0.0, 0)
        names, data = read_trajectory_csv(csv_path)
        t = data[:, 0]
        for col in ("S_1", "S_2", "S_avg"):
            np.testing.assert_allclose(
                data[:, names.index(col)], two_spin_entropy(0.25, t), atol=1e-9
            )
        manifest = json.loads(manifest_path.read_text())
        assert manifest["fields"] is None
        assert manifest["config_hash"] == cfg.config_hash()

    def test_manifest_records_fields(self, tmp_path):
        cfg = tiny_config(tmp_path, realizations=1)
        manifest = run_single_realization(cfg, 5.0, 0)
        assert len(manifest["fields"]) == 4
        assert all(abs(h) <= 5.0 for h in manifest["fields"])

    def test_bits_unit_rescales(self, tmp_path):
        cfg_nats = tiny_config(tmp_path / "nats", realizations=1)
        cfg_bits = tiny_config(tmp_path / "bits", realizations=1, entropy_unit="bits")
        run_single_realization(cfg_nats, 5.0, 0)
        run_single_realization(cfg_bits, 5.0, 0)
        _, nats = read_trajectory_csv(realization_paths(tmp_path / "nats", 5.0, 0)[0])
        _, bits = read_trajectory_csv(realization_paths(tmp_path / "bits", 5.0, 0)[0])
        np.testing.assert_allclose(bits[:, 1:], nats[:, 1:] / LN2, atol=1e-12)
        np.testing.assert_array_equal(bits[:, 0], nats[:, 0])


class TestRunExperiment:
    def test_deterministic_byte_identical_outputs(self, tmp_path):
        cfg_a = tiny_config(tmp_path / "a")
        cfg_b = tiny_config(tmp_path / "b")
        run_experiment(cfg_a)
        run_experiment(cfg_b)
        tree_a = read_bytes_tree(tmp_path / "a")
        tree_b = read_bytes_tree(tmp_path / "b")
        assert tree_a.keys() == tree_b.keys()
        assert all(tree_a[k] == tree_b[k] for k in tree_a)

    def test_restart_reuses_and_reproduces(self, tmp_path):
        cfg = tiny_config(tmp_path)
        run_experiment(cfg)
        before = read_bytes_tree(tmp_path)
        # wipe one realization and the aggregate, then resume
        csv_path, manifest_path = realization_paths(tmp_path, 5.0, 1)
        csv_path.unlink()
        manifest_path.unlink()
        (tmp_path / w_dirname(5.0) / "aggregate.csv").unlink()
        run_experiment(cfg)
        assert read_bytes_tree(tmp_path) == before

    def test_config_mismatch_protected(self, tmp_path):
        run_experiment(tiny_config(tmp_path))
        with pytest.raises(RuntimeError):
            run_experiment(tiny_config(tmp_path, seed=101))

    def test_sector_blocked_matches_full(self, tmp_path):
        run_experiment(tiny_config(tmp_path / "full"))
        run_experiment(tiny_config(tmp_path / "blocked", sector_blocked=True))
        _, full = read_trajectory_csv(realization_paths(tmp_path / "full", 5.0, 0)[0])
        _, blocked = read_trajectory_csv(realization_paths(tmp_path / "blocked", 5.0, 0)[0])
        np.testing.assert_allclose(blocked, full, atol=1e-8)

    def test_result_shape_and_reload(self, tmp_path):
        cfg = tiny_config(tmp_path, w_list=(1.0, 5.0))
        result = run_experiment(cfg)
        assert set(result.by_w) == {1.0, 5.0}
        avg = result.by_w[5.0]
        assert avg.n_realizations == 2
        assert "S_avg" in avg.mean and "S_avg" in avg.sem
        reloaded = load_result(tmp_path)
        np.testing.assert_array_equal(
            reloaded.by_w[5.0].mean["S_avg"], avg.mean["S_avg"]
        )


def write_fake_realization(directory, index, times, s_values):
    """Minimal handcrafted trajectory file pair for aggregation tests."""
    directory.mkdir(parents=True, exist_ok=True)
    csv_path = directory / f"r{index:05d}.csv"
    lines = ["t,S_avg,T,S_half,delta,S_1,S_2"]
    for t, s in zip(times, s_values):
        lines.append(",".join(repr(float(v)) for v in (t, s, 2 * s, s, 0.0, s, s)))
    csv_path.write_text("\n".join(lines) + "\n")
    csv_path.with_suffix(".json").write_text(json.dumps({"realization_index": index}))


class TestAggregate:
    def test_single_realization_mean_is_input_sem_zero(self, tmp_path):
        times = [0.0, 1.0, 2.0]
        write_fake_realization(tmp_path, 0, times, [0.1, 0.2, 0.3])
        avg = aggregate_directory(tmp_path)
        np.testing.assert_allclose(avg.mean["S_avg"], [0.1, 0.2, 0.3])
        np.testing.assert_array_equal(avg.sem["S_avg"], 0.0)

    def test_two_identical_realizations_sem_zero(self, tmp_path):
        times = [0.0, 1.0]
        for i in range(2):
            write_fake_realization(tmp_path, i, times, [0.5, 0.7])
        avg = aggregate_directory(tmp_path)
        np.testing.assert_allclose(avg.mean["S_avg"], [0.5, 0.7])
        np.testing.assert_allclose(avg.sem["S_avg"], 0.0, atol=1e-15)

    def test_two_sample_formula(self, tmp_path):
        # values {0, ln 2}: mean ln2/2, standard error ln2/2
        write_fake_realization(tmp_path, 0, [1.0], [0.0])
        write_fake_realization(tmp_path, 1, [1.0], [LN2])
        avg = aggregate_directory(tmp_path)
        assert avg.mean["S_avg"][0] == pytest.approx(LN2 / 2, rel=1e-12)
        assert avg.sem["S_avg"][0] == pytest.approx(LN2 / 2, rel=1e-12)

    def test_grid_mismatch_rejected(self, tmp_path):
        write_fake_realization(tmp_path, 0, [0.0, 1.0], [0.1, 0.2])
        write_fake_realization(tmp_path, 1, [0.0, 2.0], [0.1, 0.2])
        with pytest.raises(ValueError):
            aggregate_directory(tmp_path)

    def test_missing_manifest_rejected(self, tmp_path):
        write_fake_realization(tmp_path, 0, [0.0, 1.0], [0.1, 0.2])
        (tmp_path / "r00000.json").unlink()
        with pytest.raises(ValueError):
            aggregate_directory(tmp_path)

    def test_empty_directory_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            aggregate_directory(tmp_path)

    def test_aggregate_csv_roundtrip(self, tmp_path):
        write_fake_realization(tmp_path, 0, [0.0, 1.0], [0.25, 0.5])
        write_fake_realization(tmp_path, 1, [0.0, 1.0], [0.75, 0.5])
        avg = aggregate_directory(tmp_path)
        out = tmp_path / "aggregate.csv"
        write_aggregate_csv(out, avg)
        names, data = read_trajectory_csv(out)
        assert names[0] == "t"
        assert "S_avg_mean" in names and "S_avg_sem" in names
        np.testing.assert_allclose(
            data[:, names.index("S_avg_mean")], [0.5, 0.5], atol=1e-15
        )
