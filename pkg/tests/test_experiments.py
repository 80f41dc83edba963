"""Experiment runners: metrics CSV, training runs, sweeps."""

from dataclasses import replace

import numpy as np

from memgan.config import RunConfig
from memgan.experiments import (MetricsRecord, metrics_csv, run_training,
                                snapshot_epochs, sweep_levels,
                                sweep_variability)


def quick_cfg(data_root, out, **kw):
    base = dict(epochs=1, subset=40, n_samples=20, grid_samples=4,
                data_root=str(data_root), out_dir=str(out))
    base.update(kw)
    return replace(RunConfig(), **base)


def test_metrics_csv_deterministic_columns():
    rec = MetricsRecord("run", 1, 0.5, 0.6, 123.456, 0.0, 128,
                        wall_seconds=3.21)
    text = metrics_csv([rec])
    lines = text.strip().splitlines()
    assert lines[0] == ("run_id,epoch,d_loss,g_loss,quality_metric,"
                       "sigma_pct,n_levels")
    assert "3.21" not in text  # wall clock stays out of deterministic output


def test_run_training_outputs(tmp_path, data_root, corpus):
    cfg = quick_cfg(data_root, tmp_path / "run")
    state, records = run_training(cfg, corpus[:40], "t", tmp_path / "run",
                                  snapshots=[1])
    out = tmp_path / "run"
    assert (out / "checkpoint.bin").exists()
    assert (out / "loss.csv").exists()
    assert (out / "metrics.csv").exists()
    assert (out / "timing.log").exists()
    assert (out / "samples_epoch_001.png").exists()
    assert len(records) == 1 and records[0].epoch == 1
    assert state.update_events == 40


def test_sweep_variability_one_dir_per_point(tmp_path, data_root, corpus):
    cfg = quick_cfg(data_root, tmp_path, variability_list=[0.0, 0.4])
    records = sweep_variability(cfg, corpus[:40], tmp_path)
    assert {r.sigma_pct for r in records} == {0.0, 0.4}
    assert (tmp_path / "sweep_variability.csv").exists()
    assert (tmp_path / "variability_0" / "metrics.csv").exists()
    assert (tmp_path / "variability_0.4" / "metrics.csv").exists()


def test_sweep_levels(tmp_path, data_root, corpus):
    cfg = quick_cfg(data_root, tmp_path, levels_list=[2, 128])
    records = sweep_levels(cfg, corpus[:40], tmp_path)
    assert {r.n_levels for r in records} == {2, 128}
    assert (tmp_path / "sweep_levels.csv").exists()


def test_snapshot_epochs(tmp_path, data_root, corpus):
    cfg = quick_cfg(data_root, tmp_path, epochs=2, epoch_snapshots=[1, 2])
    records = snapshot_epochs(cfg, corpus[:40], tmp_path)
    assert [r.epoch for r in records] == [1, 2]
    assert (tmp_path / "sweep_epochs.csv").exists()
    assert (tmp_path / "samples_epoch_001.png").exists()
    assert (tmp_path / "samples_epoch_002.png").exists()
