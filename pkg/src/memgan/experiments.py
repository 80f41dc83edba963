"""Experiment runners: training runs, sweeps, epoch snapshots.

Each runner trains (or reuses) desk-scale GANs, scores generated images
against the real corpus with the Gaussian Frechet metric, and persists
grids, CSV metrics and checkpoints under its own output directory.

Determinism: every output file is a pure function of (config, seed).
Wall-clock timings are therefore kept out of the metric CSVs and written
to a separate timing log.
"""

import csv
import time
from dataclasses import dataclass, replace
from io import StringIO
from pathlib import Path

import numpy as np

from memgan.checkpoint import save_checkpoint
from memgan.config import (DEFAULT_EPOCH_SNAPSHOTS_FULL, RunConfig)
from memgan.gan import (TrainState, generate_samples, init_state,
                        quality_metric, train)
from memgan.imaging import save_grid_png


@dataclass
class MetricsRecord:
    run_id: str
    epoch: int
    d_loss: float
    g_loss: float
    quality: float
    sigma_pct: float
    n_levels: int
    wall_seconds: float = 0.0


METRICS_COLUMNS = ["run_id", "epoch", "d_loss", "g_loss", "quality_metric",
                   "sigma_pct", "n_levels"]


def metrics_csv(records: list[MetricsRecord]) -> str:
    buf = StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(METRICS_COLUMNS)
    for r in records:
        w.writerow([r.run_id, r.epoch, f"{r.d_loss:.9g}", f"{r.g_loss:.9g}",
                    f"{r.quality:.9g}", f"{r.sigma_pct:.9g}", r.n_levels])
    return buf.getvalue()


def evaluate(state: TrainState, real_images: np.ndarray, n_samples: int,
             seed: int) -> tuple[np.ndarray, float]:
    """Generate fixed samples and score them against the real corpus.

    Both sets are normalized to [-1, 1] before the metric.
    """
    samples = generate_samples(n_samples, state, seed)
    metric = quality_metric(samples / state.config.v_scale, real_images)
    return samples, metric


def run_training(cfg: RunConfig, images: np.ndarray, run_id: str,
                 out_dir: Path, snapshots: list[int] | None = None
                 ) -> tuple[TrainState, list[MetricsRecord]]:
    """Train one GAN; emit a sample grid + metric at each snapshot epoch.

    A snapshot grid is emitted for every requested epoch that was
    reached, the first one unconditionally even if later epochs diverge.
    """
    out_dir.mkdir(parents=True, exist_ok=True)
    tcfg = cfg.train_config()
    spec = cfg.device_spec()
    gen_topo, disc_topo = cfg.topologies()
    state = init_state(gen_topo, disc_topo, spec, tcfg)
    snapshot_set = set(snapshots if snapshots is not None else [tcfg.epochs])
    records: list[MetricsRecord] = []
    t0 = time.monotonic()

    def on_epoch(st: TrainState):
        if st.epoch in snapshot_set:
            samples, metric = evaluate(st, images, cfg.n_samples, tcfg.seed)
            save_grid_png(out_dir / f"samples_epoch_{st.epoch:03d}.png",
                          samples[:cfg.grid_samples], tcfg.v_scale)
            records.append(MetricsRecord(
                run_id, st.epoch, st.d_loss_history[-1], st.g_loss_history[-1],
                metric, tcfg.sigma_pct, spec.n_levels,
                time.monotonic() - t0))

    train(images, state, tcfg, epoch_callback=on_epoch)
    save_checkpoint(state, out_dir / "checkpoint.bin")
    (out_dir / "loss.csv").write_text(_loss_csv(state))
    (out_dir / "metrics.csv").write_text(metrics_csv(records))
    (out_dir / "timing.log").write_text(
        f"{run_id} wall_seconds={time.monotonic() - t0:.3f}\n")
    return state, records


def _loss_csv(state: TrainState) -> str:
    buf = StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["step", "d_loss", "g_loss"])
    for i, (d, g) in enumerate(zip(state.d_loss_history, state.g_loss_history)):
        w.writerow([i, f"{d:.9g}", f"{g:.9g}"])
    return buf.getvalue()


def _sweep(cfg: RunConfig, images: np.ndarray, out_dir: Path, axis: str,
           points: list, make_cfg) -> list[MetricsRecord]:
    if not points:
        raise ValueError(f"empty {axis} sweep list")
    out_dir.mkdir(parents=True, exist_ok=True)
    all_records = []
    for p in points:
        run_id = f"{axis}_{p:g}" if isinstance(p, float) else f"{axis}_{p}"
        point_cfg = make_cfg(p)
        _, records = run_training(point_cfg, images, run_id, out_dir / run_id)
        all_records.extend(records)
    (out_dir / f"sweep_{axis}.csv").write_text(metrics_csv(all_records))
    return all_records


def sweep_variability(cfg: RunConfig, images: np.ndarray,
                      out_dir: Path) -> list[MetricsRecord]:
    """Final image quality vs programming variability (fixed level count)."""
    return _sweep(cfg, images, out_dir, "variability", cfg.variability_list,
                  lambda s: replace(cfg, sigma_pct=float(s)))


def sweep_levels(cfg: RunConfig, images: np.ndarray,
                 out_dir: Path) -> list[MetricsRecord]:
    """Final image quality vs number of stable conductance levels."""
    return _sweep(cfg, images, out_dir, "levels", cfg.levels_list,
                  lambda n: replace(cfg, n_levels=int(n)))


def snapshot_epochs(cfg: RunConfig, images: np.ndarray,
                    out_dir: Path) -> list[MetricsRecord]:
    """Image quality at fixed epoch snapshots of one training run."""
    snaps = (DEFAULT_EPOCH_SNAPSHOTS_FULL if cfg.full_scale
             else cfg.epoch_snapshots)
    snaps = sorted(set(int(s) for s in snaps))
    run_cfg = replace(cfg, epochs=max(max(snaps), cfg.epochs))
    _, records = _run_with_snaps(run_cfg, images, out_dir, snaps)
    (out_dir / "sweep_epochs.csv").write_text(metrics_csv(records))
    return records


def _run_with_snaps(cfg, images, out_dir, snaps):
    return run_training(cfg, images, "epochs", out_dir, snapshots=snaps)
