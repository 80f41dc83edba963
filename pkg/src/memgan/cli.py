"""Command-line front end.

Subcommands: train, generate, sweep-variability, sweep-levels,
snapshot-epochs, cost, leakage. Every run is fully specified by
(config file, seed); outputs land under --out and are bit-reproducible.

Exit codes: 0 success, 2 config/usage error, 3 data error,
4 training diverged, 1 anything else.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from memgan import costs
from memgan.checkpoint import CheckpointError, load_checkpoint
from memgan.config import ConfigError, RunConfig, load_config
from memgan.costs import (CMOS_COMPONENTS, CmosCostTable, ScheduleConfig,
                          SCHEMES, cmos_cost, schedule_csv, schedule_report,
                          schedule_table)
from memgan.crossbar import leakage_current, map_weights
from memgan.data import IdxFormatError, load_training_images
from memgan.experiments import (run_training, snapshot_epochs,
                                sweep_levels, sweep_variability)
from memgan.gan import TrainingDiverged, generate_samples
from memgan.imaging import save_grid_png
from memgan.rng import substream

EXIT_OK = 0
EXIT_OTHER = 1
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_DIVERGED = 4

DEFAULT_LEAKAGE_NOISE_LEVELS = [0.0, 0.1, 0.2, 0.4]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="memgan", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("train", "generate", "sweep-variability", "sweep-levels",
                 "snapshot-epochs", "cost", "leakage"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="key=value run-config file")
        sp.add_argument("--seed", type=int, help="root random seed")
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--device", help="key=value file with device overrides")
        sp.add_argument("--topology",
                        choices=["reference-small", "reference-full"])
        sp.add_argument("--full-scale", action="store_true",
                        help="full sweep ranges instead of desk-scale defaults")
        if name == "generate":
            sp.add_argument("--checkpoint", required=True)
            sp.add_argument("-n", type=int, default=10, help="samples to draw")
    return p


def _load_cfg(args) -> RunConfig:
    from dataclasses import replace

    from memgan.config import parse_file

    overrides = {"seed": args.seed, "out_dir": args.out,
                 "topology": args.topology,
                 "full_scale": args.full_scale or None}
    cfg = load_config(args.config, overrides)
    if args.device:
        cfg = replace(cfg, **parse_file(args.device))
    return cfg


def _images(cfg: RunConfig) -> np.ndarray:
    subset = None if cfg.full_scale else cfg.subset
    return load_training_images(cfg.data_root or None, subset)


def _cmd_train(cfg: RunConfig) -> int:
    out = Path(cfg.out_dir)
    run_training(cfg, _images(cfg), f"train_seed{cfg.seed}", out,
                 snapshots=list(range(1, cfg.epochs + 1)))
    print(f"trained {cfg.epochs} epochs -> {out}")
    return EXIT_OK


def _cmd_generate(cfg: RunConfig, checkpoint: str, n: int) -> int:
    gen_topo, disc_topo = cfg.topologies()
    state = load_checkpoint(checkpoint, gen_topo, disc_topo,
                            cfg.train_config(), expected_spec=cfg.device_spec())
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    samples = generate_samples(n, state, cfg.seed)
    save_grid_png(out / "generated.png", samples, state.config.v_scale)
    print(f"wrote {n} samples -> {out / 'generated.png'}")
    return EXIT_OK


def _cmd_cost(cfg: RunConfig) -> int:
    gen_topo, disc_topo = cfg.topologies()
    spec = cfg.device_spec()
    images = 60_000 if cfg.full_scale else cfg.subset
    epochs = 50 if cfg.full_scale else cfg.epochs
    reports = [schedule_report(
        ScheduleConfig.from_topologies(s, spec, gen_topo, disc_topo),
        epochs, images) for s in SCHEMES]
    w = gen_topo.weight_count + disc_topo.weight_count
    print(f"topology {cfg.topology}: W={w} weights, "
          f"L={len(gen_topo.crossbar_layers) + len(disc_topo.crossbar_layers)} "
          f"crossbar layers, events={epochs * images}")
    print(schedule_table(reports))

    table = CmosCostTable(
        power_mw=dict(zip(CMOS_COMPONENTS, cfg.cmos_power_mw_list))
        if cfg.cmos_power_mw_list else costs.DEFAULT_CMOS_POWER_MW,
        area_um2=dict(zip(CMOS_COMPONENTS, cfg.cmos_area_um2_list))
        if cfg.cmos_area_um2_list else costs.DEFAULT_CMOS_AREA_UM2)
    counts = dict(zip(CMOS_COMPONENTS, (int(c) for c in cfg.cmos_counts_list)))
    power_w, area_mm2 = cmos_cost(counts, table)
    print(f"CMOS totals for counts {counts}: "
          f"{power_w * 1e3:.4f} mW, {area_mm2 * 1e6:.1f} um^2")

    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "cost.csv").write_text(schedule_csv(reports))
    return EXIT_OK


def _cmd_leakage(cfg: RunConfig) -> int:
    spec = cfg.device_spec()
    rng = substream(cfg.seed, "leakage")
    w = substream(cfg.seed, "weights").normal(0, 0.1, size=(64, 16))
    xbar = map_weights(w, spec, quantized=cfg.quantize)
    trials = 10_000
    lines = ["noise_level,mean_total_leakage_a,trials"]
    for noise in DEFAULT_LEAKAGE_NOISE_LEVELS:
        if noise == 0.0:
            mean = 0.0
        else:
            mean = float(np.mean([leakage_current(xbar, noise, rng)[1]
                                  for _ in range(trials)]))
        lines.append(f"{noise:g},{mean:.9g},{trials}")
        print(f"noise={noise:g}  mean total leakage = {mean:.4g} A")
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "leakage.csv").write_text("\n".join(lines) + "\n")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load_cfg(args)
        if args.command == "train":
            return _cmd_train(cfg)
        if args.command == "generate":
            return _cmd_generate(cfg, args.checkpoint, args.n)
        if args.command == "sweep-variability":
            sweep_variability(cfg, _images(cfg), Path(cfg.out_dir))
            return EXIT_OK
        if args.command == "sweep-levels":
            sweep_levels(cfg, _images(cfg), Path(cfg.out_dir))
            return EXIT_OK
        if args.command == "snapshot-epochs":
            snapshot_epochs(cfg, _images(cfg), Path(cfg.out_dir))
            return EXIT_OK
        if args.command == "cost":
            return _cmd_cost(cfg)
        if args.command == "leakage":
            return _cmd_leakage(cfg)
        raise AssertionError(args.command)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (IdxFormatError, FileNotFoundError) as e:
        print(f"data error: {e}", file=sys.stderr)
        return EXIT_DATA
    except TrainingDiverged as e:
        print(f"training error: {e}", file=sys.stderr)
        return EXIT_DIVERGED
    except CheckpointError as e:
        print(f"checkpoint error: {e}", file=sys.stderr)
        return EXIT_OTHER


if __name__ == "__main__":
    sys.exit(main())
