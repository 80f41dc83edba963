"""Run configuration: one human-editable key=value file per experiment.

Every experiment is fully specified by (config file, seed). Unset keys
take the desk-scale defaults: 1000-image subset, reference-small
topology, 5 epochs. ``--full-scale`` switches to the full sweep ranges.
"""

from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from memgan.device import DeviceSpec
from memgan.gan import TrainConfig
from memgan.topology import reference_full, reference_small


class ConfigError(ValueError):
    pass


DEFAULT_VARIABILITY_SWEEP = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5]
DEFAULT_LEVELS_SWEEP = [2, 4, 8, 16, 32, 64, 128, 256]
DEFAULT_EPOCH_SNAPSHOTS_FULL = [1, 20, 50, 70]


@dataclass
class RunConfig:
    # device
    r_on_ohms: float = 4_000.0
    r_off_ohms: float = 25_000.0
    v_threshold_volts: float = 0.8
    v_write_volts: float = 1.0
    t_write_seconds: float = 10e-9
    n_levels: int = 128
    # topology / training
    topology: str = "reference-small"
    epochs: int = 5
    batch_size: int = 10
    learning_rate: float = 0.08
    latent_dim: int = 0      # 0 = the topology's native latent size
    seed: int = 0
    # analog effects
    quantize: bool = True
    sigma_pct: float = 0.0
    loaded_readout: bool = False
    leakage_noise: float = 0.0
    # sweeps
    variability_list: list = field(default_factory=lambda: list(DEFAULT_VARIABILITY_SWEEP))
    levels_list: list = field(default_factory=lambda: list(DEFAULT_LEVELS_SWEEP))
    epoch_snapshots: list = field(default_factory=lambda: [1, 5])
    # CMOS cost table overrides, in component order
    # (dropout_switch, opamp, thresholding, relu, crossbar_switch)
    cmos_counts_list: list = field(default_factory=lambda: [1, 1, 1, 1, 1])
    cmos_power_mw_list: list = field(default_factory=list)
    cmos_area_um2_list: list = field(default_factory=list)
    # io
    out_dir: str = "out"
    data_root: str = ""
    subset: int = 1000
    n_samples: int = 200
    grid_samples: int = 10
    full_scale: bool = False

    def device_spec(self) -> DeviceSpec:
        try:
            return DeviceSpec(self.r_on_ohms, self.r_off_ohms,
                              self.v_threshold_volts, self.v_write_volts,
                              self.t_write_seconds, self.n_levels)
        except ValueError as e:
            raise ConfigError(str(e)) from e

    def topologies(self):
        if self.topology == "reference-small":
            return (reference_small(self.latent_dim) if self.latent_dim
                    else reference_small())
        if self.topology == "reference-full":
            return (reference_full(self.latent_dim) if self.latent_dim
                    else reference_full())
        raise ConfigError(f"unknown topology {self.topology!r}")

    def train_config(self) -> TrainConfig:
        gen, _ = self.topologies()
        return TrainConfig(epochs=self.epochs, batch_size=self.batch_size,
                           learning_rate=self.learning_rate,
                           latent_dim=gen.crossbar_layers[0].rows,
                           quantize=self.quantize,
                           sigma_pct=self.sigma_pct,
                           loaded_readout=self.loaded_readout,
                           leakage_noise=self.leakage_noise, seed=self.seed)


def _coerce(value: str, target_type):
    if target_type is bool:
        if value.lower() in ("1", "true", "yes", "on"):
            return True
        if value.lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"not a boolean: {value!r}")
    if target_type is int:
        return int(value)
    if target_type is float:
        return float(value)
    if target_type is list:
        if not value.strip():
            return []
        items = [v.strip() for v in value.split(",")]
        return [float(v) if "." in v or "e" in v.lower() else int(v)
                for v in items]
    return value


def parse_file(path) -> dict:
    """Parse key=value lines; '#' starts a comment; later keys win."""
    cfg = RunConfig()
    types = {f.name: f.type if isinstance(f.type, type) else type(getattr(cfg, f.name))
             for f in fields(RunConfig)}
    values = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, _, val = line.partition("=")
        key = key.strip().replace("-", "_")
        if key not in types:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _coerce(val.strip(), types[key])
        except (ValueError, ConfigError) as e:
            raise ConfigError(f"{path}:{lineno}: {e}") from e
    return values


def load_config(path=None, overrides: dict | None = None) -> RunConfig:
    values = parse_file(path) if path is not None else {}
    if overrides:
        for key, val in overrides.items():
            if val is not None:
                values[key] = val
    return replace(RunConfig(), **values)
