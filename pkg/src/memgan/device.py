"""Single-memristor conductance model.

A device is programmable between G_off = 1/r_off and G_on = 1/r_on on a
finite grid of stable levels. The grid is uniform in conductance (crossbar
math is linear in conductance, so this gives uniform weight resolution).
Programming variability is multiplicative Gaussian noise on the target
conductance, clipped back to the device range.
"""

from dataclasses import dataclass

import numpy as np

# WO2-like device used throughout: R_on=4k, R_off=25k, 0.8V threshold,
# 1V / 10ns write pulse.
WO2_R_ON = 4_000.0
WO2_R_OFF = 25_000.0
WO2_V_THRESHOLD = 0.8
WO2_V_WRITE = 1.0
WO2_T_WRITE = 10e-9


@dataclass(frozen=True)
class DeviceSpec:
    """Electrical parameters of one memristor type."""

    r_on: float = WO2_R_ON
    r_off: float = WO2_R_OFF
    v_threshold: float = WO2_V_THRESHOLD
    v_write: float = WO2_V_WRITE
    t_write: float = WO2_T_WRITE
    n_levels: int = 128

    def __post_init__(self):
        if not (0.0 < self.r_on < self.r_off):
            raise ValueError("require 0 < r_on < r_off")
        if self.v_write <= self.v_threshold:
            raise ValueError("v_write must exceed v_threshold")
        if self.n_levels < 2:
            raise ValueError("n_levels must be >= 2")

    @property
    def g_on(self) -> float:
        return 1.0 / self.r_on

    @property
    def g_off(self) -> float:
        return 1.0 / self.r_off


@dataclass(frozen=True)
class VariabilityModel:
    """Multiplicative-Gaussian programming variability.

    sigma_pct is the fractional standard deviation (0 = ideal device).
    """

    sigma_pct: float = 0.0
    distribution: str = "multiplicative-gaussian"

    def __post_init__(self):
        if self.sigma_pct < 0:
            raise ValueError("sigma_pct must be >= 0")
        if self.distribution != "multiplicative-gaussian":
            raise ValueError(f"unknown distribution {self.distribution!r}")


def conductance_levels(spec: DeviceSpec) -> np.ndarray:
    """The n_levels stable conductances, uniform from G_off up to G_on."""
    return np.linspace(spec.g_off, spec.g_on, spec.n_levels)


def quantize(g, spec: DeviceSpec):
    """Snap conductance(s) to the nearest stable level.

    Out-of-range values clamp to the nearest endpoint; exact midpoints
    round toward the higher conductance. Accepts scalars or arrays.
    """
    g = np.asarray(g, dtype=float)
    gap = (spec.g_on - spec.g_off) / (spec.n_levels - 1)
    # floor(x + 0.5) rounds ties up, unlike banker's np.round
    idx = np.floor((g - spec.g_off) / gap + 0.5)
    idx = np.clip(idx, 0, spec.n_levels - 1)
    out = spec.g_off + idx * gap
    if out.ndim == 0:
        return float(out)
    return out


def sample_variability(g, model: VariabilityModel, rng: np.random.Generator,
                       spec: DeviceSpec):
    """Apply programming noise g * (1 + eps), eps ~ N(0, sigma_pct).

    Results are clipped to the device range. Identity when sigma_pct is 0
    (no RNG draw, so the stream is untouched).
    """
    g = np.asarray(g, dtype=float)
    if model.sigma_pct == 0.0:
        return float(g) if g.ndim == 0 else g.copy()
    eps = rng.normal(0.0, model.sigma_pct, size=g.shape)
    out = np.clip(g * (1.0 + eps), spec.g_off, spec.g_on)
    if out.ndim == 0:
        return float(out)
    return out


def write_power(spec: DeviceSpec, g) -> float:
    """Instantaneous power of one write pulse at conductance g: V_w^2 * g."""
    return spec.v_write ** 2 * np.asarray(g, dtype=float)
