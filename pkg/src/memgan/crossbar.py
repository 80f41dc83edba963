"""Memristive crossbar dot-product engine.

A signed weight matrix lives in the array as a conductance-magnitude
matrix plus a sign matrix (sign realized by inverting the row drive
voltage, not by differential device pairs). Readout is either ``ideal``
(exact signed dot product, the oracle used for training gradients and
unit tests) or ``loaded`` (each column read across a load memristor, a
voltage divider that keeps the output within the input voltage range).
"""

import enum
from dataclasses import dataclass, field

import numpy as np

from memgan.device import DeviceSpec, VariabilityModel, quantize, sample_variability


class ReadoutMode(enum.Enum):
    IDEAL = "ideal"
    LOADED = "loaded"


class DegenerateWeightScale(ValueError):
    """All-zero weight matrix: the map's scale w_max is undefined."""


@dataclass
class CrossbarArray:
    """One layer's weights in physical form.

    g_mag: conductance magnitudes, rows = inputs, columns = outputs.
    sign:  entries in {-1, +1}.
    g_load: load conductance per column (scalar broadcast allowed).
    w_max: the |w| that maps to G_on; needed to invert the mapping.
    """

    g_mag: np.ndarray
    sign: np.ndarray
    g_load: float
    spec: DeviceSpec
    w_max: float = 1.0

    def __post_init__(self):
        self.g_mag = np.asarray(self.g_mag, dtype=float)
        self.sign = np.asarray(self.sign)
        if self.g_mag.shape != self.sign.shape:
            raise ValueError("g_mag and sign shapes differ")
        if not np.all(np.abs(self.sign) == 1):
            raise ValueError("sign entries must be -1 or +1")
        if self.g_load <= 0:
            raise ValueError("g_load must be positive")

    @property
    def rows(self) -> int:
        return self.g_mag.shape[0]

    @property
    def cols(self) -> int:
        return self.g_mag.shape[1]

    @property
    def n_cells(self) -> int:
        return self.g_mag.size


def map_weights(w: np.ndarray, spec: DeviceSpec, *, quantized: bool = False,
                variability: VariabilityModel | None = None,
                rng: np.random.Generator | None = None,
                w_max: float | None = None,
                g_load: float | None = None) -> CrossbarArray:
    """Program a signed weight matrix into a crossbar.

    |w| maps affinely onto [G_off, G_on]; sign(w) goes to the sign matrix
    (zeros map to +1). Quantization snaps to the device level grid;
    variability perturbs each programmed conductance.
    """
    w = np.asarray(w, dtype=float)
    if w_max is None:
        w_max = float(np.max(np.abs(w)))
        if w_max == 0.0:
            raise DegenerateWeightScale("degenerate weight scale: all-zero weights")
    if w_max <= 0:
        raise DegenerateWeightScale("degenerate weight scale: w_max must be > 0")

    sign = np.where(w < 0, -1, 1)
    frac = np.clip(np.abs(w) / w_max, 0.0, 1.0)
    g = spec.g_off + frac * (spec.g_on - spec.g_off)
    if quantized:
        g = quantize(g, spec)
    if variability is not None and variability.sigma_pct > 0:
        if rng is None:
            raise ValueError("variability sampling needs an rng")
        g = sample_variability(g, variability, rng, spec)
    if g_load is None:
        g_load = spec.g_on  # one load device at R_on per column
    return CrossbarArray(g_mag=g, sign=sign, g_load=g_load, spec=spec, w_max=w_max)


def inverse_map(xbar: CrossbarArray) -> np.ndarray:
    """Recover the signed weight matrix the array represents."""
    spec = xbar.spec
    frac = (xbar.g_mag - spec.g_off) / (spec.g_on - spec.g_off)
    return xbar.sign * frac * xbar.w_max


def read(xbar: CrossbarArray, v_in: np.ndarray, mode: ReadoutMode) -> np.ndarray:
    """Column readout for an input voltage vector (or batch of vectors).

    ideal:  out_j = sum_i sign_ij * w_ij * v_i  (exact signed dot product).
    loaded: out_j = sum_i g_ij * (sign_ij * v_i) / (g_load + sum_i g_ij);
            the divider bounds |out_j| by max_i |v_i|.

    v_in may be shape (rows,) or (batch, rows).
    """
    v = np.asarray(v_in, dtype=float)
    squeeze = v.ndim == 1
    if squeeze:
        v = v[None, :]
    if v.shape[1] != xbar.rows:
        raise ValueError(f"input length {v.shape[1]} != crossbar rows {xbar.rows}")

    if mode is ReadoutMode.IDEAL:
        out = v @ inverse_map(xbar)
    else:
        signed_g = xbar.g_mag * xbar.sign
        denom = xbar.g_load + xbar.g_mag.sum(axis=0)
        out = (v @ signed_g) / denom
    return out[0] if squeeze else out


def leakage_current(xbar: CrossbarArray, noise_level: float,
                    rng: np.random.Generator):
    """Sneak current through nominally idle rows.

    Each unselected row carries a residual noise voltage drawn from
    Uniform(0, noise_level * v_write); column leakage is the Ohmic sum
    of those voltages through the column's conductances.

    Returns (per_column_amperes, total_amperes).
    """
    if noise_level < 0:
        raise ValueError("noise_level must be >= 0")
    if noise_level == 0:
        per_col = np.zeros(xbar.cols)
        return per_col, 0.0
    eps = rng.uniform(0.0, noise_level * xbar.spec.v_write, size=xbar.rows)
    per_col = eps @ xbar.g_mag
    return per_col, float(per_col.sum())
