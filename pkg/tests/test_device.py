"""Device model: level grid, quantization, variability, write power."""

import numpy as np
import pytest

from memgan.device import (DeviceSpec, VariabilityModel, conductance_levels,
                           quantize, sample_variability, write_power)
from memgan.rng import substream


def test_default_spec_values():
    spec = DeviceSpec()
    assert spec.r_on == 4000.0
    assert spec.r_off == 25000.0
    assert spec.v_threshold == 0.8
    assert spec.v_write == 1.0
    assert spec.t_write == 10e-9
    assert spec.n_levels == 128
    assert spec.g_on == pytest.approx(1 / 4000)
    assert spec.g_off == pytest.approx(1 / 25000)


@pytest.mark.parametrize("kwargs", [
    {"r_on": 0.0}, {"r_on": 25000.0, "r_off": 4000.0},
    {"v_write": 0.5}, {"n_levels": 1},
])
def test_spec_validation(kwargs):
    with pytest.raises(ValueError):
        DeviceSpec(**kwargs)


def test_levels_strictly_increasing_with_exact_endpoints():
    for n in (2, 3, 64, 128, 256):
        levels = conductance_levels(DeviceSpec(n_levels=n))
        assert len(levels) == n
        assert np.all(np.diff(levels) > 0)
        assert levels[0] == pytest.approx(1 / 25000)
        assert levels[-1] == pytest.approx(1 / 4000)


def test_quantize_snaps_to_grid():
    spec = DeviceSpec(n_levels=5)
    levels = conductance_levels(spec)
    # each level is its own fixed point
    assert np.allclose(quantize(levels, spec), levels)
    # just below / above a midpoint snap to the respective neighbors
    mid = 0.5 * (levels[1] + levels[2])
    gap = levels[1] - levels[0]
    assert quantize(mid - 1e-3 * gap, spec) == pytest.approx(levels[1])
    assert quantize(mid + 1e-3 * gap, spec) == pytest.approx(levels[2])


def test_quantize_ties_round_up():
    # binary-exact conductances so midpoints are represented exactly
    spec = DeviceSpec(r_on=0.5, r_off=1.0, n_levels=5)
    levels = conductance_levels(spec)
    assert np.array_equal(levels, [1.0, 1.25, 1.5, 1.75, 2.0])
    for i in range(len(levels) - 1):
        mid = 0.5 * (levels[i] + levels[i + 1])
        assert quantize(mid, spec) == levels[i + 1]


def test_quantize_clamps_out_of_range():
    spec = DeviceSpec()
    assert quantize(0.0, spec) == pytest.approx(spec.g_off)
    assert quantize(1.0, spec) == pytest.approx(spec.g_on)


def test_quantize_scalar_and_array():
    spec = DeviceSpec()
    scalar = quantize(2e-4, spec)
    assert isinstance(scalar, float)
    arr = quantize(np.full((3, 4), 2e-4), spec)
    assert arr.shape == (3, 4)
    assert np.all(arr == scalar)


def test_variability_zero_sigma_is_identity_without_rng_draw():
    spec = DeviceSpec()
    rng = substream(0, "variability")
    state_before = rng.bit_generator.state
    g = np.linspace(spec.g_off, spec.g_on, 10)
    out = sample_variability(g, VariabilityModel(0.0), rng, spec)
    assert np.array_equal(out, g)
    assert rng.bit_generator.state == state_before


def test_variability_reproducible_and_clipped():
    spec = DeviceSpec()
    model = VariabilityModel(0.5)
    g = np.full(10_000, spec.g_on)  # at the ceiling: only downward moves remain
    a = sample_variability(g, model, substream(7, "variability"), spec)
    b = sample_variability(g, model, substream(7, "variability"), spec)
    assert np.array_equal(a, b)
    assert np.all(a >= spec.g_off) and np.all(a <= spec.g_on)
    assert np.any(a < spec.g_on)


def test_variability_model_validation():
    with pytest.raises(ValueError):
        VariabilityModel(-0.1)
    with pytest.raises(ValueError):
        VariabilityModel(0.1, distribution="additive")


def test_write_power_linear_and_bounded():
    spec = DeviceSpec()
    assert write_power(spec, spec.g_on) == pytest.approx(1.0 / 4000)
    assert write_power(spec, spec.g_off) == pytest.approx(1.0 / 25000)
    assert write_power(spec, 0.0) == 0.0
    g = np.linspace(spec.g_off, spec.g_on, 50)
    p = write_power(spec, g)
    assert np.all(np.diff(p) > 0)
