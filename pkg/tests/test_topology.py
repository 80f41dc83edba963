"""Topology composition: shapes, weight counts, crossbar tiling."""

import pytest

from memgan.topology import (DENSE_TILE_COLS, LayerDesc, NetworkTopology,
                             REFERENCE_FULL_WEIGHT_COUNT, reference_full,
                             reference_small)


def test_small_topology_shapes():
    gen, disc = reference_small()
    assert gen.layers[0].in_shape == (16,)
    assert gen.layers[-1].out_shape == (28, 28, 1)
    assert disc.layers[0].in_shape == (28, 28, 1)
    assert disc.layers[-2].out_shape == (1,)
    assert len(gen.crossbar_layers) == 3
    assert len(disc.crossbar_layers) == 3


def test_full_topology_weight_count():
    gen, disc = reference_full()
    counts = [l.n_cells for l in gen.crossbar_layers]
    assert counts == [100 * 14 * 14 * 64, 25 * 64 * 128, 25 * 128 * 1]
    counts = [l.n_cells for l in disc.crossbar_layers]
    assert counts == [25 * 128, 25 * 128 * 64, 7 * 7 * 64 * 1]
    total = gen.weight_count + disc.weight_count
    assert total == REFERENCE_FULL_WEIGHT_COUNT == 1_673_536
    # within 10% of the 1.7M reference figure
    assert abs(total - 1.7e6) / 1.7e6 < 0.10
    assert len(gen.crossbar_layers) + len(disc.crossbar_layers) == 6


def test_dense_layers_tile_to_one_image_width():
    gen, disc = reference_full()
    assert DENSE_TILE_COLS == 784
    assert gen.crossbar_layers[0].cols > 784
    assert gen.crossbar_layers[0].tile_cols == 784
    assert max(gen.max_tile_cols, disc.max_tile_cols) == 784
    gen_s, disc_s = reference_small()
    assert max(gen_s.max_tile_cols, disc_s.max_tile_cols) == 784


def test_shape_chain_validation():
    bad = (LayerDesc("dense", in_shape=(4,), out_shape=(8,), rows=4, cols=8),
           LayerDesc("relu", in_shape=(9,), out_shape=(9,)))
    with pytest.raises(ValueError):
        NetworkTopology("generator", bad)


def test_latent_dim_flows_through():
    gen, _ = reference_small(latent_dim=24)
    assert gen.crossbar_layers[0].rows == 24
