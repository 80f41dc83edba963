"""IDX ingestion: format round trip, error reporting, fallback synthesis."""

import struct

import numpy as np
import pytest

from memgan.data import (FALLBACK_IMAGES, IDX_IMAGE_MAGIC, IdxFormatError,
                         dataset_path, load_idx_images, load_idx_labels,
                         load_mnist, load_training_images, save_idx_images)


def test_idx_round_trip(tmp_path):
    imgs = (np.arange(2 * 3 * 4) % 256).astype(np.uint8).reshape(2, 3, 4)
    path = tmp_path / "imgs.idx"
    save_idx_images(path, imgs)
    assert np.array_equal(load_idx_images(path), imgs)


def test_idx_header_errors(tmp_path):
    short = tmp_path / "short.idx"
    short.write_bytes(b"\x00\x01")
    with pytest.raises(IdxFormatError, match="truncated"):
        load_idx_images(short)

    bad = tmp_path / "bad.idx"
    bad.write_bytes(struct.pack(">iiii", 0xdead, 1, 2, 2) + b"\x00" * 4)
    with pytest.raises(IdxFormatError, match="magic"):
        load_idx_images(bad)


def test_idx_body_errors(tmp_path):
    trunc = tmp_path / "trunc.idx"
    trunc.write_bytes(struct.pack(">iiii", IDX_IMAGE_MAGIC, 2, 2, 2) + b"\x00" * 5)
    with pytest.raises(IdxFormatError, match="truncated"):
        load_idx_images(trunc)

    over = tmp_path / "over.idx"
    over.write_bytes(struct.pack(">iiii", IDX_IMAGE_MAGIC, 1, 2, 2) + b"\x00" * 9)
    with pytest.raises(IdxFormatError, match="dimension mismatch"):
        load_idx_images(over)


def test_idx_labels(tmp_path):
    path = tmp_path / "labels.idx"
    path.write_bytes(struct.pack(">ii", 0x00000801, 3) + bytes([1, 2, 3]))
    assert list(load_idx_labels(path)) == [1, 2, 3]
    bad = tmp_path / "bad.idx"
    bad.write_bytes(struct.pack(">ii", 0x00000801, 5) + bytes([1]))
    with pytest.raises(IdxFormatError):
        load_idx_labels(bad)


def test_load_mnist_scaling(tmp_path):
    imgs = np.array([[[0, 255], [128, 64]]], dtype=np.uint8)
    path = tmp_path / "imgs.idx"
    save_idx_images(path, imgs)
    out = load_mnist(path)
    assert out.shape == (1, 2, 2, 1)
    assert out.min() == pytest.approx(-1.0)
    assert out.max() == pytest.approx(1.0)


def test_fallback_synthesis_and_shape(data_root):
    assert (data_root / FALLBACK_IMAGES).exists()
    assert dataset_path(data_root).name == FALLBACK_IMAGES
    imgs = load_training_images(data_root, 100)
    assert imgs.shape == (100, 28, 28, 1)
    assert imgs.min() >= -1.0 and imgs.max() <= 1.0
    # handwriting on a dark background: background dominates
    assert np.mean(imgs < -0.5) > 0.4


def test_real_dataset_preferred_over_fallback(tmp_path):
    from memgan.data import MNIST_TRAIN_IMAGES
    imgs = np.zeros((2, 28, 28), dtype=np.uint8)
    save_idx_images(tmp_path / MNIST_TRAIN_IMAGES, imgs)
    assert dataset_path(tmp_path).name == MNIST_TRAIN_IMAGES


def test_subset_limits_count(data_root):
    assert len(load_training_images(data_root, 17)) == 17
