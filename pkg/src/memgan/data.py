"""Dataset ingestion: IDX-format image files.

The trainer consumes big-endian IDX files (magic 0x00000803 for images,
0x00000801 for labels). Pixels are bytes; images rescale affinely to
[-1, 1] so byte 0 -> -1.0 and byte 255 -> +1.0.

When no MNIST files are present under the dataset root (env MEMGAN_DATA
by default), a desk-scale stand-in corpus is synthesized from the
scikit-learn handwritten-digit scans (8x8, 1797 samples), upscaled to
28x28, and written through the same IDX format so the whole ingestion
path is exercised either way.
"""

import os
import struct
from pathlib import Path

import numpy as np

IDX_IMAGE_MAGIC = 0x00000803
IDX_LABEL_MAGIC = 0x00000801
DATA_ROOT_ENV = "MEMGAN_DATA"
MNIST_TRAIN_IMAGES = "train-images-idx3-ubyte"
FALLBACK_IMAGES = "digits-images-idx3-ubyte"


class IdxFormatError(ValueError):
    pass


def load_idx_images(path) -> np.ndarray:
    """Raw uint8 image stack (n, h, w) from an IDX file."""
    raw = Path(path).read_bytes()
    if len(raw) < 16:
        raise IdxFormatError(f"truncated IDX file (header): {path}")
    magic, n, h, w = struct.unpack(">iiii", raw[:16])
    if magic != IDX_IMAGE_MAGIC:
        raise IdxFormatError(f"bad IDX magic 0x{magic:08x} in {path}")
    body = raw[16:]
    if len(body) < n * h * w:
        raise IdxFormatError(f"truncated IDX file: expected {n * h * w} pixels, "
                             f"got {len(body)} in {path}")
    if len(body) > n * h * w:
        raise IdxFormatError(f"dimension mismatch: {len(body)} pixels for "
                             f"{n}x{h}x{w} in {path}")
    return np.frombuffer(body, dtype=np.uint8).reshape(n, h, w)


def load_idx_labels(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < 8:
        raise IdxFormatError(f"truncated IDX file (header): {path}")
    magic, n = struct.unpack(">ii", raw[:8])
    if magic != IDX_LABEL_MAGIC:
        raise IdxFormatError(f"bad IDX magic 0x{magic:08x} in {path}")
    body = raw[8:]
    if len(body) != n:
        raise IdxFormatError(f"dimension mismatch: {len(body)} labels for n={n}")
    return np.frombuffer(body, dtype=np.uint8)


def save_idx_images(path, images: np.ndarray) -> None:
    images = np.asarray(images, dtype=np.uint8)
    n, h, w = images.shape
    with open(path, "wb") as f:
        f.write(struct.pack(">iiii", IDX_IMAGE_MAGIC, n, h, w))
        f.write(images.tobytes())


def load_mnist(path) -> np.ndarray:
    """Images as float tensors (n, h, w, 1) scaled to [-1, 1]."""
    imgs = load_idx_images(path)
    return (imgs.astype(float) / 255.0 * 2.0 - 1.0)[..., None]


def _synthesize_fallback(path) -> None:
    from scipy.ndimage import zoom
    from sklearn.datasets import load_digits

    digits = load_digits().images  # (1797, 8, 8), values 0..16
    up = zoom(digits, (1, 3.5, 3.5), order=1)  # -> (1797, 28, 28)
    up = np.clip(up / 16.0 * 255.0, 0, 255).round()
    save_idx_images(path, up.astype(np.uint8))


def dataset_path(root=None) -> Path:
    """Locate (or synthesize) the training-image IDX file."""
    root = Path(root or os.environ.get(DATA_ROOT_ENV, "data"))
    mnist = root / MNIST_TRAIN_IMAGES
    if mnist.exists():
        return mnist
    fallback = root / FALLBACK_IMAGES
    if not fallback.exists():
        root.mkdir(parents=True, exist_ok=True)
        _synthesize_fallback(fallback)
    return fallback


def load_training_images(root=None, subset: int | None = None) -> np.ndarray:
    imgs = load_mnist(dataset_path(root))
    if subset is not None:
        imgs = imgs[:subset]
    return imgs
