"""Sample-image grid emission.

Generated voltages in [-v_scale, v_scale] map to bytes via
(v / v_scale + 1) * 127.5, rounded half-up, and tile into one PNG.
"""

import numpy as np
from PIL import Image


def to_bytes(images: np.ndarray, v_scale: float) -> np.ndarray:
    """(n, h, w, 1) voltages -> (n, h, w) uint8."""
    px = (np.asarray(images)[..., 0] / v_scale + 1.0) * 127.5
    return np.clip(np.floor(px + 0.5), 0, 255).astype(np.uint8)


def image_grid(images: np.ndarray, v_scale: float, ncols: int = 10,
               pad: int = 2) -> np.ndarray:
    px = to_bytes(images, v_scale)
    n, h, w = px.shape
    ncols = min(ncols, max(n, 1))
    nrows = (n + ncols - 1) // ncols
    grid = np.zeros((nrows * (h + pad) + pad, ncols * (w + pad) + pad),
                    dtype=np.uint8)
    for i in range(n):
        r, c = divmod(i, ncols)
        y, x = pad + r * (h + pad), pad + c * (w + pad)
        grid[y:y + h, x:x + w] = px[i]
    return grid


def save_grid_png(path, images: np.ndarray, v_scale: float,
                  ncols: int = 10) -> None:
    Image.fromarray(image_grid(images, v_scale, ncols), mode="L").save(path)
