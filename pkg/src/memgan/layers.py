"""Neural-network layers realized on crossbars.

Tensors are plain numpy arrays in NHWC layout; values are interpreted as
volts. Every crossbar-backed layer stores its weights as a single patch
matrix (rows = kh*kw*C_in patch entries, columns = filters), so one layer
maps to one crossbar and both readout modes share the im2col machinery.

Transposed convolution is implemented as a stride-1 convolution over the
zero-stuffed, edge-padded input; with the spatially flipped / channel-
transposed kernel this is the exact adjoint of conv2d, which the tests
verify via the inner-product identity.

Backward passes are exact derivatives of the ideal forward and are used
by the trainer; loaded-mode reads are forward-only analog effects.
"""

from dataclasses import dataclass

import numpy as np

from memgan.crossbar import CrossbarArray, ReadoutMode, inverse_map, read

V_DD_DEFAULT = 1.8  # supply rail for the 0.18 um process


@dataclass(frozen=True)
class ConvGeom:
    """Convolution geometry: kernel, stride, symmetric-or-not zero padding."""
    kh: int
    kw: int
    stride: int = 1
    pad_top: int = 0
    pad_bottom: int = 0
    pad_left: int = 0
    pad_right: int = 0

    @staticmethod
    def same(k: int) -> "ConvGeom":
        p = (k - 1) // 2
        return ConvGeom(k, k, 1, p, p, p, p)

    def out_hw(self, h: int, w: int) -> tuple[int, int]:
        oh = (h + self.pad_top + self.pad_bottom - self.kh) // self.stride + 1
        ow = (w + self.pad_left + self.pad_right - self.kw) // self.stride + 1
        return oh, ow


@dataclass(frozen=True)
class DeconvGeom:
    """Transposed-convolution geometry. Output = (in - 1) * stride + k - crop."""
    kh: int
    kw: int
    stride: int = 1
    crop: int = 0

    def out_hw(self, h: int, w: int) -> tuple[int, int]:
        return ((h - 1) * self.stride + self.kh - self.crop,
                (w - 1) * self.stride + self.kw - self.crop)


# ---------------------------------------------------------------------------
# im2col / col2im

def im2col(x: np.ndarray, g: ConvGeom) -> np.ndarray:
    """(B,H,W,C) -> (B,OH,OW, kh*kw*C) patch tensor."""
    b, h, w, c = x.shape
    oh, ow = g.out_hw(h, w)
    if oh <= 0 or ow <= 0:
        raise ValueError(f"kernel {g.kh}x{g.kw} larger than padded input {h}x{w}")
    xp = np.pad(x, ((0, 0), (g.pad_top, g.pad_bottom),
                    (g.pad_left, g.pad_right), (0, 0)))
    cols = np.empty((b, oh, ow, g.kh * g.kw * c), dtype=x.dtype)
    for i in range(g.kh):
        for j in range(g.kw):
            sl = xp[:, i:i + g.stride * oh:g.stride,
                    j:j + g.stride * ow:g.stride, :]
            cols[..., (i * g.kw + j) * c:(i * g.kw + j + 1) * c] = sl
    return cols


def col2im(cols: np.ndarray, x_shape: tuple, g: ConvGeom) -> np.ndarray:
    """Adjoint of im2col: scatter-add patches back onto the image."""
    b, h, w, c = x_shape
    oh, ow = g.out_hw(h, w)
    xp = np.zeros((b, h + g.pad_top + g.pad_bottom,
                   w + g.pad_left + g.pad_right, c), dtype=cols.dtype)
    for i in range(g.kh):
        for j in range(g.kw):
            xp[:, i:i + g.stride * oh:g.stride,
               j:j + g.stride * ow:g.stride, :] += \
                cols[..., (i * g.kw + j) * c:(i * g.kw + j + 1) * c]
    return xp[:, g.pad_top:g.pad_top + h, g.pad_left:g.pad_left + w, :]


def _stuff_pad(z: np.ndarray, g: DeconvGeom) -> np.ndarray:
    """Zero-stuff by the stride and pad so a stride-1 conv realizes deconv."""
    b, h, w, c = z.shape
    s = g.stride
    xs = np.zeros((b, (h - 1) * s + 1, (w - 1) * s + 1, c), dtype=z.dtype)
    xs[:, ::s, ::s, :] = z
    cb, ca = g.crop // 2, g.crop - g.crop // 2
    pb, pa = g.kh - 1 - cb, g.kh - 1 - ca
    qb, qa = g.kw - 1 - cb, g.kw - 1 - ca
    return np.pad(xs, ((0, 0), (pb, pa), (qb, qa), (0, 0)))


def _unstuff(dxs: np.ndarray, z_shape: tuple, g: DeconvGeom) -> np.ndarray:
    """Adjoint of _stuff_pad: pick gradients off the stuffed positions."""
    b, h, w, c = z_shape
    s = g.stride
    cb = g.crop // 2
    pb, qb = g.kh - 1 - cb, g.kw - 1 - cb
    core = dxs[:, pb:pb + (h - 1) * s + 1, qb:qb + (w - 1) * s + 1, :]
    return core[:, ::s, ::s, :].copy()


def adjoint_matrix(kernel: np.ndarray) -> np.ndarray:
    """Patch matrix of the deconv that is adjoint to conv with ``kernel``.

    kernel: (kh, kw, C_in, F). Returns (kh*kw*F, C_in): the spatially
    flipped, channel-transposed kernel flattened in patch order.
    """
    flipped = kernel[::-1, ::-1].transpose(0, 1, 3, 2)  # (kh, kw, F, C_in)
    kh, kw, f, c = flipped.shape
    return flipped.reshape(kh * kw * f, c)


# ---------------------------------------------------------------------------
# crossbar-backed layer forwards (spec surface: ideal or loaded readout)

def conv2d(x: np.ndarray, xbar: CrossbarArray, geom: ConvGeom,
           mode: ReadoutMode) -> np.ndarray:
    """2-D cross-correlation through a crossbar; one read per output pixel."""
    cols = im2col(x, geom)
    b, oh, ow, r = cols.shape
    if r != xbar.rows:
        raise ValueError(f"patch size {r} != crossbar rows {xbar.rows}")
    out = read(xbar, cols.reshape(-1, r), mode)
    return out.reshape(b, oh, ow, xbar.cols)


def deconv2d(z: np.ndarray, xbar: CrossbarArray, geom: DeconvGeom,
             mode: ReadoutMode) -> np.ndarray:
    """Transposed convolution through a crossbar (stuffed stride-1 conv)."""
    xs = _stuff_pad(z, geom)
    g1 = ConvGeom(geom.kh, geom.kw, 1)
    return conv2d(xs, xbar, g1, mode)


def dense(x: np.ndarray, xbar: CrossbarArray, mode: ReadoutMode) -> np.ndarray:
    """Fully connected layer: flatten and read every column.

    Columns are processed sequentially in hardware; that affects the
    timing model only, not the values.
    """
    v = x.reshape(x.shape[0], -1) if x.ndim > 2 else x
    return read(xbar, v, mode)


# ---------------------------------------------------------------------------
# weight-matrix forwards with caches + exact backwards (training path)

def conv_fwd(x, wmat, geom: ConvGeom):
    cols = im2col(x, geom)
    y = cols @ wmat
    return y, (cols, x.shape)


def conv_bwd(dy, cache, wmat, geom: ConvGeom):
    cols, x_shape = cache
    dw = cols.reshape(-1, cols.shape[-1]).T @ dy.reshape(-1, dy.shape[-1])
    dcols = dy @ wmat.T
    dx = col2im(dcols, x_shape, geom)
    return dx, dw


def deconv_fwd(z, wmat, geom: DeconvGeom):
    xs = _stuff_pad(z, geom)
    y, (cols, xs_shape) = conv_fwd(xs, wmat, ConvGeom(geom.kh, geom.kw, 1))
    return y, (cols, xs_shape, z.shape)


def deconv_bwd(dy, cache, wmat, geom: DeconvGeom):
    cols, xs_shape, z_shape = cache
    dxs, dw = conv_bwd(dy, (cols, xs_shape), wmat, ConvGeom(geom.kh, geom.kw, 1))
    return _unstuff(dxs, z_shape, geom), dw


def dense_fwd(x, wmat):
    v = x.reshape(x.shape[0], -1)
    return v @ wmat, (v, x.shape)


def dense_bwd(dy, cache, wmat):
    v, x_shape = cache
    dw = v.T @ dy
    dx = (dy @ wmat.T).reshape(x_shape)
    return dx, dw


# ---------------------------------------------------------------------------
# activations, pooling, regularization

def relu_clip(x, v_dd: float = V_DD_DEFAULT):
    """Analog ReLU: clamps to [0, v_dd], never exceeding the supply rail."""
    if v_dd <= 0:
        raise ValueError("v_dd must be positive")
    return np.clip(x, 0.0, v_dd)


def relu_clip_bwd(dy, x, v_dd: float = V_DD_DEFAULT):
    return dy * ((x > 0) & (x < v_dd))


def tanh_act(x, v_scale: float):
    """Saturating output stage: v_scale * tanh(x / v_scale); unit slope at 0."""
    if v_scale <= 0:
        raise ValueError("v_scale must be positive")
    return v_scale * np.tanh(x / v_scale)


def tanh_act_bwd(dy, x, v_scale: float):
    t = np.tanh(x / v_scale)
    return dy * (1.0 - t * t)


def mean_pool(x, window: tuple[int, int]):
    """Average over non-overlapping windows (memristive averaging circuit)."""
    b, h, w, c = x.shape
    ph, pw = window
    if h % ph or w % pw:
        raise ValueError(f"window {window} does not divide input {h}x{w}")
    return x.reshape(b, h // ph, ph, w // pw, pw, c).mean(axis=(2, 4))


def mean_pool_bwd(dy, x_shape, window: tuple[int, int]):
    b, h, w, c = x_shape
    ph, pw = window
    up = np.repeat(np.repeat(dy, ph, axis=1), pw, axis=2)
    return up / (ph * pw)


def batch_norm(x, mean, var, eps: float = 1e-6):
    """Optional normalization stage; disabled by default to save chip area."""
    if np.any(np.asarray(var) < 0):
        raise ValueError("var must be >= 0")
    return (x - mean) / np.sqrt(var + eps)


def dropout_mask(shape, rate: float, rng: np.random.Generator) -> np.ndarray:
    """Bernoulli(1 - rate) keep mask, as floats. Training-mode only."""
    if not 0.0 <= rate < 1.0:
        raise ValueError("rate must be in [0, 1)")
    if rate == 0.0:
        return np.ones(shape)
    return (rng.random(shape) >= rate).astype(float)
