"""Adversarial training on crossbar-resident weights.

Training follows the analog-forward / ideal-backward split: the digital
error-propagation-and-weight-update unit keeps a full-precision copy of
every weight and computes exact backpropagation through the signed dot
products the crossbars hold; after each update the full-precision
weights are written back to the arrays, where quantization to the level
grid and programming variability apply. Forward passes (and therefore
the gradients) always see the written, nonideal conductances; the
loaded-readout and leakage effects additionally apply on the analog
evaluation path used when images are generated or scored.

Image voltages are encoded into the strictly positive band
[margin * v_scale, v_scale]: with zero-bias networks an all-zero input
is a fixed point of the whole game (every ReLU dead, zero gradient), so
both real images and generator outputs are kept away from it. The first
latent channel is pinned to 1 as a constant bias input.

One update event = one presented sample: every memristive weight is
rewritten once per image, so E epochs over N images cost exactly E*N
update events regardless of the batch size used for speed.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from memgan.crossbar import (CrossbarArray, ReadoutMode, inverse_map,
                             leakage_current, map_weights, read)
from memgan.device import DeviceSpec, VariabilityModel
from memgan.layers import (V_DD_DEFAULT, ConvGeom, DeconvGeom, conv_bwd,
                           conv_fwd, deconv_bwd, deconv_fwd, dense_bwd,
                           dense_fwd, mean_pool, mean_pool_bwd, relu_clip,
                           relu_clip_bwd, tanh_act, tanh_act_bwd)
from memgan.rng import substream
from memgan.topology import NetworkTopology, conv_geom, deconv_geom


class TrainingDiverged(RuntimeError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 5
    batch_size: int = 10
    learning_rate: float = 0.08
    latent_dim: int = 16
    quantize: bool = True
    sigma_pct: float = 0.0
    loaded_readout: bool = False
    leakage_noise: float = 0.0
    v_dd: float = V_DD_DEFAULT
    v_scale: float = V_DD_DEFAULT / 2
    margin: float = 0.1
    w_max: float = 1.0
    init_std: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be >= 0")


def sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def encode_voltage(x, config: TrainConfig):
    """Map a bipolar voltage in [-v_scale, v_scale] into the strictly
    positive discriminator input band [margin * v_scale, v_scale]."""
    lo = config.margin * config.v_scale
    return lo + (x + config.v_scale) * encode_gain(config)


def encode_gain(config: TrainConfig) -> float:
    """d(encode_voltage)/dx, the factor chained through the encoder."""
    return (1.0 - config.margin) / 2.0


def draw_latent(rng: np.random.Generator, n: int, latent_dim: int):
    """Latent batch with the first channel pinned to 1 as a bias input."""
    z = rng.normal(size=(n, latent_dim))
    z[:, 0] = 1.0
    return z


def bce_from_logits(logits, label: float) -> float:
    """Mean binary cross-entropy against a constant label, numerically safe."""
    z = logits.ravel()
    # log(1+e^z) - label*z in a stable form
    return float(np.mean(np.maximum(z, 0) - label * z + np.log1p(np.exp(-np.abs(z)))))


# ---------------------------------------------------------------------------
# network wrappers: ideal forward with caches, exact backward, analog forward

class GeneratorNet:
    """dense -> relu -> reshape -> deconv(+relu)* -> deconv -> tanh."""

    def __init__(self, topo: NetworkTopology, v_dd: float, v_scale: float):
        self.topo = topo
        self.v_dd = v_dd
        self.v_scale = v_scale
        xb = topo.crossbar_layers
        self.latent_dim = xb[0].rows
        self.feat_shape = topo.layers[2].out_shape  # after reshape
        self.deconvs = [(d, deconv_geom(d)) for d in xb[1:]]
        self.weight_shapes = [(l.rows, l.cols) for l in xb]

    def forward_train(self, z, weights):
        a0, c0 = dense_fwd(z, weights[0])
        h = relu_clip(a0, self.v_dd)
        x = h.reshape(z.shape[0], *self.feat_shape)
        caches = [("dense", c0, a0)]
        for i, (desc, geom) in enumerate(self.deconvs):
            a, c = deconv_fwd(x, weights[1 + i], geom)
            caches.append(("deconv", c, a))
            if i < len(self.deconvs) - 1:
                x = relu_clip(a, self.v_dd)
            else:
                x = tanh_act(a, self.v_scale)
        return x, caches

    def backward(self, dout, caches, weights):
        grads = [None] * len(weights)
        kind, c, a = caches[-1]
        d = tanh_act_bwd(dout, a, self.v_scale)
        for i in reversed(range(len(self.deconvs))):
            _, c, a = caches[1 + i]
            dx, dw = deconv_bwd(d, c, weights[1 + i], self.deconvs[i][1])
            grads[1 + i] = dw
            if i > 0:
                _, _, a_prev = caches[i]
                d = relu_clip_bwd(dx, a_prev, self.v_dd)
            else:
                d = dx
        _, c0, a0 = caches[0]
        d = d.reshape(d.shape[0], -1)
        d = relu_clip_bwd(d, a0, self.v_dd)
        _, grads[0] = dense_bwd(d, c0, weights[0])
        return grads

    def forward_analog(self, z, xbars, mode: ReadoutMode,
                       leak_noise: float = 0.0,
                       leak_rng: np.random.Generator | None = None):
        x = self._read(z, xbars[0], mode, leak_noise, leak_rng)
        x = relu_clip(x, self.v_dd).reshape(z.shape[0], *self.feat_shape)
        for i, (desc, geom) in enumerate(self.deconvs):
            from memgan.layers import deconv2d
            a = deconv2d(x, xbars[1 + i], geom, mode)
            a = self._leak(a, xbars[1 + i], mode, leak_noise, leak_rng)
            if i < len(self.deconvs) - 1:
                x = relu_clip(a, self.v_dd)
            else:
                x = tanh_act(a, self.v_scale)
        return x

    def _read(self, v, xbar, mode, leak_noise, leak_rng):
        out = read(xbar, v, mode)
        return self._leak(out, xbar, mode, leak_noise, leak_rng)

    @staticmethod
    def _leak(out, xbar, mode, leak_noise, leak_rng):
        if leak_noise > 0 and mode is ReadoutMode.LOADED:
            per_col, _ = leakage_current(xbar, leak_noise, leak_rng)
            out = out + per_col / (xbar.g_load + xbar.g_mag.sum(axis=0))
        return out


class DiscriminatorNet:
    """(conv -> relu -> meanpool)* -> dense; sigmoid applied by the caller."""

    POOL = (2, 2)

    def __init__(self, topo: NetworkTopology, v_dd: float):
        self.topo = topo
        self.v_dd = v_dd
        xb = topo.crossbar_layers
        self.convs = [(d, conv_geom(d)) for d in xb[:-1]]
        self.dense_desc = xb[-1]
        self.weight_shapes = [(l.rows, l.cols) for l in xb]

    def forward_train(self, img, weights):
        x = img
        caches = []
        for i, (desc, geom) in enumerate(self.convs):
            a, c = conv_fwd(x, weights[i], geom)
            h = relu_clip(a, self.v_dd)
            caches.append((c, a, h.shape))
            x = mean_pool(h, self.POOL)
        logit, cd = dense_fwd(x, weights[-1])
        return logit, (caches, cd)

    def backward(self, dlogit, cache, weights):
        caches, cd = cache
        grads = [None] * len(weights)
        d, grads[-1] = dense_bwd(dlogit, cd, weights[-1])
        for i in reversed(range(len(self.convs))):
            c, a, h_shape = caches[i]
            d = mean_pool_bwd(d, h_shape, self.POOL)
            d = relu_clip_bwd(d, a, self.v_dd)
            d, grads[i] = conv_bwd(d, c, weights[i], self.convs[i][1])
        return d, grads

    def forward_analog(self, img, xbars, mode: ReadoutMode):
        from memgan.layers import conv2d, dense
        x = img
        for i, (desc, geom) in enumerate(self.convs):
            x = mean_pool(relu_clip(conv2d(x, xbars[i], geom, mode), self.v_dd),
                          self.POOL)
        return dense(x, xbars[-1], mode)


# ---------------------------------------------------------------------------
# training state

@dataclass
class TrainState:
    gen_net: GeneratorNet
    disc_net: DiscriminatorNet
    gen_weights: list[np.ndarray]   # full-precision digital copies
    disc_weights: list[np.ndarray]
    gen_xbars: list[CrossbarArray]  # what the arrays actually hold
    disc_xbars: list[CrossbarArray]
    spec: DeviceSpec
    config: TrainConfig
    epoch: int = 0
    update_events: int = 0
    d_loss_history: list = field(default_factory=list)
    g_loss_history: list = field(default_factory=list)


def _program(weights, spec, config, var_rng):
    """Write full-precision weights into crossbars (quantize + variability)."""
    var = VariabilityModel(config.sigma_pct)
    return [map_weights(w, spec, quantized=config.quantize, variability=var,
                        rng=var_rng, w_max=config.w_max) for w in weights]


def init_state(gen_topo: NetworkTopology, disc_topo: NetworkTopology,
               spec: DeviceSpec, config: TrainConfig) -> TrainState:
    gen = GeneratorNet(gen_topo, config.v_dd, config.v_scale)
    disc = DiscriminatorNet(disc_topo, config.v_dd)
    rng = substream(config.seed, "weights")
    var_rng = substream(config.seed, "variability")
    wg = [rng.normal(0.0, config.init_std, size=s) for s in gen.weight_shapes]
    wd = [rng.normal(0.0, config.init_std, size=s) for s in disc.weight_shapes]
    return TrainState(gen, disc, wg, wd,
                      _program(wg, spec, config, var_rng),
                      _program(wd, spec, config, var_rng), spec, config)


def _apply_update(weights, grads, lr, spec, config, var_rng):
    """SGD step on the digital copies, then rewrite the arrays."""
    new = [np.clip(w - lr * g, -config.w_max, config.w_max)
           for w, g in zip(weights, grads)]
    return new, _program(new, spec, config, var_rng)


def train_step(real_batch: np.ndarray, state: TrainState, config: TrainConfig,
               noise_rng: np.random.Generator,
               var_rng: np.random.Generator) -> tuple[float, float]:
    """One adversarial step: update D on real+fake, then G through frozen D.

    Returns (d_loss, g_loss) and mutates ``state`` (new crossbars, update
    counter incremented by the batch size).
    """
    b = real_batch.shape[0]
    if b == 0:
        raise ValueError("empty batch")
    gen, disc = state.gen_net, state.disc_net
    gain = encode_gain(config)
    wg = [inverse_map(x) for x in state.gen_xbars]
    wd = [inverse_map(x) for x in state.disc_xbars]

    # -- discriminator phase
    z = draw_latent(noise_rng, b, gen.latent_dim)
    fake, _ = gen.forward_train(z, wg)
    logit_r, cache_r = disc.forward_train(real_batch, wd)
    logit_f, cache_f = disc.forward_train(encode_voltage(fake, config), wd)
    d_loss = bce_from_logits(logit_r, 1.0) + bce_from_logits(logit_f, 0.0)
    if not np.isfinite(d_loss):
        raise TrainingDiverged("training diverged")
    _, grads_r = disc.backward((sigmoid(logit_r) - 1.0) / b, cache_r, wd)
    _, grads_f = disc.backward(sigmoid(logit_f) / b, cache_f, wd)
    d_grads = [gr + gf for gr, gf in zip(grads_r, grads_f)]
    state.disc_weights, state.disc_xbars = _apply_update(
        state.disc_weights, d_grads, config.learning_rate, state.spec,
        config, var_rng)
    wd = [inverse_map(x) for x in state.disc_xbars]

    # -- generator phase (non-saturating loss through the frozen, updated D)
    z = draw_latent(noise_rng, b, gen.latent_dim)
    fake, g_cache = gen.forward_train(z, wg)
    logit_f, cache_f = disc.forward_train(encode_voltage(fake, config), wd)
    g_loss = bce_from_logits(logit_f, 1.0)
    if not np.isfinite(g_loss):
        raise TrainingDiverged("training diverged")
    dfake, _ = disc.backward((sigmoid(logit_f) - 1.0) / b, cache_f, wd)
    g_grads = gen.backward(dfake * gain, g_cache, wg)
    state.gen_weights, state.gen_xbars = _apply_update(
        state.gen_weights, g_grads, config.learning_rate, state.spec,
        config, var_rng)

    state.update_events += b
    state.d_loss_history.append(d_loss)
    state.g_loss_history.append(g_loss)
    return d_loss, g_loss


def train(images: np.ndarray, state: TrainState, config: TrainConfig,
          epochs: int | None = None, epoch_callback=None) -> TrainState:
    """Run adversarial training for the configured number of epochs.

    ``images`` are in [-1, 1]; they are scaled by v_scale and encoded
    into the positive discriminator voltage band.
    """
    noise_rng = substream(config.seed, "noise")
    shuffle_rng = substream(config.seed, "shuffle")
    var_rng = substream(config.seed, "variability")
    real = encode_voltage(images * config.v_scale, config)
    n = real.shape[0]
    for _ in range(epochs if epochs is not None else config.epochs):
        order = shuffle_rng.permutation(n)
        for start in range(0, n, config.batch_size):
            batch = real[order[start:start + config.batch_size]]
            train_step(batch, state, config, noise_rng, var_rng)
        state.epoch += 1
        if epoch_callback is not None:
            epoch_callback(state)
    return state


# ---------------------------------------------------------------------------
# spec surface: forward passes, sampling, quality metric

def _mode(config: TrainConfig) -> ReadoutMode:
    return ReadoutMode.LOADED if config.loaded_readout else ReadoutMode.IDEAL


def generator_forward(z: np.ndarray, state: TrainState,
                      mode: ReadoutMode | None = None) -> np.ndarray:
    """Latent batch -> image batch through the crossbar-resident generator."""
    if z.ndim == 1:
        z = z[None, :]
    if z.shape[1] != state.gen_net.latent_dim:
        raise ValueError("latent size mismatch")
    if mode is None:
        mode = _mode(state.config)
    leak_rng = substream(state.config.seed, "leakage")
    return state.gen_net.forward_analog(z, state.gen_xbars, mode,
                                        state.config.leakage_noise, leak_rng)


def discriminator_forward(img: np.ndarray, state: TrainState,
                          mode: ReadoutMode | None = None) -> np.ndarray:
    """Image batch (bipolar voltages) -> realness scores in (0, 1)."""
    if img.ndim == 3:
        img = img[None, ...]
    if mode is None:
        mode = _mode(state.config)
    enc = encode_voltage(img, state.config)
    logit = state.disc_net.forward_analog(enc, state.disc_xbars, mode)
    return sigmoid(logit).ravel()


def generate_samples(n: int, state: TrainState, seed: int,
                     mode: ReadoutMode | None = None) -> np.ndarray:
    """n images from fixed latent draws; bit-reproducible per seed."""
    if n == 0:
        return np.zeros((0, *state.gen_net.topo.layers[-1].out_shape))
    z = draw_latent(substream(seed, "noise"), n, state.gen_net.latent_dim)
    return generator_forward(z, state, mode)


def quality_metric(generated: np.ndarray, reference: np.ndarray,
                   eps: float = 1e-6) -> float:
    """Frechet distance between pixel-space Gaussian fits (lower = better)."""
    if len(generated) == 0 or len(reference) == 0:
        raise ValueError("both image sets must be nonempty")
    a = generated.reshape(len(generated), -1).astype(float)
    b = reference.reshape(len(reference), -1).astype(float)
    if a.shape[1] != b.shape[1]:
        raise ValueError("image shapes differ")
    mu_a, mu_b = a.mean(axis=0), b.mean(axis=0)
    cov_a = np.cov(a, rowvar=False) + eps * np.eye(a.shape[1])
    cov_b = np.cov(b, rowvar=False) + eps * np.eye(b.shape[1])
    covmean = scipy.linalg.sqrtm(cov_a @ cov_b)
    if np.iscomplexobj(covmean):
        covmean = covmean.real
    d2 = (np.sum((mu_a - mu_b) ** 2)
          + np.trace(cov_a) + np.trace(cov_b) - 2.0 * np.trace(covmean))
    return float(max(d2, 0.0))
