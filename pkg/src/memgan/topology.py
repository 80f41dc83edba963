"""Network topologies for the generator / discriminator pair.

Two stock configurations:

* ``reference_small`` — the desk-scale system used for training
  experiments: two 3x3 conv (deconv) layers with 2 filters plus a single
  dense layer in each network, on 28x28 images, latent dim 16.
* ``reference_full``  — the full-size accounting topology: 5x5 filters
  (128 and 64), dense layers, 28x28 images, latent dim 100.  It exists
  for weight-count and scheduling arithmetic; training it is out of
  scope at desk scale.

Conv layers use stride 1 with 'same' padding followed by 2x2 mean
pooling (stride-2 convolution replaced by the explicit pooling stage the
hardware provides). Deconv output size is (in-1)*stride + k - crop.

Dense layers wider than one image (28*28 = 784 columns) are physically
tiled into crossbars of at most 784 columns; tiling changes the
scheduling model's column count, not the math.
"""

from dataclasses import dataclass

from memgan.layers import ConvGeom, DeconvGeom

IMG_HW = 28
DENSE_TILE_COLS = IMG_HW * IMG_HW  # max crossbar width: one image worth


@dataclass(frozen=True)
class LayerDesc:
    """One stage of a network; crossbar-backed kinds carry rows/cols."""

    kind: str                      # conv | deconv | dense | meanpool | relu | tanh | reshape | sigmoid
    kernel: tuple[int, int] | None = None
    filters: int = 0
    stride: int = 1
    crop: int = 0
    in_shape: tuple = ()
    out_shape: tuple = ()
    rows: int = 0                  # crossbar rows (patch size / inputs)
    cols: int = 0                  # crossbar columns (filters / outputs)

    @property
    def is_crossbar(self) -> bool:
        return self.kind in ("conv", "deconv", "dense")

    @property
    def n_cells(self) -> int:
        return self.rows * self.cols

    @property
    def tile_cols(self) -> int:
        """Column count of the widest physical tile of this layer."""
        return min(self.cols, DENSE_TILE_COLS)


@dataclass(frozen=True)
class NetworkTopology:
    role: str                      # generator | discriminator
    layers: tuple[LayerDesc, ...]

    def __post_init__(self):
        for a, b in zip(self.layers, self.layers[1:]):
            if a.out_shape and b.in_shape and a.out_shape != b.in_shape:
                raise ValueError(
                    f"{self.role}: {a.kind} out {a.out_shape} != {b.kind} in {b.in_shape}")

    @property
    def crossbar_layers(self) -> tuple[LayerDesc, ...]:
        return tuple(l for l in self.layers if l.is_crossbar)

    @property
    def weight_count(self) -> int:
        return sum(l.n_cells for l in self.crossbar_layers)

    @property
    def max_tile_cols(self) -> int:
        return max(l.tile_cols for l in self.crossbar_layers)


def _generator(latent_dim: int, feat_hw: int, feat_ch: int,
               deconvs: list[tuple[int, int, int, int]]) -> NetworkTopology:
    """deconvs: list of (kernel, stride, crop, filters)."""
    dense_out = feat_hw * feat_hw * feat_ch
    layers = [
        LayerDesc("dense", in_shape=(latent_dim,), out_shape=(dense_out,),
                  rows=latent_dim, cols=dense_out),
        LayerDesc("relu", in_shape=(dense_out,), out_shape=(dense_out,)),
        LayerDesc("reshape", in_shape=(dense_out,),
                  out_shape=(feat_hw, feat_hw, feat_ch)),
    ]
    h, c = feat_hw, feat_ch
    for i, (k, s, crop, f) in enumerate(deconvs):
        geom = DeconvGeom(k, k, s, crop)
        oh, _ = geom.out_hw(h, h)
        layers.append(LayerDesc("deconv", kernel=(k, k), filters=f, stride=s,
                                crop=crop, in_shape=(h, h, c),
                                out_shape=(oh, oh, f),
                                rows=k * k * c, cols=f))
        last = i == len(deconvs) - 1
        layers.append(LayerDesc("tanh" if last else "relu",
                                in_shape=(oh, oh, f), out_shape=(oh, oh, f)))
        h, c = oh, f
    return NetworkTopology("generator", tuple(layers))


def _discriminator(img_hw: int, convs: list[tuple[int, int]]) -> NetworkTopology:
    """convs: list of (kernel, filters); each conv is same-padded then 2x2 pooled."""
    layers = []
    h, c = img_hw, 1
    for k, f in convs:
        layers.append(LayerDesc("conv", kernel=(k, k), filters=f, stride=1,
                                in_shape=(h, h, c), out_shape=(h, h, f),
                                rows=k * k * c, cols=f))
        layers.append(LayerDesc("relu", in_shape=(h, h, f), out_shape=(h, h, f)))
        layers.append(LayerDesc("meanpool", kernel=(2, 2),
                                in_shape=(h, h, f), out_shape=(h // 2, h // 2, f)))
        h, c = h // 2, f
    flat = h * h * c
    layers.append(LayerDesc("dense", in_shape=(h, h, c), out_shape=(1,),
                            rows=flat, cols=1))
    layers.append(LayerDesc("sigmoid", in_shape=(1,), out_shape=(1,)))
    return NetworkTopology("discriminator", tuple(layers))


def reference_small(latent_dim: int = 16) -> tuple[NetworkTopology, NetworkTopology]:
    """Desk-scale pair: small 3x3 conv/deconv stacks + one dense layer each.

    The discriminator gets 4 filters per stage: with only 2, a single
    bad update can kill every ReLU feature and stall the whole game.
    """
    gen = _generator(latent_dim, feat_hw=24, feat_ch=2,
                     deconvs=[(3, 1, 0, 2), (3, 1, 0, 1)])  # 24 -> 26 -> 28
    disc = _discriminator(IMG_HW, convs=[(3, 4), (3, 4)])
    return gen, disc


def reference_full(latent_dim: int = 100) -> tuple[NetworkTopology, NetworkTopology]:
    """Full-size accounting pair: 5x5 filters, 128 and 64, dense layers.

    Derived weight count: 1,254,400 + 204,800 + 3,200 (generator) plus
    3,200 + 204,800 + 3,136 (discriminator) = 1,673,536 cells, within
    1.6% of the 1.7 million the reference system reports.
    """
    gen = _generator(latent_dim, feat_hw=14, feat_ch=64,
                     deconvs=[(5, 1, 4, 128),   # 14 -> 14
                              (5, 2, 3, 1)])    # 14 -> 28
    disc = _discriminator(IMG_HW, convs=[(5, 128), (5, 64)])
    return gen, disc


# frozen once derived; regression-checked by the tests
REFERENCE_FULL_WEIGHT_COUNT = 1_673_536


def conv_geom(desc: LayerDesc) -> ConvGeom:
    if desc.kind != "conv":
        raise ValueError("not a conv layer")
    return ConvGeom.same(desc.kernel[0])


def deconv_geom(desc: LayerDesc) -> DeconvGeom:
    if desc.kind != "deconv":
        raise ValueError("not a deconv layer")
    return DeconvGeom(desc.kernel[0], desc.kernel[1], desc.stride, desc.crop)
