"""Binary checkpoints for training state.

Versioned little-endian container: magic ``MGCK``, u32 version, then a
sequence of sections. Each section is a 4-byte tag, u64 payload length,
payload, u32 CRC32 of the payload. Round-tripping restores bit-identical
conductance and sign matrices, the device spec, and the counters.
"""

import struct
import zlib
from pathlib import Path

import numpy as np

from memgan.crossbar import CrossbarArray
from memgan.device import DeviceSpec

MAGIC = b"MGCK"
VERSION = 1


class CheckpointError(RuntimeError):
    pass


class VersionMismatch(CheckpointError):
    pass


class ChecksumError(CheckpointError):
    pass


class SpecMismatch(CheckpointError):
    pass


def _section(tag: bytes, payload: bytes) -> bytes:
    return tag + struct.pack("<Q", len(payload)) + payload + \
        struct.pack("<I", zlib.crc32(payload))


def _pack_spec(spec: DeviceSpec) -> bytes:
    return struct.pack("<dddddI", spec.r_on, spec.r_off, spec.v_threshold,
                       spec.v_write, spec.t_write, spec.n_levels)


def _unpack_spec(payload: bytes) -> DeviceSpec:
    r_on, r_off, v_th, v_w, t_w, n_levels = struct.unpack("<dddddI", payload)
    return DeviceSpec(r_on, r_off, v_th, v_w, t_w, n_levels)


def _pack_xbar(net_id: int, idx: int, xbar: CrossbarArray) -> bytes:
    head = struct.pack("<BHIIdd", net_id, idx, xbar.rows, xbar.cols,
                       xbar.w_max, xbar.g_load)
    g = np.ascontiguousarray(xbar.g_mag, dtype="<f8").tobytes()
    s = np.ascontiguousarray(xbar.sign, dtype="i1").tobytes()
    return head + g + s


def _unpack_xbar(payload: bytes, spec: DeviceSpec):
    head_sz = struct.calcsize("<BHIIdd")
    net_id, idx, rows, cols, w_max, g_load = struct.unpack("<BHIIdd",
                                                           payload[:head_sz])
    n = rows * cols
    g = np.frombuffer(payload, dtype="<f8", count=n, offset=head_sz)
    s = np.frombuffer(payload, dtype="i1", count=n, offset=head_sz + 8 * n)
    xbar = CrossbarArray(g.reshape(rows, cols).astype(float),
                         s.reshape(rows, cols).astype(np.int64),
                         g_load, spec, w_max)
    return net_id, idx, xbar


def save_checkpoint(state, path) -> None:
    """Serialize a TrainState's physical contents."""
    blobs = [MAGIC, struct.pack("<I", VERSION),
             _section(b"SPEC", _pack_spec(state.spec)),
             _section(b"CNTR", struct.pack("<QQ", state.epoch,
                                           state.update_events))]
    for net_id, xbars in ((0, state.gen_xbars), (1, state.disc_xbars)):
        for idx, xbar in enumerate(xbars):
            blobs.append(_section(b"XBAR", _pack_xbar(net_id, idx, xbar)))
    Path(path).write_bytes(b"".join(blobs))


def read_checkpoint(path):
    """Parse a checkpoint into (spec, epoch, update_events, gen_xbars, disc_xbars)."""
    raw = Path(path).read_bytes()
    if raw[:4] != MAGIC:
        raise CheckpointError(f"not a checkpoint file: {path}")
    (version,) = struct.unpack("<I", raw[4:8])
    if version != VERSION:
        raise VersionMismatch(f"checkpoint version {version}, expected {VERSION}")
    off = 8
    spec = None
    epoch = events = 0
    nets: dict[int, dict[int, CrossbarArray]] = {0: {}, 1: {}}
    while off < len(raw):
        tag = raw[off:off + 4]
        (length,) = struct.unpack("<Q", raw[off + 4:off + 12])
        payload = raw[off + 12:off + 12 + length]
        (crc,) = struct.unpack("<I", raw[off + 12 + length:off + 16 + length])
        if zlib.crc32(payload) != crc:
            raise ChecksumError(f"checksum failure in section {tag!r}")
        off += 16 + length
        if tag == b"SPEC":
            spec = _unpack_spec(payload)
        elif tag == b"CNTR":
            epoch, events = struct.unpack("<QQ", payload)
        elif tag == b"XBAR":
            net_id, idx, xbar = _unpack_xbar(payload, spec)
            nets[net_id][idx] = xbar
        else:
            raise CheckpointError(f"unknown section {tag!r}")
    if spec is None:
        raise CheckpointError("checkpoint has no device spec section")
    gen = [nets[0][i] for i in sorted(nets[0])]
    disc = [nets[1][i] for i in sorted(nets[1])]
    return spec, epoch, events, gen, disc


def load_checkpoint(path, gen_topo, disc_topo, config, expected_spec=None):
    """Rebuild a TrainState; rejects checkpoints written under another spec.

    The digital full-precision weights are reconstructed from the stored
    conductances (i.e. re-read through the level grid), which is exact
    whenever the checkpoint was written at the same quantization.
    """
    from memgan.crossbar import inverse_map
    from memgan.gan import DiscriminatorNet, GeneratorNet, TrainState

    spec, epoch, events, gen_xbars, disc_xbars = read_checkpoint(path)
    if expected_spec is not None and spec != expected_spec:
        raise SpecMismatch(f"spec mismatch: checkpoint {spec} vs run {expected_spec}")
    gen_net = GeneratorNet(gen_topo, config.v_dd, config.v_scale)
    disc_net = DiscriminatorNet(disc_topo, config.v_dd)
    return TrainState(gen_net, disc_net,
                      [inverse_map(x) for x in gen_xbars],
                      [inverse_map(x) for x in disc_xbars],
                      gen_xbars, disc_xbars, spec, config,
                      epoch=epoch, update_events=events)
