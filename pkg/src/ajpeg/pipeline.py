"""End-to-end encode/decode pipeline.

Encode: level-shift and tile each channel, decide block skips against the
most recent processed block, truncate, transform with the shift-add DCT,
quantize (shift or division mode), entropy-code, and emit an AJPG
container. Color images are converted to YCbCr with 4:2:0 chroma.

Decode: entropy-decode, dequantize with either the encoder's divisors
("matched") or the unmodified quality-scaled table ("standard"), invert
with the float reference IDCT, round, undo truncation by rescaling, then
reassemble planes and convert back to RGB.

reconstruct() runs the identical numeric path without the entropy layer,
which is lossless; decode(encode(img)) equals reconstruct(img) bit for
bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import entropy
from .color import downsample_420, rgb_to_ycbcr, upsample_420, ycbcr_to_rgb, YcbcrPlanes
from .energy import EnergyStats
from .fdct import fdct_2d, ref_idct_2d
from .knobs import skip_check, skip_epsilon, truncate_block
from .ops import UNCOUNTED, IntOps
from .quant import (
    build_qmatrix,
    dequantize,
    quantize_dc_exact,
    quantize_div,
    quantize_shift,
    to_shift_matrix,
)
from .raster import BlockGrid, RasterImage, tile_blocks, untile_blocks


@dataclass(frozen=True)
class EncodeConfig:
    quality: int = 50
    quant_mode: str = "shift"  # "shift" or "div"
    trunc_level: int = 0
    skip_level: int | None = None  # None disables perforation
    dc_exact: bool = False
    qmatrix: np.ndarray | None = None  # overrides the quality-scaled table

    def __post_init__(self):
        if not 1 <= self.quality <= 99:
            raise ValueError("quality must be in [1, 99]")
        if self.quant_mode not in ("shift", "div"):
            raise ValueError("quant_mode must be 'shift' or 'div'")
        if not 0 <= self.trunc_level <= 4:
            raise ValueError("trunc_level must be in [0, 4]")
        if self.skip_level is not None and not 0 <= self.skip_level <= 6:
            raise ValueError("skip_level must be in [0, 6] or None")
        if self.dc_exact and self.quant_mode != "shift":
            raise ValueError("exact-DC mode applies to shift quantization only")
        if self.dc_exact and self.qmatrix is not None:
            raise ValueError("exact-DC mode requires the quality-scaled table")
        if self.qmatrix is not None:
            q = np.asarray(self.qmatrix, dtype=np.int64)
            if q.shape != (8, 8) or np.any(q < 1) or np.any(q > 255):
                raise ValueError("qmatrix must be 8x8 with entries in [1, 255]")

    def divisor_matrix(self) -> np.ndarray:
        if self.qmatrix is not None:
            return np.asarray(self.qmatrix, dtype=np.int64)
        return build_qmatrix(self.quality)


def _decide_skips(blocks: np.ndarray, epsilon: int, ops: IntOps) -> np.ndarray:
    """Skip flags per Algorithm: compare pixels against the latest block
    that will actually be processed. Block 0 always processes."""
    n = len(blocks)
    skipped = np.zeros(n, dtype=bool)
    ref = 0
    for k in range(1, n):
        if skip_check(blocks[k], blocks[ref], epsilon, ops):
            skipped[k] = True
        else:
            ref = k
    return skipped


def _compress_blocks(blocks: np.ndarray, cfg: EncodeConfig, smat, qmat, ops: IntOps) -> np.ndarray:
    """Truncate, transform, quantize a batch of level-shifted pixel blocks."""
    t = truncate_block(blocks, cfg.trunc_level, ops)
    coeffs = fdct_2d(t, ops)
    if cfg.quant_mode == "shift":
        quantized = quantize_shift(coeffs, smat, ops)
        if cfg.dc_exact:
            quantized = quantized.copy()
            quantized[..., 0, 0] = quantize_dc_exact(
                coeffs[..., 0, 0], int(qmat[0, 0]), ops
            )
        return quantized
    return quantize_div(coeffs, qmat)


def _encode_plane(
    plane: np.ndarray, cfg: EncodeConfig, smat, qmat, ops: IntOps
) -> tuple[np.ndarray, np.ndarray]:
    """Returns (quantized blocks, skip flags) for one channel plane."""
    grid = tile_blocks(plane, level_shifted=True)
    blocks = grid.blocks.astype(np.int64)
    if cfg.skip_level is None:
        skipped = np.zeros(len(blocks), dtype=bool)
    else:
        skipped = _decide_skips(blocks, skip_epsilon(cfg.skip_level), ops)

    quantized = np.zeros((len(blocks), 8, 8), dtype=np.int64)
    todo = ~skipped
    if todo.any():
        quantized[todo] = _compress_blocks(blocks[todo], cfg, smat, qmat, ops)
    # Skipped blocks reuse the result of their reference (the most recent
    # processed block), which the entropy layer encodes by replication.
    last = 0
    for k in range(1, len(blocks)):
        if skipped[k]:
            quantized[k] = quantized[last]
        else:
            last = k
    return quantized, skipped


def _planes_of(img: RasterImage) -> list[np.ndarray]:
    if img.channels == 1:
        return [img.pixels]
    full = rgb_to_ycbcr(img)
    return [full.y, downsample_420(full.cb), downsample_420(full.cr)]


def _encode_channels(img: RasterImage, cfg: EncodeConfig, ops: IntOps):
    qmat = cfg.divisor_matrix()
    smat = to_shift_matrix(qmat) if cfg.quant_mode == "shift" else None
    channels = []
    processed = skipped_total = 0
    for cid, plane in enumerate(_planes_of(img)):
        quantized, skipped = _encode_plane(plane, cfg, smat, qmat, ops)
        channels.append((cid, plane.shape, quantized, skipped))
        skipped_total += int(skipped.sum())
        processed += int((~skipped).sum())
    stats = EnergyStats(
        blocks_processed=processed,
        blocks_skipped=skipped_total,
        trunc_level=cfg.trunc_level,
        skip_enabled=cfg.skip_level is not None,
    )
    return channels, qmat, smat, stats


def encode(
    img: RasterImage, cfg: EncodeConfig = EncodeConfig(), ops: IntOps = UNCOUNTED
) -> tuple[bytes, EnergyStats]:
    """Encode an image to an AJPG container."""
    if img.width > 0xFFFF or img.height > 0xFFFF:
        raise ValueError("image dimensions exceed the container limit")
    channels, qmat, smat, stats = _encode_channels(img, cfg, ops)
    quant_payload = (smat if cfg.quant_mode == "shift" else qmat).reshape(64)
    meta = entropy.ContainerMeta(
        color=img.channels == 3,
        shift_quant=cfg.quant_mode == "shift",
        dc_exact=cfg.dc_exact,
        quality=cfg.quality,
        trunc_level=cfg.trunc_level,
        skip_level=cfg.skip_level,
        width=img.width,
        height=img.height,
        quant_payload=quant_payload,
    )
    streams = [
        entropy.encode_channel(quantized, skipped, cid)
        for cid, _, quantized, skipped in channels
    ]
    return entropy.write_container(meta, streams), stats


def _decode_divisors(
    shift_quant: bool, dc_exact: bool, quality: int, quant_payload: np.ndarray,
    decode_matrix: str,
) -> np.ndarray:
    if decode_matrix not in ("matched", "standard"):
        raise ValueError("decode_matrix must be 'matched' or 'standard'")
    if decode_matrix == "standard":
        return build_qmatrix(quality)
    payload = np.asarray(quant_payload, dtype=np.int64).reshape(8, 8)
    if not shift_quant:
        return payload
    if np.any(payload > 7):
        raise entropy.CorruptStreamError("shift exponent out of range")
    divisors = np.int64(1) << payload
    if dc_exact:
        divisors = divisors.copy()
        divisors[0, 0] = build_qmatrix(quality)[0, 0]
    return divisors


def _decode_plane(
    quantized: np.ndarray, shape: tuple[int, int], divisors: np.ndarray, trunc_level: int
) -> np.ndarray:
    coeffs = dequantize(quantized, divisors)
    pixels = ref_idct_2d(coeffs)
    rounded = np.sign(pixels) * np.floor(np.abs(pixels) + 0.5)  # half away from zero
    restored = rounded.astype(np.int64) << trunc_level
    h, w = shape
    grid = BlockGrid(restored, -(-w // 8), -(-h // 8), w, h)
    return untile_blocks(grid, level_shifted=True)


def decode(data: bytes, decode_matrix: str = "matched") -> RasterImage:
    """Decode an AJPG container."""
    meta, streams = entropy.read_container(data)
    divisors = _decode_divisors(
        meta.shift_quant, meta.dc_exact, meta.quality, meta.quant_payload, decode_matrix
    )
    if meta.color:
        cw, ch = -(-meta.width // 2), -(-meta.height // 2)
        shapes = [(meta.height, meta.width), (ch, cw), (ch, cw)]
    else:
        shapes = [(meta.height, meta.width)]
    planes = [
        _decode_plane(entropy.decode_channel(s), shape, divisors, meta.trunc_level)
        for s, shape in zip(streams, shapes)
    ]
    if not meta.color:
        return RasterImage(planes[0])
    y, cb, cr = planes
    full = YcbcrPlanes(
        y,
        upsample_420(cb, meta.height, meta.width),
        upsample_420(cr, meta.height, meta.width),
        "444",
    )
    return ycbcr_to_rgb(full)


def reconstruct(
    img: RasterImage,
    cfg: EncodeConfig = EncodeConfig(),
    decode_matrix: str = "matched",
    ops: IntOps = UNCOUNTED,
) -> tuple[RasterImage, EnergyStats]:
    """Encode + decode without the (lossless) entropy layer."""
    channels, qmat, smat, stats = _encode_channels(img, cfg, ops)
    quant_payload = (smat if cfg.quant_mode == "shift" else qmat).reshape(64)
    divisors = _decode_divisors(
        cfg.quant_mode == "shift", cfg.dc_exact, cfg.quality, quant_payload, decode_matrix
    )
    planes = [
        _decode_plane(quantized, shape, divisors, cfg.trunc_level)
        for _, shape, quantized, _s in channels
    ]
    if img.channels == 1:
        return RasterImage(planes[0]), stats
    y, cb, cr = planes
    full = YcbcrPlanes(
        y,
        upsample_420(cb, img.height, img.width),
        upsample_420(cr, img.height, img.width),
        "444",
    )
    return ycbcr_to_rgb(full), stats
