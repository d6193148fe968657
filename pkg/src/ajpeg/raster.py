"""Raster images, binary PNM parsing/writing, and 8x8 block tiling.

Only binary P5 (grayscale) and P6 (RGB) with maxval 255 are supported.
Block tiling pads non-multiple-of-8 dimensions by edge replication and
optionally level-shifts samples by -128 into signed range.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

BLOCK = 8


class PnmError(ValueError):
    """Malformed or unsupported PNM input."""


@dataclass(frozen=True, eq=False)
class RasterImage:
    """Raster image; pixels has shape (h, w) for gray or (h, w, 3) for RGB."""

    pixels: np.ndarray

    def __post_init__(self):
        p = self.pixels
        if p.dtype != np.uint8:
            raise ValueError("pixels must be uint8")
        if p.ndim == 3 and p.shape[2] != 3:
            raise ValueError("color images must have 3 channels")
        if p.ndim not in (2, 3):
            raise ValueError("pixels must be 2-D (gray) or 3-D (RGB)")
        if p.shape[0] < 1 or p.shape[1] < 1:
            raise ValueError("image dimensions must be at least 1x1")

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def channels(self) -> int:
        return 1 if self.pixels.ndim == 2 else 3

    @property
    def samples(self) -> np.ndarray:
        """Row-major sample stream, interleaved for RGB."""
        return self.pixels.reshape(-1)

    def __eq__(self, other):
        if not isinstance(other, RasterImage):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and np.array_equal(
            self.pixels, other.pixels
        )


@dataclass(frozen=True)
class BlockGrid:
    """Image plane tiled into 8x8 blocks, row-major block order."""

    blocks: np.ndarray  # shape (blocks_high * blocks_wide, 8, 8), int32
    blocks_wide: int
    blocks_high: int
    orig_width: int
    orig_height: int

    def __post_init__(self):
        if self.blocks.shape != (self.blocks_wide * self.blocks_high, BLOCK, BLOCK):
            raise ValueError("block array shape does not match grid dimensions")
        if self.blocks_wide != -(-self.orig_width // BLOCK):
            raise ValueError("blocks_wide inconsistent with orig_width")
        if self.blocks_high != -(-self.orig_height // BLOCK):
            raise ValueError("blocks_high inconsistent with orig_height")


def parse_pnm(data: bytes) -> RasterImage:
    """Parse a binary P5/P6 image with maxval 255."""
    if not data.startswith((b"P5", b"P6")):
        raise PnmError("magic: expected P5 or P6")
    color = data.startswith(b"P6")
    pos = 2
    fields = []
    for name in ("width", "height", "maxval"):
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        token = data[start:pos]
        if not token.isdigit():
            raise PnmError(f"{name}: expected unsigned integer")
        fields.append(int(token))
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise PnmError("width/height: must be positive")
    if maxval != 255:
        raise PnmError("maxval: only 255 is supported")
    # Exactly one whitespace byte separates the header from the body.
    if pos >= len(data) or not data[pos : pos + 1].isspace():
        raise PnmError("header: missing separator before body")
    pos += 1
    nsamples = width * height * (3 if color else 1)
    body = data[pos : pos + nsamples]
    if len(body) < nsamples:
        raise PnmError("body: truncated sample data")
    pixels = np.frombuffer(body, dtype=np.uint8)
    shape = (height, width, 3) if color else (height, width)
    return RasterImage(pixels.reshape(shape).copy())


def write_pnm(img: RasterImage) -> bytes:
    magic = b"P6" if img.channels == 3 else b"P5"
    header = magic + b"\n%d %d\n255\n" % (img.width, img.height)
    return header + img.pixels.tobytes()


def tile_blocks(plane: np.ndarray, level_shifted: bool) -> BlockGrid:
    """Tile a grayscale plane into 8x8 blocks, padding edges by replication."""
    if plane.ndim != 2:
        raise ValueError("tile_blocks expects a single-channel plane")
    h, w = plane.shape
    if h < 1 or w < 1:
        raise ValueError("cannot tile a zero-dimension plane")
    bw = -(-w // BLOCK)
    bh = -(-h // BLOCK)
    padded = np.pad(
        plane.astype(np.int32),
        ((0, bh * BLOCK - h), (0, bw * BLOCK - w)),
        mode="edge",
    )
    if level_shifted:
        padded -= 128
    blocks = (
        padded.reshape(bh, BLOCK, bw, BLOCK)
        .swapaxes(1, 2)
        .reshape(bh * bw, BLOCK, BLOCK)
    )
    return BlockGrid(blocks, bw, bh, w, h)


def untile_blocks(grid: BlockGrid, level_shifted: bool) -> np.ndarray:
    """Reassemble a plane from a block grid, cropping padding.

    Level-shifted grids are shifted back by +128; output is clamped to
    [0, 255] uint8 either way.
    """
    bh, bw = grid.blocks_high, grid.blocks_wide
    plane = (
        grid.blocks.reshape(bh, bw, BLOCK, BLOCK)
        .swapaxes(1, 2)
        .reshape(bh * BLOCK, bw * BLOCK)
    )
    plane = plane[: grid.orig_height, : grid.orig_width]
    if level_shifted:
        plane = plane + 128
    return np.clip(plane, 0, 255).astype(np.uint8)
