"""RGB <-> YCbCr conversion (BT.601 full range) and 4:2:0 chroma resampling.

Forward/inverse conversions round half-up and clamp to [0, 255]. Chroma
downsampling averages 2x2 cells (edges replicated for odd dimensions);
upsampling is nearest-neighbor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .raster import RasterImage


@dataclass(frozen=True)
class YcbcrPlanes:
    """Y/Cb/Cr planes; subsampling is "444" (full-res) or "420"."""

    y: np.ndarray
    cb: np.ndarray
    cr: np.ndarray
    subsampling: str

    def __post_init__(self):
        h, w = self.y.shape
        if self.subsampling == "444":
            want = (h, w)
        elif self.subsampling == "420":
            want = (-(-h // 2), -(-w // 2))
        else:
            raise ValueError("subsampling must be '444' or '420'")
        if self.cb.shape != want or self.cr.shape != want:
            raise ValueError("chroma plane dimensions inconsistent with subsampling")


def _round_half_up_clamp(x: np.ndarray) -> np.ndarray:
    return np.clip(np.floor(x + 0.5), 0, 255).astype(np.uint8)


def rgb_to_ycbcr(img: RasterImage) -> YcbcrPlanes:
    """Convert an RGB image to full-resolution YCbCr planes."""
    if img.channels != 3:
        raise ValueError("rgb_to_ycbcr expects an RGB image")
    rgb = img.pixels.astype(np.float64)
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    y = 0.299 * r + 0.587 * g + 0.114 * b
    cb = 128.0 - 0.168736 * r - 0.331264 * g + 0.5 * b
    cr = 128.0 + 0.5 * r - 0.418688 * g - 0.081312 * b
    return YcbcrPlanes(
        _round_half_up_clamp(y),
        _round_half_up_clamp(cb),
        _round_half_up_clamp(cr),
        "444",
    )


def ycbcr_to_rgb(planes: YcbcrPlanes) -> RasterImage:
    """Convert full-resolution YCbCr planes back to an RGB image."""
    if planes.subsampling != "444":
        raise ValueError("ycbcr_to_rgb expects full-resolution planes")
    y = planes.y.astype(np.float64)
    cb = planes.cb.astype(np.float64) - 128.0
    cr = planes.cr.astype(np.float64) - 128.0
    r = y + 1.402 * cr
    g = y - 0.344136 * cb - 0.714136 * cr
    b = y + 1.772 * cb
    return RasterImage(np.stack([_round_half_up_clamp(c) for c in (r, g, b)], axis=-1))


def downsample_420(plane: np.ndarray) -> np.ndarray:
    """Halve both plane dimensions by 2x2 means (half-up), replicating edges."""
    h, w = plane.shape
    padded = np.pad(plane, ((0, h % 2), (0, w % 2)), mode="edge").astype(np.int64)
    cells = padded.reshape(-(-h // 2), 2, -(-w // 2), 2)
    sums = cells.sum(axis=(1, 3))
    return ((sums + 2) // 4).astype(np.uint8)


def upsample_420(plane: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Nearest-neighbor 2x upsample, cropped to the requested dimensions."""
    up = plane.repeat(2, axis=0).repeat(2, axis=1)
    if up.shape[0] < out_h or up.shape[1] < out_w:
        raise ValueError("upsample target larger than 2x source")
    return up[:out_h, :out_w]
