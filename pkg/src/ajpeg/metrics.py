"""Image quality and texture metrics.

SAD is reported as a fraction of the reference's total sample sum. SSIM
uses uniform 8x8 windows at stride 1 with the usual (0.01*255)^2 and
(0.03*255)^2 stabilizers; color images are compared on the luma plane.
Homogeneity is the co-occurrence statistic sum(P/(1+|i-j|)) over a 64-bin
symmetric normalized GLCM averaged over the (0,1) and (1,0) offsets.
"""

from __future__ import annotations

import math

import numpy as np

from .color import rgb_to_ycbcr
from .raster import RasterImage

SSIM_C1 = (0.01 * 255.0) ** 2
SSIM_C2 = (0.03 * 255.0) ** 2
SSIM_WINDOW = 8
GLCM_BINS = 64


class MetricError(ValueError):
    """Metric undefined for the given inputs."""


def _luma(img: RasterImage) -> np.ndarray:
    if img.channels == 1:
        return img.pixels
    return rgb_to_ycbcr(img).y


def _check_same_shape(ref: RasterImage, test: RasterImage):
    if ref.pixels.shape != test.pixels.shape:
        raise MetricError("images must have identical dimensions and channels")


def sad_pct(ref: RasterImage, test: RasterImage) -> float:
    """Sum of absolute differences over the reference's total sample sum."""
    _check_same_shape(ref, test)
    a = ref.samples.astype(np.int64)
    b = test.samples.astype(np.int64)
    denom = int(a.sum())
    if denom == 0:
        raise MetricError("SAD undefined for an all-zero reference")
    return float(np.abs(a - b).sum()) / denom


def psnr(ref: RasterImage, test: RasterImage) -> float:
    """Peak signal-to-noise ratio in dB; inf for identical images."""
    _check_same_shape(ref, test)
    diff = ref.samples.astype(np.float64) - test.samples.astype(np.float64)
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(255.0**2 / mse)


def _window_means(plane: np.ndarray, w: int) -> np.ndarray:
    # Box means over all w*w windows at stride 1, via the summed-area table.
    s = np.zeros((plane.shape[0] + 1, plane.shape[1] + 1), dtype=np.float64)
    np.cumsum(np.cumsum(plane, axis=0), axis=1, out=s[1:, 1:])
    box = s[w:, w:] - s[:-w, w:] - s[w:, :-w] + s[:-w, :-w]
    return box / (w * w)


def ssim(ref: RasterImage, test: RasterImage) -> float:
    """Mean structural similarity over uniform 8x8 windows."""
    _check_same_shape(ref, test)
    x = _luma(ref).astype(np.float64)
    y = _luma(test).astype(np.float64)
    w = SSIM_WINDOW
    if x.shape[0] < w or x.shape[1] < w:
        raise MetricError("image smaller than the SSIM window")
    mx = _window_means(x, w)
    my = _window_means(y, w)
    # Population second moments per window.
    vx = _window_means(x * x, w) - mx * mx
    vy = _window_means(y * y, w) - my * my
    cxy = _window_means(x * y, w) - mx * my
    num = (2.0 * mx * my + SSIM_C1) * (2.0 * cxy + SSIM_C2)
    den = (mx * mx + my * my + SSIM_C1) * (vx + vy + SSIM_C2)
    return float(np.mean(num / den))


def homogeneity(img: RasterImage) -> float:
    """GLCM homogeneity of the (luma) plane, 64 gray bins."""
    g = _luma(img)
    if g.shape[0] < 2 or g.shape[1] < 2:
        raise MetricError("homogeneity undefined below 2x2")
    bins = (g >> 2).astype(np.int64)
    glcms = []
    for a, b in (
        (bins[:, :-1], bins[:, 1:]),  # offset (0, 1)
        (bins[:-1, :], bins[1:, :]),  # offset (1, 0)
    ):
        counts = np.bincount(
            (a * GLCM_BINS + b).reshape(-1), minlength=GLCM_BINS * GLCM_BINS
        ).reshape(GLCM_BINS, GLCM_BINS)
        sym = counts + counts.T
        glcms.append(sym / sym.sum())
    p = (glcms[0] + glcms[1]) / 2.0
    i, j = np.meshgrid(np.arange(GLCM_BINS), np.arange(GLCM_BINS), indexing="ij")
    return float((p / (1.0 + np.abs(i - j))).sum())


def pearson(xs, ys) -> float:
    """Pearson correlation; raises MetricError on degenerate inputs."""
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise MetricError("inputs must be equal-length 1-D sequences")
    if x.size < 2:
        raise MetricError("correlation needs at least two points")
    dx = x - x.mean()
    dy = y - y.mean()
    sx = math.sqrt(float(np.dot(dx, dx)))
    sy = math.sqrt(float(np.dot(dy, dy)))
    if sx == 0.0 or sy == 0.0:
        raise MetricError("correlation undefined for zero-variance input")
    return float(np.dot(dx, dy)) / (sx * sy)
