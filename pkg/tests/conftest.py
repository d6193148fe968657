"""Shared fixtures: a frozen synthetic image corpus.

The corpus-level checks (quantizer comparisons, truncation sweeps, skip
energy, texture correlation) need 512x512 grayscale images spanning smooth
to textured content. This sandbox has no image downloads, so the corpus is
generated: each image mixes a smooth layer (steep spectral falloff plus a
period-8 stripe, so consecutive blocks repeat but still carry AC energy)
and a rough texture layer through a blob mask whose smooth-area fraction
rises with the image index. Seeds are fixed; every expected value in the
test suite was calibrated against exactly these twelve images.
"""

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from ajpeg.raster import RasterImage

settings.register_profile(
    "ci",
    derandomize=True,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")

SIZE = 512
CORPUS_SEEDS = [1000 + i for i in range(12)]


def spectral(rng, alpha, h=SIZE, w=SIZE):
    """Unit-variance noise field with power spectrum ~ 1/f^(2*alpha)."""
    F = np.fft.fft2(rng.normal(size=(h, w)))
    fy = np.fft.fftfreq(h)[:, None]
    fx = np.fft.fftfreq(w)[None, :]
    r = np.hypot(fy, fx)
    r[0, 0] = 1.0
    g = np.real(np.fft.ifft2(F / r**alpha))
    g -= g.mean()
    s = g.std()
    return g / (s if s > 0 else 1.0)


def blob_mask(rng, frac, sharp=14.0):
    field = spectral(rng, 2.5)
    thr = np.quantile(field, 1.0 - frac)
    return 1.0 / (1.0 + np.exp(-sharp * (field - thr)))


def synth_image(index, seed):
    rng = np.random.default_rng(seed)
    frac = 0.05 + 0.75 * index / 11.0          # smooth-area fraction
    alpha_t = 1.05 + 0.1 * (index % 4)          # texture roughness
    texture = spectral(rng, alpha_t) * 52 + 128
    # period-8 stripe: costs AC bits in every block but stays identical
    # across consecutive blocks, so it does not defeat the skip check
    x = np.arange(SIZE)[None, :]
    stripe = rng.uniform(9.0, 13.0) * np.cos(2 * np.pi * x / 8.0 + rng.uniform(0, 2 * np.pi))
    smooth = spectral(rng, 3.0) * 18 + rng.uniform(90, 170) + stripe
    m = blob_mask(rng, frac)
    img = m * smooth + (1 - m) * texture
    return RasterImage(np.clip(np.floor(img + 0.5), 0, 255).astype(np.uint8))


@pytest.fixture(scope="session")
def corpus():
    return [synth_image(i, s) for i, s in enumerate(CORPUS_SEEDS)]
