"""Full-reference metrics (PSNR, SSIM) and no-reference proxy scores.

The two no-reference proxies are analytic stand-ins for learned perceptual
scorers: sharpness is the variance of the Laplacian response, richness the
mean patch gradient-entropy. Both are higher-is-better and deterministic;
externally computed scores can replace them through the harness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy import ndimage

from .core import Image
from .regions import DEFAULT_BINS, DEFAULT_GRID, patch_entropy, sobel_magnitude

PSNR_CAP = 99.0

LAPLACIAN = np.array([[0.0, 1.0, 0.0],
                      [1.0, -4.0, 1.0],
                      [0.0, 1.0, 0.0]])


@dataclass(frozen=True)
class MetricScore:
    metric_id: str
    value: float
    higher_is_better: bool

    def __post_init__(self):
        if not np.isfinite(self.value):
            raise ValueError(f"metric {self.metric_id} produced non-finite value")


def _check_same_shape(a: Image, b: Image, op: str):
    if a.pixels.shape != b.pixels.shape:
        raise ValueError(f"{op}: image shapes {a.pixels.shape} and "
                         f"{b.pixels.shape} differ")


def mse(a: Image, b: Image) -> float:
    _check_same_shape(a, b, "mse")
    d = a.pixels - b.pixels
    return float((d * d).mean())


def psnr(a: Image, b: Image) -> float:
    """10*log10(1/MSE) against peak 1.0, capped at 99 dB for near-zero MSE."""
    err = mse(a, b)
    if err < 1e-12:
        return PSNR_CAP
    return min(PSNR_CAP, float(10.0 * np.log10(1.0 / err)))


def _gaussian_window(size=11, sigma=1.5) -> np.ndarray:
    ax = np.arange(size) - (size - 1) / 2.0
    g = np.exp(-(ax * ax) / (2.0 * sigma * sigma))
    win = np.outer(g, g)
    return win / win.sum()


def ssim(a: Image, b: Image, window_size=11, sigma=1.5, k1=0.01, k2=0.03) -> float:
    """Windowed structural similarity with peak 1.0; mean over valid windows."""
    _check_same_shape(a, b, "ssim")
    if min(a.height, a.width) < window_size:
        raise ValueError(f"ssim: image min dimension {min(a.height, a.width)} "
                         f"< window {window_size}")
    win = _gaussian_window(window_size, sigma)
    c1, c2 = k1 * k1, k2 * k2
    values = []
    for ch in range(a.channels):
        x = a.pixels[:, :, ch]
        y = b.pixels[:, :, ch]
        wx = sliding_window_view(x, (window_size, window_size))
        wy = sliding_window_view(y, (window_size, window_size))
        mu_x = np.einsum("ijkl,kl->ij", wx, win)
        mu_y = np.einsum("ijkl,kl->ij", wy, win)
        xx = np.einsum("ijkl,kl->ij", wx * wx, win) - mu_x * mu_x
        yy = np.einsum("ijkl,kl->ij", wy * wy, win) - mu_y * mu_y
        xy = np.einsum("ijkl,kl->ij", wx * wy, win) - mu_x * mu_y
        num = (2.0 * mu_x * mu_y + c1) * (2.0 * xy + c2)
        den = (mu_x * mu_x + mu_y * mu_y + c1) * (xx + yy + c2)
        values.append(float((num / den).mean()))
    return float(np.mean(values))


def laplacian_sharpness(image: Image) -> float:
    """Variance of the Laplacian response on the luminance field."""
    resp = ndimage.correlate(image.gray(), LAPLACIAN, mode="nearest")
    return float(resp.var())


def gradient_richness(image: Image, grid=DEFAULT_GRID, bins=DEFAULT_BINS) -> float:
    """Mean patch gradient-entropy (bits) on the luminance field."""
    field = sobel_magnitude(image.gray())
    return float(patch_entropy(field, grid=grid, bins=bins).mean())


def nr_proxy_scores(image: Image, grid=DEFAULT_GRID, bins=DEFAULT_BINS):
    """The two built-in no-reference proxies, both higher-is-better."""
    return [
        MetricScore("sharpness", laplacian_sharpness(image), True),
        MetricScore("richness", gradient_richness(image, grid=grid, bins=bins), True),
    ]
