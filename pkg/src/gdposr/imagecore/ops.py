"""Synthetic degradation pipeline and Keys bicubic upsampling.

The degradation is a seeded four-stage simplification of a real-world
pipeline: Gaussian blur -> box downsample -> additive Gaussian noise ->
optional quantization, clamped at the end. Order and parameters are fixed
so identical (hr, cfg) pairs always produce bit-identical LR images.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .core import Image


@dataclass(frozen=True)
class DegradationConfig:
    blur_sigma: float = 0.8
    scale: int = 4
    noise_sigma: float = 0.01
    quant_levels: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.blur_sigma < 0 or self.noise_sigma < 0:
            raise ValueError("degradation sigmas must be >= 0")
        if self.scale < 1:
            raise ValueError("downscale factor must be >= 1")
        if self.quant_levels is not None and self.quant_levels < 2:
            raise ValueError("quantization needs at least 2 levels")


def box_downsample(pixels: np.ndarray, factor: int) -> np.ndarray:
    h, w, c = pixels.shape
    if h % factor or w % factor:
        raise ValueError(f"dimensions {h}x{w} not divisible by factor {factor}")
    return pixels.reshape(h // factor, factor, w // factor, factor, c).mean(axis=(1, 3))


def degrade(hr: Image, cfg: DegradationConfig) -> Image:
    px = hr.pixels
    if cfg.blur_sigma > 0:
        px = ndimage.gaussian_filter(px, sigma=(cfg.blur_sigma, cfg.blur_sigma, 0.0),
                                     mode="reflect")
    px = box_downsample(px, cfg.scale)
    if cfg.noise_sigma > 0:
        rng = np.random.default_rng(cfg.seed)
        px = px + rng.normal(0.0, cfg.noise_sigma, size=px.shape)
    if cfg.quant_levels is not None:
        q = cfg.quant_levels - 1
        px = np.round(np.clip(px, 0.0, 1.0) * q) / q
    return Image.clamped(px)


# Keys cubic convolution kernel, a = -0.5 (linear functions are reproduced
# exactly, which the ramp test relies on)
def _keys(t: np.ndarray) -> np.ndarray:
    at = np.abs(t)
    out = np.zeros_like(at)
    inner = at <= 1.0
    outer = (at > 1.0) & (at < 2.0)
    out[inner] = (1.5 * at - 2.5)[inner] * at[inner] ** 2 + 1.0
    out[outer] = ((-0.5 * at + 2.5) * at - 4.0)[outer] * at[outer] + 2.0
    return out


def _interp_matrix(n_in: int, factor: int) -> np.ndarray:
    """Dense (n_in*factor, n_in) row-stochastic bicubic interpolation matrix."""
    n_out = n_in * factor
    dst = np.arange(n_out)
    src = (dst + 0.5) / factor - 0.5
    base = np.floor(src).astype(int)
    mat = np.zeros((n_out, n_in))
    for tap in range(-1, 3):
        idx = np.clip(base + tap, 0, n_in - 1)  # replicate edges
        w = _keys(src - (base + tap))
        np.add.at(mat, (dst, idx), w)
    return mat


def bicubic_upsample(lr: Image, factor: int) -> Image:
    if factor < 1:
        raise ValueError("upsample factor must be >= 1")
    if factor == 1:
        return lr
    ay = _interp_matrix(lr.height, factor)
    ax = _interp_matrix(lr.width, factor)
    out = np.einsum("ij,jkc,lk->ilc", ay, lr.pixels, ax, optimize=True)
    return Image.clamped(out)
