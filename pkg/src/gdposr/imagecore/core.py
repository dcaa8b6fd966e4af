"""Image carrier type and grayscale conversion.

An Image is an (H, W, C) float64 raster in [0, 1], C in {1, 3}. Pixel arrays
are treated as immutable by convention; nothing in the package writes into a
constructed Image.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# fixed luminance weights so grayscale conversion is bit-exact across runs
LUMA = np.array([0.299, 0.587, 0.114])


@dataclass(frozen=True)
class Image:
    pixels: np.ndarray

    def __post_init__(self):
        px = self.pixels
        if not isinstance(px, np.ndarray) or px.ndim != 3:
            raise ValueError("Image expects an (H, W, C) array")
        if px.shape[2] not in (1, 3):
            raise ValueError(f"Image supports 1 or 3 channels, got {px.shape[2]}")
        if px.dtype != np.float64:
            object.__setattr__(self, "pixels", px.astype(np.float64))
            px = self.pixels
        if not np.all(np.isfinite(px)):
            raise ValueError("Image contains non-finite values")
        if px.min() < 0.0 or px.max() > 1.0:
            raise ValueError("Image values must lie in [0, 1]; use Image.clamped")

    @staticmethod
    def clamped(arr) -> "Image":
        """Clip to [0, 1] and wrap; the standard exit from any generation step."""
        return Image(np.clip(np.asarray(arr, dtype=np.float64), 0.0, 1.0))

    @property
    def height(self):
        return self.pixels.shape[0]

    @property
    def width(self):
        return self.pixels.shape[1]

    @property
    def channels(self):
        return self.pixels.shape[2]

    def gray(self) -> np.ndarray:
        """(H, W) luminance field."""
        if self.channels == 1:
            return self.pixels[:, :, 0]
        return self.pixels @ LUMA


def chw(img: Image) -> np.ndarray:
    """Channel-first view used by the denoiser."""
    return np.ascontiguousarray(img.pixels.transpose(2, 0, 1))


def hwc(arr: np.ndarray) -> np.ndarray:
    """Back from channel-first to (H, W, C)."""
    return np.ascontiguousarray(arr.transpose(1, 2, 0))
