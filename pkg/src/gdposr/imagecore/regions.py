"""Texture-complexity analysis: Sobel magnitude, patch entropy, region split.

A grayscale image is partitioned into a coarse patch grid; each patch gets a
Shannon entropy computed from a fixed-bin histogram of its Sobel gradient
magnitudes, and patches below an entropy threshold are labeled smooth. The
pixel-count proportions rho_s / rho_d of the two region classes drive the
adaptive weighting between fidelity and perception rewards.

The entropy threshold and bin count are declared defaults (2.5 bits, 32 bins
over [0, field max]), configurable per call. Note the labeling is invariant
to affine rescaling of the image only when the histogram range rescales with
it; this is documented behavior, not asserted across different bin ranges.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .core import Image

DEFAULT_TAU = 2.5
DEFAULT_GRID = (10, 10)
DEFAULT_BINS = 32

SOBEL_X = np.array([[-1.0, 0.0, 1.0],
                    [-2.0, 0.0, 2.0],
                    [-1.0, 0.0, 1.0]])
SOBEL_Y = SOBEL_X.T


@dataclass(frozen=True)
class RegionMap:
    grid_rows: int
    grid_cols: int
    entropy: np.ndarray      # (grid_rows, grid_cols) bits
    smooth_mask: np.ndarray  # (grid_rows, grid_cols) bool
    rho_s: float
    rho_d: float
    tau: float

    def __post_init__(self):
        if self.rho_s + self.rho_d != 1.0:
            raise ValueError("rho_s + rho_d must equal 1 exactly")
        if not (0.0 <= self.rho_s <= 1.0):
            raise ValueError("rho_s out of range")


def sobel_magnitude(gray: np.ndarray) -> np.ndarray:
    """sqrt(Gx^2 + Gy^2) with the standard 3x3 pair; borders replicate edges."""
    if gray.ndim != 2:
        raise ValueError("sobel_magnitude expects a single-channel (H, W) field; "
                         "grayscale first")
    gx = ndimage.correlate(gray, SOBEL_X, mode="nearest")
    gy = ndimage.correlate(gray, SOBEL_Y, mode="nearest")
    return np.sqrt(gx * gx + gy * gy)


def _patch_slices(extent: int, parts: int):
    """Near-equal contiguous splits covering every index exactly once."""
    bounds = np.array_split(np.arange(extent), parts)
    for b in bounds:
        if b.size == 0:
            raise ValueError(f"empty patch: cannot split extent {extent} into {parts}")
    return [(b[0], b[-1] + 1) for b in bounds]


def patch_entropy(field: np.ndarray, grid=DEFAULT_GRID, bins=DEFAULT_BINS) -> np.ndarray:
    """Per-patch Shannon entropy (bits) of field values.

    One shared histogram range [0, field max] keeps patches comparable; a
    constant field therefore scores 0 bits everywhere.
    """
    rows, cols = grid
    top = float(field.max())
    out = np.zeros((rows, cols))
    row_sl = _patch_slices(field.shape[0], rows)
    col_sl = _patch_slices(field.shape[1], cols)
    for i, (r0, r1) in enumerate(row_sl):
        for j, (c0, c1) in enumerate(col_sl):
            patch = field[r0:r1, c0:c1]
            if top <= 0.0:
                continue
            counts, _ = np.histogram(patch, bins=bins, range=(0.0, top))
            p = counts[counts > 0] / patch.size
            out[i, j] = float(-(p * np.log2(p)).sum())
    return out


def partition_regions(image: Image, tau: float = DEFAULT_TAU,
                      grid=DEFAULT_GRID, bins=DEFAULT_BINS) -> RegionMap:
    """Label patches smooth (entropy < tau) or detailed; rho from pixel counts."""
    if tau < 0:
        raise ValueError("tau must be >= 0")
    field = sobel_magnitude(image.gray())
    entropy = patch_entropy(field, grid=grid, bins=bins)
    smooth = entropy < tau
    row_sl = _patch_slices(field.shape[0], grid[0])
    col_sl = _patch_slices(field.shape[1], grid[1])
    heights = np.array([r1 - r0 for r0, r1 in row_sl])
    widths = np.array([c1 - c0 for c0, c1 in col_sl])
    areas = np.outer(heights, widths)
    smooth_pixels = int(areas[smooth].sum())
    total = int(areas.sum())
    rho_s = smooth_pixels / total
    return RegionMap(grid_rows=grid[0], grid_cols=grid[1], entropy=entropy,
                     smooth_mask=smooth, rho_s=rho_s, rho_d=1.0 - rho_s, tau=tau)
