"""Image representation, Netpbm I/O, degradation, metrics, region analysis."""

from .core import LUMA, Image, chw, hwc
from .metrics import (MetricScore, PSNR_CAP, gradient_richness,
                      laplacian_sharpness, mse, nr_proxy_scores, psnr, ssim)
from .netpbm import PnmParseError, load_image, save_image
from .ops import DegradationConfig, bicubic_upsample, box_downsample, degrade
from .regions import (DEFAULT_BINS, DEFAULT_GRID, DEFAULT_TAU, RegionMap,
                      partition_regions, patch_entropy, sobel_magnitude)

__all__ = [
    "Image", "LUMA", "chw", "hwc",
    "PnmParseError", "load_image", "save_image",
    "DegradationConfig", "degrade", "box_downsample", "bicubic_upsample",
    "MetricScore", "PSNR_CAP", "mse", "psnr", "ssim",
    "laplacian_sharpness", "gradient_richness", "nr_proxy_scores",
    "RegionMap", "sobel_magnitude", "patch_entropy", "partition_regions",
    "DEFAULT_TAU", "DEFAULT_GRID", "DEFAULT_BINS",
]
