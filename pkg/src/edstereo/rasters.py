"""Raster containers shared by every stage of the pipeline.

All rasters wrap a 2-D numpy array in row-major order with the origin at
the top-left pixel, so ``array[y, x]`` addresses column ``x`` of row ``y``.
Instances are immutable after construction (the wrapped array is marked
read-only) and safe to share across worker threads.
"""

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GrayImage",
    "DisparityMap",
    "RealMap",
    "ReliabilityMask",
    "RegionMask",
    "coverage_fraction",
]


def _freeze(arr):
    arr.flags.writeable = False
    return arr


def _check_2d(arr, what):
    if arr.ndim != 2:
        raise ValueError(f"{what} must be 2-D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{what} must have positive dimensions, got {arr.shape}")


@dataclass(frozen=True)
class GrayImage:
    """8-bit single-channel raster: the lightness image or a quantized depth map."""

    pixels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pixels)
        _check_2d(arr, "pixels")
        if not np.issubdtype(arr.dtype, np.integer):
            raise ValueError(f"pixels must be integer-valued, got dtype {arr.dtype}")
        if arr.size and (arr.min() < 0 or arr.max() > 255):
            raise ValueError("pixel values must lie in [0, 255]")
        object.__setattr__(self, "pixels", _freeze(arr.astype(np.uint8, copy=True)))

    @property
    def width(self):
        return self.pixels.shape[1]

    @property
    def height(self):
        return self.pixels.shape[0]


@dataclass(frozen=True)
class DisparityMap:
    """Per-pixel integer disparity plus the search range it was computed over."""

    disparities: np.ndarray
    max_disparity: int

    def __post_init__(self):
        arr = np.asarray(self.disparities)
        _check_2d(arr, "disparities")
        if not np.issubdtype(arr.dtype, np.integer):
            raise ValueError(f"disparities must be integers, got dtype {arr.dtype}")
        if self.max_disparity < 1:
            raise ValueError("max_disparity must be >= 1")
        if arr.min() < 0 or arr.max() > self.max_disparity - 1:
            raise ValueError(
                f"disparities must lie in [0, {self.max_disparity - 1}]"
            )
        object.__setattr__(self, "disparities", _freeze(arr.astype(np.int32, copy=True)))

    @property
    def width(self):
        return self.disparities.shape[1]

    @property
    def height(self):
        return self.disparities.shape[0]


@dataclass(frozen=True)
class RealMap:
    """Per-pixel finite real values (entropies in bits, or their difference)."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        _check_2d(arr, "values")
        if not np.all(np.isfinite(arr)):
            raise ValueError("values must be finite (no NaN or infinity)")
        object.__setattr__(self, "values", _freeze(arr.copy()))

    @property
    def width(self):
        return self.values.shape[1]

    @property
    def height(self):
        return self.values.shape[0]


@dataclass(frozen=True)
class ReliabilityMask:
    """Binary per-pixel classification; True flags a reliable disparity estimate."""

    flags: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.flags)
        _check_2d(arr, "flags")
        if arr.dtype != np.bool_:
            if not np.issubdtype(arr.dtype, np.integer):
                raise ValueError(f"flags must be boolean, got dtype {arr.dtype}")
            if arr.size and (arr.min() < 0 or arr.max() > 1):
                raise ValueError("integer flags must be 0 or 1")
        object.__setattr__(self, "flags", _freeze(arr.astype(bool, copy=True)))

    @property
    def width(self):
        return self.flags.shape[1]

    @property
    def height(self):
        return self.flags.shape[0]


@dataclass(frozen=True)
class RegionMask:
    """Evaluation region membership; True marks a pixel inside the region."""

    membership: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.membership)
        _check_2d(arr, "membership")
        if arr.dtype != np.bool_:
            if not np.issubdtype(arr.dtype, np.integer):
                raise ValueError(f"membership must be boolean, got dtype {arr.dtype}")
            if arr.size and (arr.min() < 0 or arr.max() > 1):
                raise ValueError("integer membership must be 0 or 1")
        object.__setattr__(self, "membership", _freeze(arr.astype(bool, copy=True)))

    @property
    def width(self):
        return self.membership.shape[1]

    @property
    def height(self):
        return self.membership.shape[0]

    def intersect(self, other):
        """Pixels belonging to both regions."""
        if other.membership.shape != self.membership.shape:
            raise ValueError("region dimensions differ")
        return RegionMask(self.membership & other.membership)


def coverage_fraction(mask):
    """Percentage of pixels inside the region.

    Invariant under any permutation of pixel positions; a full mask
    yields exactly 100.0.
    """
    m = mask.membership
    return 100.0 * float(np.count_nonzero(m)) / float(m.size)
