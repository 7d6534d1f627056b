"""sRGB to CIE lightness conversion.

Only the L* channel is kept: sRGB is decoded to linear light, relative
luminance Y is taken against the D65 white point, and CIE L* in [0, 100]
is rescaled onto the full 8-bit range so downstream 256-bin histograms
see the whole gamut.
"""

import numpy as np

from .rasters import GrayImage

__all__ = ["to_lightness"]

# f(t) switches from cube root to the linear segment at (6/29)^3.
_T0 = (6.0 / 29.0) ** 3
_LINEAR_SCALE = 1.0 / (3.0 * (6.0 / 29.0) ** 2)


def _srgb_decode_table():
    c = np.arange(256, dtype=np.float64) / 255.0
    return np.where(c <= 0.04045, c / 12.92, ((c + 0.055) / 1.055) ** 2.4)


_DECODE = _srgb_decode_table()


def to_lightness(rgb):
    """Convert an ``(H, W, 3)`` 8-bit sRGB raster to its lightness image.

    Per pixel: decode sRGB to linear RGB, take the D65 relative luminance
    Y = 0.2126 R + 0.7152 G + 0.0722 B, map to CIE L* and rescale
    round(L* * 255 / 100).  Chrominance is discarded.
    """
    arr = np.asarray(rgb)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"expected (H, W, 3) RGB array, got shape {arr.shape}")
    if arr.dtype != np.uint8:
        raise ValueError(f"expected 8-bit RGB, got dtype {arr.dtype}")
    lin = _DECODE[arr]
    y = 0.2126 * lin[..., 0] + 0.7152 * lin[..., 1] + 0.0722 * lin[..., 2]
    fy = np.where(y > _T0, np.cbrt(y), y * _LINEAR_SCALE + 4.0 / 29.0)
    lightness = 116.0 * fy - 16.0
    scaled = np.floor(lightness * (255.0 / 100.0) + 0.5)
    return GrayImage(np.clip(scaled, 0, 255).astype(np.int64))
