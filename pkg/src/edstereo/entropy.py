"""Per-pixel local Shannon entropy and the entropy-difference confidence map.

Entropy at a pixel is computed from the 256-bin gray-level histogram of
the odd-sized square neighborhood centered on it, with symmetric border
reflection:

    h = -sum(p * log2(p))  over bins with nonzero probability

The confidence map is the per-pixel difference between the entropy of
the lightness image and the entropy of the quantized depth map, with
negative values preserved: well-textured pixels sitting on locally
stable depth score high, pixels whose depth is locally erratic relative
to their texture score low.
"""

from dataclasses import dataclass

import numba
import numpy as np

from ._util import symmetric_indices
from .rasters import GrayImage, RealMap

__all__ = [
    "EntropyConfig",
    "local_entropy",
    "entropy_difference",
    "normalize_to_gray",
]


@dataclass(frozen=True)
class EntropyConfig:
    """Neighborhood size for the histogram window; the bin count is fixed."""

    neighborhood: int
    bins: int = 256

    def __post_init__(self):
        if self.neighborhood < 3 or self.neighborhood % 2 == 0:
            raise ValueError(f"neighborhood must be odd and >= 3, got {self.neighborhood}")
        if self.bins != 256:
            raise ValueError(f"bins is fixed at 256, got {self.bins}")


@numba.njit(cache=True)
def _sliding_entropy(padded, n, term, out):
    # Window histogram slides along each row; the entropy sum always
    # walks bins in ascending order so results are bit-deterministic.
    height, width = out.shape
    hist = np.zeros(256, dtype=np.int32)
    for y in range(height):
        for v in range(256):
            hist[v] = 0
        for j in range(n):
            for i in range(n):
                hist[padded[y + j, i]] += 1
        total = 0.0
        for v in range(256):
            total += term[hist[v]]
        out[y, 0] = total
        for x in range(1, width):
            for j in range(n):
                hist[padded[y + j, x - 1]] -= 1
                hist[padded[y + j, x + n - 1]] += 1
            total = 0.0
            for v in range(256):
                total += term[hist[v]]
            out[y, x] = total


def _entropy_terms(area):
    # term[c] = -(c/area) * log2(c/area), the histogram bin contribution.
    counts = np.arange(area + 1, dtype=np.float64)
    term = np.zeros(area + 1, dtype=np.float64)
    p = counts[1:] / float(area)
    term[1:] = -(p * np.log2(p))
    return term


def local_entropy(img, cfg):
    """Local Shannon entropy of every pixel's n x n neighborhood, in bits.

    Borders are reflected symmetrically, so interior pixels (at least a
    full window away from every border) are unaffected by padding.
    Values lie in [0, log2(min(256, n*n))].
    """
    if not isinstance(cfg, EntropyConfig):
        cfg = EntropyConfig(cfg)
    n = cfg.neighborhood
    radius = n // 2
    pixels = img.pixels
    rows = symmetric_indices(-radius, img.height + radius, img.height)
    cols = symmetric_indices(-radius, img.width + radius, img.width)
    padded = pixels[np.ix_(rows, cols)]
    out = np.empty((img.height, img.width), dtype=np.float64)
    _sliding_entropy(padded, n, _entropy_terms(n * n), out)
    return RealMap(out)


def entropy_difference(image_entropy, depth_entropy):
    """Per-pixel image entropy minus depth-map entropy; negatives are kept."""
    if image_entropy.values.shape != depth_entropy.values.shape:
        raise ValueError(
            f"entropy map dimensions differ: {image_entropy.values.shape} "
            f"vs {depth_entropy.values.shape}"
        )
    return RealMap(image_entropy.values - depth_entropy.values)


def normalize_to_gray(realmap):
    """Min-max normalize a real map onto [0, 255] for visual inspection.

    Lossy; intended only for writing preview images.  A constant map
    normalizes to all zeros.
    """
    values = realmap.values
    lo = values.min()
    span = values.max() - lo
    if span == 0:
        return GrayImage(np.zeros(values.shape, dtype=np.int64))
    scaled = np.floor((values - lo) * (255.0 / span) + 0.5)
    return GrayImage(np.clip(scaled, 0, 255).astype(np.int64))
