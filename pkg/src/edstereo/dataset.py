"""Loading stereo pairs, ground truth and region masks from Middlebury-style files.

A stereo pair is described by a plain-text manifest of ``key = value``
lines naming the image files and the two dataset constants:

    left = im2.ppm
    right = im6.ppm
    ground_truth = disp2.pgm
    nonocc_mask = nonocc.png      # optional
    disc_mask = disc.png          # optional
    max_disparity = 16
    gt_scale = 16

Relative paths are resolved against the manifest's directory.  Stored
ground-truth pixel values are ``gt_scale`` times the true disparity;
value 0 marks unknown ground truth.
"""

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .color import to_lightness
from .imageio import load_image
from .rasters import DisparityMap, GrayImage, RegionMask

__all__ = [
    "StereoPair",
    "GroundTruth",
    "Manifest",
    "as_gray",
    "load_ground_truth",
    "load_region_mask",
    "load_manifest",
    "load_pair",
]


@dataclass(frozen=True)
class StereoPair:
    """Rectified stereo pair plus its search range and ground-truth scale."""

    left: GrayImage
    right: GrayImage
    max_disparity: int
    gt_scale: int = 1

    def __post_init__(self):
        if (self.left.width, self.left.height) != (self.right.width, self.right.height):
            raise ValueError(
                f"left {self.left.width}x{self.left.height} and right "
                f"{self.right.width}x{self.right.height} dimensions differ"
            )
        if self.max_disparity < 1:
            raise ValueError("max_disparity must be >= 1")
        if self.gt_scale < 1:
            raise ValueError("gt_scale must be >= 1")


@dataclass(frozen=True)
class GroundTruth:
    """Decoded ground-truth disparities with bookkeeping from the decode.

    `known` marks pixels whose stored value was nonzero.  `rounded_count`
    counts stored values that were not exact multiples of the scale (the
    decode still rounds and accepts them); `out_of_range_count` counts
    decoded disparities at or above the declared search range.
    """

    disparity: DisparityMap
    known: RegionMask
    rounded_count: int = 0
    out_of_range_count: int = 0


def as_gray(raster):
    """Wrap a loaded raster as a GrayImage, converting color to lightness.

    Single-channel inputs pass through unchanged.
    """
    arr = np.asarray(raster)
    if arr.ndim == 2:
        return GrayImage(arr.astype(np.int64))
    return to_lightness(arr)


def load_ground_truth(path, gt_scale, max_disparity=None):
    """Decode a ground-truth image whose pixel values are scale x disparity.

    Each stored value v becomes round(v / gt_scale) (half away from zero);
    v == 0 is decoded as disparity 0 and excluded via the `known` mask.
    When `max_disparity` is given, decoded values at or above it are
    counted but kept, and the returned map widens its range to fit them.
    """
    if gt_scale < 1:
        raise ValueError("gt_scale must be >= 1")
    raw = load_image(path)
    if raw.ndim != 2:
        raise ValueError(f"{path}: ground truth must be single-channel")
    stored = raw.astype(np.int64)
    disp = np.floor_divide(stored * 2 + gt_scale, 2 * gt_scale)  # round half up
    known = stored != 0
    rounded = int(np.count_nonzero((stored % gt_scale != 0) & known))
    if max_disparity is None:
        bound = int(disp.max()) + 1
        out_of_range = 0
    else:
        out_of_range = int(np.count_nonzero(known & (disp >= max_disparity)))
        bound = max(int(max_disparity), int(disp.max()) + 1)
    return GroundTruth(
        disparity=DisparityMap(disp, bound),
        known=RegionMask(known),
        rounded_count=rounded,
        out_of_range_count=out_of_range,
    )


def load_region_mask(path):
    """Load a region mask image; any nonzero pixel is inside the region."""
    raw = load_image(path)
    if raw.ndim == 3:
        raw = raw.max(axis=2)
    return RegionMask(raw != 0)


@dataclass(frozen=True)
class Manifest:
    """Parsed dataset manifest with paths resolved to absolute form."""

    name: str
    left: Path
    right: Path
    max_disparity: int
    gt_scale: int
    ground_truth: Path | None = None
    nonocc_mask: Path | None = None
    disc_mask: Path | None = None


_REQUIRED_KEYS = ("left", "right", "max_disparity", "gt_scale")
_PATH_KEYS = ("left", "right", "ground_truth", "nonocc_mask", "disc_mask")


def load_manifest(path):
    """Parse a ``key = value`` manifest file.  '#' starts a comment."""
    path = Path(path)
    values = {}
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip().lower().replace("-", "_")
        values[key] = value.strip()
    for key in _REQUIRED_KEYS:
        if key not in values:
            raise ValueError(f"{path}: missing required key {key!r}")
    base = path.parent
    kwargs = {"name": values.get("name", path.stem)}
    for key in _PATH_KEYS:
        if key in values:
            kwargs[key] = (base / values[key]).resolve()
    try:
        kwargs["max_disparity"] = int(values["max_disparity"])
        kwargs["gt_scale"] = int(values["gt_scale"])
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None
    return Manifest(**kwargs)


@dataclass(frozen=True)
class LoadedPair:
    """Everything a manifest points at, loaded and decoded."""

    name: str
    pair: StereoPair
    ground_truth: GroundTruth | None
    regions: dict = field(default_factory=dict)


def load_pair(manifest):
    """Load the images, ground truth and region masks a manifest names.

    The returned regions dict holds 'all' (pixels with known ground
    truth) plus 'nonocc' and 'disc' when mask files are listed.
    """
    left = as_gray(load_image(manifest.left))
    right = as_gray(load_image(manifest.right))
    pair = StereoPair(left, right, manifest.max_disparity, manifest.gt_scale)
    gt = None
    regions = {}
    if manifest.ground_truth is not None:
        gt = load_ground_truth(manifest.ground_truth, manifest.gt_scale, manifest.max_disparity)
        regions["all"] = gt.known
    if manifest.nonocc_mask is not None:
        regions["nonocc"] = load_region_mask(manifest.nonocc_mask)
    if manifest.disc_mask is not None:
        regions["disc"] = load_region_mask(manifest.disc_mask)
    return LoadedPair(name=manifest.name, pair=pair, ground_truth=gt, regions=regions)
