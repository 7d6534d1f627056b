"""Left-right consistency baseline classifier.

A left-view pixel is reliable when its disparity projects to a valid
column of the right view and the right view's disparity there agrees
within a tolerance.  Projections that leave the image are classified
incorrect, since such pixels are typically occluded.
"""

import numpy as np

from .rasters import ReliabilityMask

__all__ = ["lrc_check"]


def lrc_check(disp_left, disp_right, tol=1):
    """Consistency mask: |d_L(x, y) - d_R(x - d_L(x, y), y)| <= tol.

    Increasing `tol` never shrinks the reliable set.
    """
    if tol < 0:
        raise ValueError("tol must be >= 0")
    d_l = disp_left.disparities
    d_r = disp_right.disparities
    if d_l.shape != d_r.shape:
        raise ValueError(f"disparity map dimensions differ: {d_l.shape} vs {d_r.shape}")
    width = d_l.shape[1]
    x = np.arange(width, dtype=np.int32)[None, :]
    projected = x - d_l
    in_range = projected >= 0
    matched = np.take_along_axis(d_r, np.maximum(projected, 0), axis=1)
    consistent = np.abs(d_l - matched) <= tol
    return ReliabilityMask(in_range & consistent)
