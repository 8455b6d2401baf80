"""Boundary-band extraction via slice-wise max-pooling.

The band of a mask V is

    M_b = Pool5(V) + Pool3(-V)

computed strictly in 2D per z-slice: a 5x5 pool of the mask (a dilation by
Chebyshev radius 2) plus a 3x3 pool of the negated mask (an erosion by
radius 1, negated).  Deep interior cancels to 1 + (-1) = 0, so the result is
again binary: a ring 2 voxels outside the contour and 1 voxel inside.

Out-of-bounds voxels count as background for both pools, so foreground
touching the image border still produces the 1-voxel inner rim there.
"""
from __future__ import annotations

import numpy as np
from scipy import ndimage

from .volume import Mask, Volume


def _pool2d(data: np.ndarray, kernel: int, pad_value: float) -> np.ndarray:
    return ndimage.maximum_filter(
        data, size=(kernel, kernel, 1), mode="constant", cval=pad_value
    )


def maxpool2d_slice(v: Volume, kernel: int, signed: bool = False) -> Volume:
    """In-plane window maximum per z-slice, stride 1, same-size padding.

    Pad value is the minimum representable input: 0 for unsigned masks,
    -1 when pooling a negated mask (``signed=True``).
    """
    if kernel not in (3, 5):
        raise ValueError(f"kernel must be 3 or 5, got {kernel}")
    pad = -1.0 if signed else 0.0
    out = _pool2d(v.data.astype(np.float64), kernel, pad)
    return Volume(out, v.spacing, "image")


def boundary_mask(v_g: Mask) -> Mask:
    """3-pixel boundary band of a mask: dilate by 2, minus erode by 1, per slice."""
    if v_g.kind != "label":
        raise ValueError("boundary_mask expects a label volume")
    g = v_g.data.astype(np.float64)
    pool_d = _pool2d(g, 5, 0.0)
    pool_e = _pool2d(-g, 3, 0.0)
    band = pool_d + pool_e
    return Volume(band, v_g.spacing, "label")
