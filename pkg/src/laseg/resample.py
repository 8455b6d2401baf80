"""Spline resampling between voxel grids.

Images use an interpolating cubic B-spline (with prefiltering); labels and
probability maps use linear interpolation.  The coordinate mapping is
corner-aligned: target voxel x_tgt samples the source at

    x_src = x_tgt * (s_tgt / s_src)

per axis, and out-of-range samples clamp to the edge value.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .volume import Mask, Spacing, Volume


@dataclass(frozen=True)
class ResamplePlan:
    source_dims: tuple[int, int, int]
    source_spacing: Spacing
    target_dims: tuple[int, int, int]
    target_spacing: Spacing
    order: int = 3
    label_threshold: float = 0.5

    def __post_init__(self) -> None:
        if self.order not in (1, 3):
            raise ValueError(f"interpolation order must be 1 or 3, got {self.order}")
        if min(self.target_dims) < 1 or min(self.source_dims) < 1:
            raise ValueError("grid dims must be >= 1 per axis")
        if not 0.0 < self.label_threshold < 1.0:
            raise ValueError("label_threshold must lie in (0, 1)")

    @classmethod
    def between(cls, source: Volume, target_dims, target_spacing: Spacing, **kw) -> "ResamplePlan":
        return cls(source.dims, source.spacing, tuple(target_dims), target_spacing, **kw)

    @classmethod
    def identity(cls, source: Volume, **kw) -> "ResamplePlan":
        return cls(source.dims, source.spacing, source.dims, source.spacing, **kw)


def _target_coords(plan: ResamplePlan) -> np.ndarray:
    src_sp = plan.source_spacing.as_tuple()
    tgt_sp = plan.target_spacing.as_tuple()
    axes = [
        np.arange(plan.target_dims[a], dtype=np.float64) * (tgt_sp[a] / src_sp[a])
        for a in range(3)
    ]
    grid = np.meshgrid(*axes, indexing="ij")
    return np.stack(grid)


def _interpolate(v: Volume, plan: ResamplePlan, order: int) -> np.ndarray:
    if v.dims != tuple(plan.source_dims):
        raise ValueError(f"volume dims {v.dims} do not match plan source dims {plan.source_dims}")
    coords = _target_coords(plan)
    # mode="nearest" clamps both the spline extension and out-of-range samples.
    return ndimage.map_coordinates(
        v.data.astype(np.float64), coords, order=order, mode="nearest"
    )


def resample_image(v: Volume, plan: ResamplePlan) -> Volume:
    """Cubic-spline resampling of an image or distance field."""
    if plan.order != 3:
        raise ValueError("resample_image requires a plan with order 3")
    if v.kind not in ("image", "distance"):
        raise ValueError(f"resample_image expects image or distance kind, got {v.kind}")
    out = _interpolate(v, plan, order=3)
    return Volume(out, plan.target_spacing, v.kind)


def resample_label(m: Mask, plan: ResamplePlan) -> Mask:
    """Linear interpolation of a {0,1} field, thresholded (>=) back to a mask."""
    if plan.order != 1:
        raise ValueError("resample_label requires a plan with order 1")
    if m.kind != "label":
        raise ValueError("resample_label expects a label volume")
    interp = _interpolate(m, plan, order=1)
    out = (interp >= plan.label_threshold).astype(np.float32)
    return Volume(out, plan.target_spacing, "label")


def resample_prob(v: Volume, plan: ResamplePlan) -> Volume:
    """Linear interpolation of a probability map, clamped back to [0, 1]."""
    if v.kind != "probability":
        raise ValueError("resample_prob expects a probability volume")
    out = np.clip(_interpolate(v, plan, order=1), 0.0, 1.0)
    return Volume(out, plan.target_spacing, "probability")
