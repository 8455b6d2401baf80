"""Evaluation metrics: Dice overlap, Hausdorff distance, average surface distance.

Surface distances are measured voxel-center to voxel-center between the
6-connectivity surfaces of the two masks, in physical millimeters.  HD is
the true maximum by default; a percentile (e.g. 95) can be requested.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .distance import _edt_squared
from .volume import DegenerateInputError, Mask, Spacing, Volume

METRIC_KEYS = ("dice_pct", "hd_mm", "asd_mm")


@dataclass(frozen=True)
class CaseMetrics:
    case_id: str
    dice_pct: float
    hd_mm: float
    asd_mm: float


@dataclass(frozen=True)
class EvalReport:
    rows: tuple[CaseMetrics, ...]
    mean: dict[str, float]
    std: dict[str, float]


def _check_dims(a: Mask, b: Mask) -> None:
    if a.dims != b.dims:
        raise ValueError(f"dims mismatch: {a.dims} vs {b.dims}")


def dice_score(a: Mask, b: Mask) -> float:
    """Overlap 2|A^B| / (|A|+|B|) as a percentage; both-empty counts as 100."""
    _check_dims(a, b)
    fa = a.data > 0.5
    fb = b.data > 0.5
    na = int(fa.sum())
    nb = int(fb.sum())
    if na == 0 and nb == 0:
        return 100.0
    inter = int(np.logical_and(fa, fb).sum())
    return 200.0 * inter / (na + nb)


def surface_voxels(m: Mask) -> Mask:
    """Foreground voxels with a background 6-neighbor (out-of-bounds counts)."""
    fg = m.data > 0.5
    padded = np.pad(fg, 1, constant_values=False)
    interior = np.ones_like(fg)
    for axis in range(3):
        for step in (-1, 1):
            shifted = np.roll(padded, step, axis=axis)[1:-1, 1:-1, 1:-1]
            interior &= shifted
    surf = fg & ~interior
    return Volume(surf.astype(np.float32), m.spacing, "label")


def _distance_to_set(target: np.ndarray, spacing: Spacing) -> np.ndarray:
    """Distance (mm) from every voxel to the nearest voxel of a nonempty set."""
    return np.sqrt(_edt_squared(~target, spacing))


def surface_distances(a: Mask, b: Mask, spacing: Spacing) -> tuple[np.ndarray, np.ndarray]:
    """Nearest-surface distances: from each surface voxel of a to b's surface,
    and vice versa."""
    _check_dims(a, b)
    sa = surface_voxels(a).data > 0.5
    sb = surface_voxels(b).data > 0.5
    if not sa.any() or not sb.any():
        raise DegenerateInputError("surface distance undefined for an empty mask")
    da = _distance_to_set(sb, spacing)[sa]
    db = _distance_to_set(sa, spacing)[sb]
    return da, db


def hausdorff(a: Mask, b: Mask, spacing: Spacing, percentile: float | None = None) -> float:
    """Symmetric Hausdorff distance in mm (maximum, or a percentile if given)."""
    da, db = surface_distances(a, b, spacing)
    if percentile is None:
        return float(max(da.max(), db.max()))
    return float(max(np.percentile(da, percentile), np.percentile(db, percentile)))


def asd(a: Mask, b: Mask, spacing: Spacing) -> float:
    """Symmetric mean surface distance in mm."""
    da, db = surface_distances(a, b, spacing)
    return float((da.sum() + db.sum()) / (da.size + db.size))


def aggregate(rows: list[CaseMetrics]) -> EvalReport:
    """Per-metric mean and population std over case rows."""
    if not rows:
        raise ValueError("aggregate needs at least one case row")
    mean = {}
    std = {}
    for key in METRIC_KEYS:
        vals = np.asarray([getattr(r, key) for r in rows], dtype=np.float64)
        mean[key] = float(vals.mean())
        std[key] = float(vals.std())
    return EvalReport(rows=tuple(rows), mean=mean, std=std)


def render_table(report: EvalReport) -> str:
    """Aligned plain-text table: Dice (%) / HD / ASD with Mean/Std columns."""
    lines = []
    lines.append(f"{'Case':<16}{'Dice (%)':>12}{'HD':>12}{'ASD':>12}")
    for r in report.rows:
        lines.append(
            f"{r.case_id:<16}{r.dice_pct:>12.2f}{r.hd_mm:>12.3f}{r.asd_mm:>12.3f}"
        )
    lines.append("")
    lines.append(f"{'':<16}{'Mean':>12}{'Std':>12}")
    labels = {"dice_pct": "Dice (%)", "hd_mm": "HD", "asd_mm": "ASD"}
    for key in METRIC_KEYS:
        lines.append(
            f"{labels[key]:<16}{report.mean[key]:>12.3f}{report.std[key]:>12.3f}"
        )
    return "\n".join(lines) + "\n"


def render_rows_json(report: EvalReport) -> str:
    """One JSON object per case row, then one 'aggregate' object."""
    lines = [json.dumps(asdict(r), sort_keys=True) for r in report.rows]
    lines.append(
        json.dumps({"aggregate": {"mean": report.mean, "std": report.std}}, sort_keys=True)
    )
    return "\n".join(lines) + "\n"
