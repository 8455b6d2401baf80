"""Uncertainty-aware post-processing.

Per-case prediction uncertainty is the sum of per-voxel Shannon entropies of
the output probability map (natural log, nats).  Population mean/std over a
set of cases define an outlier rule: cases more than ``sigma_factor``
standard deviations above the mean get their foreground threshold lowered
from 0.5 to 0.2.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
from scipy.special import xlogy

from .volume import Mask, Volume

SCAR_THRESHOLD = 0.2


@dataclass(frozen=True)
class UamStats:
    mean: float
    std: float
    n_cases: int
    sigma_factor: float = 3.0
    normal_threshold: float = 0.5
    outlier_threshold: float = 0.2
    # The outlier rule is one-sided (high entropy) by default: low entropy
    # signals confidence, where lowering the threshold would be harmful.
    two_sided: bool = False

    def __post_init__(self) -> None:
        if self.std < 0:
            raise ValueError("std must be >= 0")
        if self.n_cases < 1:
            raise ValueError("n_cases must be positive")
        for t in (self.normal_threshold, self.outlier_threshold):
            if not 0.0 < t < 1.0:
                raise ValueError("thresholds must lie in (0, 1)")
        if self.outlier_threshold >= self.normal_threshold:
            raise ValueError("outlier_threshold must be below normal_threshold")

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(asdict(self), indent=2, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "UamStats":
        return cls(**json.loads(Path(path).read_text()))


def entropy_sum(p: Volume) -> float:
    """Sum over voxels of -p*ln(p) - (1-p)*ln(1-p), with 0*ln(0) = 0."""
    if p.kind != "probability":
        raise ValueError("entropy_sum expects a probability volume")
    pf = p.data.astype(np.float64)
    h = -(xlogy(pf, pf) + xlogy(1.0 - pf, 1.0 - pf))
    return float(np.sum(h))


def fit_population(entropies: list[float], **stats_kwargs) -> UamStats:
    """Population mean/std of per-case entropy sums; needs at least 2 cases."""
    if len(entropies) < 2:
        raise ValueError("fit_population needs at least 2 cases")
    arr = np.asarray(entropies, dtype=np.float64)
    return UamStats(
        mean=float(arr.mean()),
        std=float(arr.std()),  # population formula
        n_cases=len(entropies),
        **stats_kwargs,
    )


def is_outlier(h: float, stats: UamStats) -> bool:
    hi = stats.mean + stats.sigma_factor * stats.std
    if stats.two_sided:
        return h > hi or h < stats.mean - stats.sigma_factor * stats.std
    return h > hi


def apply_threshold(p: Volume, stats: UamStats, h: float) -> Mask:
    """Threshold a probability map; outlier cases use the lowered threshold."""
    t = stats.outlier_threshold if is_outlier(h, stats) else stats.normal_threshold
    return Volume((p.data >= t).astype(np.float32), p.spacing, "label")


def chosen_threshold(stats: UamStats, h: float) -> float:
    return stats.outlier_threshold if is_outlier(h, stats) else stats.normal_threshold


def scar_threshold(p: Volume) -> Mask:
    """Unconditional scar threshold: foreground iff p >= 0.2."""
    if p.kind != "probability":
        raise ValueError("scar_threshold expects a probability volume")
    return Volume((p.data >= SCAR_THRESHOLD).astype(np.float32), p.spacing, "label")


def read_entropy_manifest(path: str | Path) -> dict[str, float]:
    """Parse 'case_id value' lines; blank lines and '#' comments are ignored."""
    out: dict[str, float] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"{path}:{lineno}: expected 'case_id value', got {line!r}")
        out[parts[0]] = float(parts[1])
    return out


def write_entropy_manifest(entries: dict[str, float], path: str | Path) -> None:
    lines = [f"{cid} {entries[cid]!r}" for cid in sorted(entries)]
    Path(path).write_text("\n".join(lines) + "\n")
