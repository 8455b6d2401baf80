"""Segmentation losses with analytic gradients w.r.t. predicted probabilities.

All reductions run in float64 over the x-fastest flattening of the volume
(numpy's pairwise summation), so values are reproducible bit-for-bit across
runs and thread counts.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .volume import Mask, Volume

CLAMP_EPS = 1e-7  # probability clamp before logs
DICE_EPS = 1e-5  # soft-Dice smoothing


@dataclass
class LossValue:
    value: float
    gradient: Optional[np.ndarray] = None  # dL/ds per voxel, same dims as s


@dataclass(frozen=True)
class TopKConfig:
    k_percent: float
    # Eq-style normalization: divide by the number of selected voxels
    # (default) or by the total voxel count.
    normalize_by_total: bool = False

    def __post_init__(self) -> None:
        if not 0.0 < self.k_percent <= 100.0:
            raise ValueError(f"k_percent must lie in (0, 100], got {self.k_percent}")


def _check_pair(s: Volume, g: Mask) -> None:
    if s.kind != "probability":
        raise ValueError("prediction must be a probability volume")
    if g.kind != "label":
        raise ValueError("ground truth must be a label volume")
    if s.dims != g.dims:
        raise ValueError(f"dims mismatch: prediction {s.dims} vs ground truth {g.dims}")


def _flat(v: Volume) -> np.ndarray:
    return v.data.ravel(order="F").astype(np.float64)


def _to_grid(flat: np.ndarray, dims: tuple[int, int, int]) -> np.ndarray:
    return flat.reshape(dims, order="F")


def _ce_per_voxel(s: np.ndarray, g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-voxel binary cross-entropy and its derivative w.r.t. s."""
    clamped = (s < CLAMP_EPS) | (s > 1.0 - CLAMP_EPS)
    sc = np.clip(s, CLAMP_EPS, 1.0 - CLAMP_EPS)
    ce = -(g * np.log(sc) + (1.0 - g) * np.log(1.0 - sc))
    grad = (sc - g) / (sc * (1.0 - sc))
    grad[clamped] = 0.0  # the clamp is flat outside [eps, 1-eps]
    return ce, grad


def cross_entropy(s: Volume, g: Mask) -> LossValue:
    """Mean binary cross-entropy over all voxels."""
    _check_pair(s, g)
    ce, grad = _ce_per_voxel(_flat(s), _flat(g))
    n = ce.size
    return LossValue(float(np.sum(ce) / n), _to_grid(grad / n, s.dims))


def dice_loss(s: Volume, g: Mask) -> LossValue:
    """Soft Dice loss  1 - (2*sum(s*g) + eps) / (sum(s) + sum(g) + eps)."""
    _check_pair(s, g)
    sf, gf = _flat(s), _flat(g)
    inter = float(np.sum(sf * gf))
    den = float(np.sum(sf) + np.sum(gf)) + DICE_EPS
    num = 2.0 * inter + DICE_EPS
    value = 1.0 - num / den
    grad = -(2.0 * gf * den - num) / (den * den)
    return LossValue(value, _to_grid(grad, s.dims))


def _topk_selection(ce: np.ndarray, k_percent: float) -> tuple[np.ndarray, int]:
    n = ce.size
    n_sel = math.ceil(k_percent * n / 100.0)
    # Highest per-voxel CE first; stable sort breaks ties by lower linear index.
    order = np.argsort(-ce, kind="stable")
    selected = np.zeros(n, dtype=bool)
    selected[order[:n_sel]] = True
    return selected, n_sel


def topk_loss(s: Volume, g: Mask, cfg: TopKConfig) -> LossValue:
    """Mean CE over the k% voxels with the highest per-voxel loss.

    The selection is treated as constant for the gradient (straight-through),
    so the gradient is the CE gradient on selected voxels and zero elsewhere.
    At k=100 this is bit-identical to :func:`cross_entropy`.
    """
    _check_pair(s, g)
    ce, grad = _ce_per_voxel(_flat(s), _flat(g))
    selected, n_sel = _topk_selection(ce, cfg.k_percent)
    denom = ce.size if cfg.normalize_by_total else n_sel
    value = float(np.sum(ce[selected]) / denom)
    grad = np.where(selected, grad, 0.0) / denom
    return LossValue(value, _to_grid(grad, s.dims))


def combined_loss(s: Volume, g: Mask, cfg: TopKConfig) -> LossValue:
    """TopK loss plus soft Dice loss."""
    t = topk_loss(s, g, cfg)
    d = dice_loss(s, g)
    return LossValue(t.value + d.value, t.gradient + d.gradient)


def topk_focus_mask(s: Volume, g: Mask, cfg: TopKConfig) -> Mask:
    """Mask of the voxels the TopK selection attends to, for inspection."""
    _check_pair(s, g)
    ce, _ = _ce_per_voxel(_flat(s), _flat(g))
    selected, _ = _topk_selection(ce, cfg.k_percent)
    return Volume(_to_grid(selected.astype(np.float64), s.dims), s.spacing, "label")
