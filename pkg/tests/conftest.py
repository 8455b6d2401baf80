"""Shared oracles for the test suite.

Every oracle here is deliberately independent of the implementation it
checks: brute-force nearest-voxel scans for distances, explicit window
shifts for morphology, scalar loops for losses.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.spatial.distance import cdist

from laseg import Spacing


def brute_edt(fg: np.ndarray, spacing: Spacing) -> np.ndarray:
    """O(n^2) exact EDT: per foreground voxel, min distance to any background."""
    sp = np.asarray(spacing.as_tuple())
    out = np.zeros(fg.shape, dtype=np.float64)
    fg_pts = np.argwhere(fg)
    bg_pts = np.argwhere(~fg)
    if fg_pts.size == 0:
        return out
    d = cdist(fg_pts * sp, bg_pts * sp).min(axis=1)
    out[fg] = d
    return out


def _window_reduce(fg: np.ndarray, radius: int, op: str) -> np.ndarray:
    """In-plane Chebyshev-window any/all per z-slice; out-of-bounds = background."""
    nx, ny, _ = fg.shape
    pad = np.pad(fg, ((radius, radius), (radius, radius), (0, 0)), constant_values=False)
    acc = None
    for dx in range(2 * radius + 1):
        for dy in range(2 * radius + 1):
            w = pad[dx : dx + nx, dy : dy + ny, :]
            if acc is None:
                acc = w.copy()
            elif op == "any":
                acc |= w
            else:
                acc &= w
    return acc


def dilate_slice(fg: np.ndarray, radius: int) -> np.ndarray:
    return _window_reduce(fg, radius, "any")


def erode_slice(fg: np.ndarray, radius: int) -> np.ndarray:
    return _window_reduce(fg, radius, "all")


def band_oracle(fg: np.ndarray) -> np.ndarray:
    """Set-difference boundary band: dilate by 2 minus erode by 1, per slice."""
    return dilate_slice(fg, 2) & ~erode_slice(fg, 1)


def surface_6conn(fg: np.ndarray) -> np.ndarray:
    """Foreground voxels with a background 6-neighbor (out-of-bounds counts)."""
    out = np.zeros(fg.shape, dtype=bool)
    nx, ny, nz = fg.shape
    for x, y, z in np.argwhere(fg):
        for dx, dy, dz in ((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)):
            u, v, w = x + dx, y + dy, z + dz
            if not (0 <= u < nx and 0 <= v < ny and 0 <= w < nz) or not fg[u, v, w]:
                out[x, y, z] = True
                break
    return out


def brute_surface_distances(fa: np.ndarray, fb: np.ndarray, spacing: Spacing):
    sp = np.asarray(spacing.as_tuple())
    pa = np.argwhere(surface_6conn(fa)) * sp
    pb = np.argwhere(surface_6conn(fb)) * sp
    d = cdist(pa, pb)
    return d.min(axis=1), d.min(axis=0)


def brute_hd(fa, fb, spacing) -> float:
    da, db = brute_surface_distances(fa, fb, spacing)
    return max(da.max(), db.max())


def brute_asd(fa, fb, spacing) -> float:
    da, db = brute_surface_distances(fa, fb, spacing)
    return (da.sum() + db.sum()) / (da.size + db.size)


def scalar_ce(s: np.ndarray, g: np.ndarray, eps: float = 1e-7) -> float:
    total = 0.0
    for sv, gv in zip(s.ravel(), g.ravel()):
        sc = min(max(float(sv), eps), 1.0 - eps)
        total += -(float(gv) * math.log(sc) + (1.0 - float(gv)) * math.log(1.0 - sc))
    return total / s.size


def scalar_entropy_sum(p: np.ndarray) -> float:
    total = 0.0
    for pv in p.ravel():
        pv = float(pv)
        for q in (pv, 1.0 - pv):
            if q > 0.0:
                total += -q * math.log(q)
    return total


def random_mask(rng: np.random.Generator, dims, p_fg: float = 0.4) -> np.ndarray:
    return rng.random(dims) < p_fg


def random_spacing(rng: np.random.Generator) -> Spacing:
    return Spacing(*(float(s) for s in rng.uniform(0.3, 3.0, size=3)))
