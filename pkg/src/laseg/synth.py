"""Deterministic synthetic cases: an ellipsoidal cavity with scars on its rim.

Cases stand in for real LGE-MRI subjects in all tests: the cavity plays the
left atrium, the scar mask is a seeded subset of the cavity's boundary band
(so scars are covered by the band by construction), the image is a smoothed
intensity field with a darker cavity and hyperintense scars, and the
probability maps are softened masks with a seeded corruption level.

Randomness is a counter-based splitmix64 generator: stream s of seed q
yields u_i = mix64(mix64(q * PHI ^ s) + (i + 1) * PHI) scaled to [0, 1),
where mix64 is the splitmix64 finalizer.  This is platform-independent and
splittable, so the same seed reproduces the same case everywhere.
"""
from __future__ import annotations

import numpy as np
from scipy import ndimage

from .boundary import boundary_mask
from .volume import CaseRecord, Spacing, Volume

_PHI = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)

DEFAULT_DIMS = (48, 48, 16)
DEFAULT_SPACING = Spacing(0.625, 0.625, 2.5)

_STREAM_GEOMETRY = 0
_STREAM_SCAR = 1
_STREAM_IMAGE = 2
_STREAM_LA_PROB = 3
_STREAM_SCAR_PROB = 4
_STREAM_OUTLIER = 5


def _mix64(x: np.ndarray) -> np.ndarray:
    x = x ^ (x >> np.uint64(30))
    x = x * _M1
    x = x ^ (x >> np.uint64(27))
    x = x * _M2
    return x ^ (x >> np.uint64(31))


def _uniforms(seed: int, stream: int, n: int) -> np.ndarray:
    """n deterministic floats in [0, 1) from (seed, stream)."""
    with np.errstate(over="ignore"):
        key = _mix64(np.uint64(seed % (1 << 64)) * _PHI ^ np.uint64(stream))
        counters = key + (np.arange(1, n + 1, dtype=np.uint64)) * _PHI
        bits = _mix64(counters)
    return (bits >> np.uint64(11)).astype(np.float64) * (2.0 ** -53)


def _field(seed: int, stream: int, dims: tuple[int, int, int]) -> np.ndarray:
    return _uniforms(seed, stream, int(np.prod(dims))).reshape(dims, order="F")


def _check_dims(dims: tuple[int, int, int]) -> None:
    nx, ny, nz = dims
    if nx < 16 or ny < 16 or nz < 4:
        raise ValueError(f"dims must be at least 16x16 in-plane and 4 slices, got {dims}")


def _cavity(seed: int, dims: tuple[int, int, int]) -> np.ndarray:
    nx, ny, nz = dims
    p = _uniforms(seed, _STREAM_GEOMETRY, 6)
    cx = nx / 2.0 + (p[0] - 0.5) * 2.0
    cy = ny / 2.0 + (p[1] - 0.5) * 2.0
    cz = nz / 2.0 + (p[2] - 0.5) * 1.0
    # Radii kept small enough that the dilated band stays inside the grid.
    rx = nx * (0.20 + 0.05 * p[3])
    ry = ny * (0.20 + 0.05 * p[4])
    rz = nz * (0.25 + 0.10 * p[5])
    x, y, z = np.meshgrid(np.arange(nx), np.arange(ny), np.arange(nz), indexing="ij")
    q = ((x - cx) / rx) ** 2 + ((y - cy) / ry) ** 2 + ((z - cz) / rz) ** 2
    return q <= 1.0


def _soft_prob(mask: np.ndarray, noise: np.ndarray, corruption: float) -> np.ndarray:
    p = 0.02 + 0.96 * mask.astype(np.float64)
    p = p + corruption * 0.4 * (2.0 * noise - 1.0)
    return np.clip(p, 1e-3, 1.0 - 1e-3)


def make_case(
    seed: int,
    dims: tuple[int, int, int] = DEFAULT_DIMS,
    spacing: Spacing = DEFAULT_SPACING,
    corruption: float = 0.1,
) -> CaseRecord:
    """One deterministic synthetic case; identical output for identical seeds."""
    _check_dims(dims)
    if corruption < 0:
        raise ValueError("corruption must be >= 0")
    cavity = _cavity(seed, dims)
    cavity_mask = Volume(cavity.astype(np.float32), spacing, "label")
    band = boundary_mask(cavity_mask).data > 0.5

    scar_u = _field(seed, _STREAM_SCAR, dims)
    scar = band & (scar_u < 0.3)
    if not scar.any() and band.any():
        # Degenerate draw: promote the band voxel with the smallest draw.
        flat = np.where(band.ravel(order="F"), scar_u.ravel(order="F"), 2.0)
        scar = np.zeros(flat.shape, dtype=bool)
        scar[int(np.argmin(flat))] = True
        scar = scar.reshape(dims, order="F")

    img_u = _field(seed, _STREAM_IMAGE, dims)
    base = 0.9 - 0.5 * cavity.astype(np.float64) + 1.1 * scar.astype(np.float64)
    image = ndimage.gaussian_filter(base, sigma=(1.0, 1.0, 0.5)) + 0.05 * (img_u - 0.5)

    la_prob = _soft_prob(cavity, _field(seed, _STREAM_LA_PROB, dims), corruption)
    scar_prob = _soft_prob(scar, _field(seed, _STREAM_SCAR_PROB, dims), corruption)

    return CaseRecord(
        case_id=f"case_{seed:06d}",
        image=Volume(image, spacing, "image"),
        la_label=cavity_mask,
        scar_label=Volume(scar.astype(np.float32), spacing, "label"),
        la_prob=Volume(la_prob, spacing, "probability"),
        scar_prob=Volume(scar_prob, spacing, "probability"),
    )


def make_outlier_case(
    seed: int,
    dims: tuple[int, int, int] = DEFAULT_DIMS,
    spacing: Spacing = DEFAULT_SPACING,
) -> CaseRecord:
    """A high-uncertainty case: a wide ~0.35 rim inside the cavity boundary.

    Thresholding at 0.5 misses the rim while 0.2 recovers the full cavity, so
    the lowered threshold strictly improves Dice, and the rim's entropy pushes
    the case's entropy sum far above the make_case population.
    """
    rec = make_case(seed, dims, spacing, corruption=0.1)
    cavity = rec.la_label.data > 0.5
    core = ndimage.binary_erosion(cavity, iterations=2, border_value=0)
    rim_in = cavity & ~core
    ring_out = ndimage.binary_dilation(cavity, iterations=1) & ~cavity

    jitter = _field(seed, _STREAM_OUTLIER, dims)
    p = rec.la_prob.data.astype(np.float64).copy()
    p[rim_in] = 0.35 + 0.04 * (jitter[rim_in] - 0.5)
    p[ring_out] = 0.12 + 0.04 * (jitter[ring_out] - 0.5)
    return CaseRecord(
        case_id=f"outlier_{seed:06d}",
        image=rec.image,
        la_label=rec.la_label,
        scar_label=rec.scar_label,
        la_prob=Volume(p, spacing, "probability"),
        scar_prob=rec.scar_prob,
    )
