"""Volumetric containers, the .bvol on-disk format, and intensity normalization.

A Volume is a dense 3D float32 scalar field with physical voxel spacing in
millimeters.  The linear layout convention is x-fastest:

    idx(x, y, z) = x + nx * (y + ny * z)

which is Fortran order for an array of shape (nx, ny, nz).  Volumes are
immutable after construction; every operation in this package returns a new
Volume, so values can be shared freely across threads.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

KINDS = ("image", "probability", "distance", "label")
MAGIC = "BVOL1"


class FormatError(ValueError):
    """Malformed .bvol header or payload."""


class DegenerateInputError(ValueError):
    """Structurally valid input whose content makes the operation undefined."""


@dataclass(frozen=True)
class Spacing:
    """Physical voxel size in millimeters along x, y, z."""

    sx: float
    sy: float
    sz: float

    def __post_init__(self) -> None:
        for c in (self.sx, self.sy, self.sz):
            if not (np.isfinite(c) and c > 0):
                raise ValueError(
                    f"spacing components must be positive and finite, "
                    f"got ({self.sx}, {self.sy}, {self.sz})"
                )

    def as_tuple(self) -> tuple[float, float, float]:
        return (float(self.sx), float(self.sy), float(self.sz))


def idx(x: int, y: int, z: int, nx: int, ny: int) -> int:
    """Linear index of voxel (x, y, z); x varies fastest."""
    return x + nx * (y + ny * z)


def _validate_kind(data: np.ndarray, kind: str) -> None:
    if kind == "probability":
        if data.min() < 0.0 or data.max() > 1.0:
            raise ValueError("probability volume has values outside [0, 1]")
    elif kind == "label":
        if not np.all((data == 0.0) | (data == 1.0)):
            raise ValueError("label volume has values other than 0 and 1")
    if not np.all(np.isfinite(data)):
        raise ValueError(f"{kind} volume contains non-finite values")


@dataclass(frozen=True)
class Volume:
    """Immutable 3D float32 field with spacing and an element-kind tag."""

    data: np.ndarray  # shape (nx, ny, nz)
    spacing: Spacing
    kind: str = "image"

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown volume kind {self.kind!r}")
        arr = np.asarray(self.data, dtype=np.float32)
        if arr.ndim != 3 or min(arr.shape) < 1:
            raise ValueError(f"volume data must be 3D and non-empty, got shape {arr.shape}")
        _validate_kind(arr, self.kind)
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @property
    def dims(self) -> tuple[int, int, int]:
        return tuple(int(d) for d in self.data.shape)

    @property
    def n_voxels(self) -> int:
        return int(self.data.size)

    def same_grid(self, other: "Volume") -> bool:
        return self.dims == other.dims and self.spacing == other.spacing


# A Mask is simply a Volume of kind "label"; kept as an alias for signatures.
Mask = Volume


def make_mask(data: np.ndarray, spacing: Spacing) -> Mask:
    return Volume(data, spacing, "label")


@dataclass(frozen=True)
class CaseRecord:
    """One subject's named set of volumes; all present volumes share a grid."""

    case_id: str
    image: Volume
    la_label: Optional[Mask] = None
    scar_label: Optional[Mask] = None
    la_prob: Optional[Volume] = None
    scar_prob: Optional[Volume] = None

    def __post_init__(self) -> None:
        for name in ("la_label", "scar_label", "la_prob", "scar_prob"):
            v = getattr(self, name)
            if v is not None and not self.image.same_grid(v):
                raise ValueError(f"{name} does not share dims/spacing with the image")

    def volumes(self) -> dict[str, Volume]:
        out = {"image": self.image}
        for name in ("la_label", "scar_label", "la_prob", "scar_prob"):
            v = getattr(self, name)
            if v is not None:
                out[name] = v
        return out


def _bvol_paths(path: str | Path) -> tuple[Path, Path]:
    p = Path(path)
    if p.suffix in (".json", ".raw"):
        p = p.with_suffix("")
    return p.with_suffix(".json"), p.with_suffix(".raw")


def write_volume(v: Volume, path: str | Path) -> None:
    """Write ``v`` as a .bvol pair (<name>.json header + <name>.raw payload)."""
    header_path, raw_path = _bvol_paths(path)
    nx, ny, nz = v.dims
    header = {
        "magic": MAGIC,
        "dims": [nx, ny, nz],
        "spacing_mm": list(v.spacing.as_tuple()),
        "kind": v.kind,
        "byte_order": "LE",
        "dtype": "f32",
    }
    header_path.parent.mkdir(parents=True, exist_ok=True)
    header_path.write_text(json.dumps(header, indent=2, sort_keys=True) + "\n")
    raw_path.write_bytes(np.asarray(v.data, dtype="<f4").tobytes(order="F"))


def read_volume(path: str | Path) -> Volume:
    """Read a .bvol pair written by :func:`write_volume`; bit-exact round trip."""
    header_path, raw_path = _bvol_paths(path)
    try:
        header = json.loads(header_path.read_text())
    except json.JSONDecodeError as e:
        raise FormatError(f"{header_path}: invalid JSON header: {e}") from e
    if not isinstance(header, dict) or header.get("magic") != MAGIC:
        raise FormatError(f"{header_path}: missing or wrong magic (expected {MAGIC!r})")
    if header.get("dtype") != "f32" or header.get("byte_order") != "LE":
        raise FormatError(f"{header_path}: unsupported dtype/byte_order")
    dims = header.get("dims")
    if (
        not isinstance(dims, list)
        or len(dims) != 3
        or not all(isinstance(d, int) and d > 0 for d in dims)
    ):
        raise FormatError(f"{header_path}: dims must be three positive integers")
    kind = header.get("kind")
    if kind not in KINDS:
        raise FormatError(f"{header_path}: unknown kind {kind!r}")
    spacing_mm = header.get("spacing_mm")
    if not isinstance(spacing_mm, list) or len(spacing_mm) != 3:
        raise FormatError(f"{header_path}: spacing_mm must be a list of three reals")
    try:
        spacing = Spacing(*(float(s) for s in spacing_mm))
    except (TypeError, ValueError) as e:
        raise FormatError(f"{header_path}: bad spacing: {e}") from e

    n = dims[0] * dims[1] * dims[2]
    payload = raw_path.read_bytes()
    if len(payload) != 4 * n:
        raise FormatError(
            f"{raw_path}: payload length mismatch, expected {4 * n} bytes "
            f"for dims {tuple(dims)}, got {len(payload)}"
        )
    data = np.frombuffer(payload, dtype="<f4").reshape(dims, order="F")
    try:
        return Volume(data, spacing, kind)
    except ValueError as e:
        raise FormatError(f"{header_path}: {e}") from e


def zscore_normalize(v: Volume) -> Volume:
    """Whole-volume z-score: subtract the mean, divide by the population std."""
    if v.n_voxels < 2:
        raise ValueError("z-score normalization needs at least 2 voxels")
    x = v.data.astype(np.float64)
    mean = x.mean()
    std = x.std()  # population formula, divisor N
    if std == 0.0:
        raise DegenerateInputError("constant volume has zero standard deviation")
    return Volume((x - mean) / std, v.spacing, "image")
