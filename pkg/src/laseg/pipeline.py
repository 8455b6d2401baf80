"""Pipeline stages shared by the CLI: stage-1 post-processing, the two-channel
stage-2 bundle, case directory I/O, and dataset evaluation."""
from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .boundary import boundary_mask
from .distance import signed_boundary_distance
from .metrics import CaseMetrics, EvalReport, aggregate, asd, dice_score, hausdorff
from .uam import UamStats, apply_threshold, chosen_threshold, entropy_sum, scar_threshold
from .volume import CaseRecord, Mask, Volume, read_volume, write_volume

BUNDLE_MAGIC = "BVOL-BUNDLE1"
CASE_VOLUME_NAMES = ("image", "la_label", "scar_label", "la_prob", "scar_prob")


@dataclass(frozen=True)
class Stage1Result:
    entropy: float
    threshold: float
    la_mask: Mask
    band: Mask
    signed_dm: Volume


def stage1_post(la_prob: Volume, stats: UamStats) -> Stage1Result:
    """UAM thresholding, boundary band, and signed distance map of a prediction."""
    h = entropy_sum(la_prob)
    mask = apply_threshold(la_prob, stats, h)
    band = boundary_mask(mask)
    dm = signed_boundary_distance(band, la_prob.spacing)
    return Stage1Result(h, chosen_threshold(stats, h), mask, band, dm)


def write_stage1(result: Stage1Result, out_dir: str | Path) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_volume(result.la_mask, out / "la_mask")
    write_volume(result.band, out / "boundary_band")
    write_volume(result.signed_dm, out / "signed_dm")


def write_bundle(image: Volume, dm: Volume, out_base: str | Path) -> Path:
    """Two-channel stage-2 input container: channels in order [image, distance]."""
    if image.dims != dm.dims or image.spacing != dm.spacing:
        raise ValueError("image and distance map must share dims and spacing")
    base = Path(out_base)
    base.parent.mkdir(parents=True, exist_ok=True)
    write_volume(image, base.parent / f"{base.name}_image")
    write_volume(dm, base.parent / f"{base.name}_distance")
    manifest = {
        "magic": BUNDLE_MAGIC,
        "channels": [
            {"name": "image", "file": f"{base.name}_image.json"},
            {"name": "distance", "file": f"{base.name}_distance.json"},
        ],
    }
    path = base.with_suffix(".json")
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def read_bundle(path: str | Path) -> list[Volume]:
    p = Path(path)
    manifest = json.loads(p.read_text())
    if manifest.get("magic") != BUNDLE_MAGIC:
        raise ValueError(f"{p}: not a {BUNDLE_MAGIC} manifest")
    return [read_volume(p.parent / ch["file"]) for ch in manifest["channels"]]


def write_case(rec: CaseRecord, out_dir: str | Path) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = {}
    for name, vol in rec.volumes().items():
        write_volume(vol, out / name)
        files[name] = f"{name}.json"
    manifest = {
        "case_id": rec.case_id,
        "dims": list(rec.image.dims),
        "spacing_mm": list(rec.image.spacing.as_tuple()),
        "files": files,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def read_case(case_dir: str | Path) -> CaseRecord:
    case_dir = Path(case_dir)
    manifest = json.loads((case_dir / "manifest.json").read_text())
    vols = {name: read_volume(case_dir / path) for name, path in manifest["files"].items()}
    return CaseRecord(case_id=manifest["case_id"], **vols)


def _case_ids(directory: Path) -> dict[str, Path]:
    return {p.stem: p for p in sorted(directory.glob("*.json"))}


def evaluate_dirs(pred_dir: str | Path, gt_dir: str | Path, jobs: int = 1) -> EvalReport:
    """Per-case Dice/HD/ASD between matching .bvol files of two directories.

    Case ids are file stems and must match exactly between the directories.
    Probability-kind predictions are thresholded with the scar rule (0.2).
    """
    preds = _case_ids(Path(pred_dir))
    gts = _case_ids(Path(gt_dir))
    if set(preds) != set(gts):
        missing = sorted(set(preds) ^ set(gts))
        raise ValueError(f"prediction and ground-truth case sets differ: {missing}")
    if not preds:
        raise ValueError("no cases found")

    def one(case_id: str) -> CaseMetrics:
        pred = read_volume(preds[case_id])
        gt = read_volume(gts[case_id])
        if pred.kind == "probability":
            pred = scar_threshold(pred)
        spacing = gt.spacing
        return CaseMetrics(
            case_id=case_id,
            dice_pct=dice_score(pred, gt),
            hd_mm=hausdorff(pred, gt, spacing),
            asd_mm=asd(pred, gt, spacing),
        )

    ids = sorted(preds)
    if jobs <= 1:
        rows = [one(cid) for cid in ids]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(one, ids))
    return aggregate(rows)
