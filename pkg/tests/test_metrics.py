import numpy as np
import pytest

from conftest import brute_asd, brute_hd, random_mask, random_spacing, surface_6conn
from laseg import (
    CaseMetrics,
    DegenerateInputError,
    Spacing,
    Volume,
    aggregate,
    asd,
    dice_score,
    hausdorff,
    surface_voxels,
)
from laseg.metrics import render_rows_json, render_table

SP = Spacing(1.0, 1.0, 1.0)


def _mask(data, spacing=SP):
    return Volume(np.asarray(data, dtype=np.float32), spacing, "label")


def test_dice_identical_and_disjoint():
    a = np.zeros((4, 4, 4))
    a[:2] = 1.0
    assert dice_score(_mask(a), _mask(a)) == 100.0
    b = np.zeros((4, 4, 4))
    b[2:] = 1.0
    assert dice_score(_mask(a), _mask(b)) == 0.0


def test_dice_hand_value():
    a = np.zeros((4, 4, 1))
    b = np.zeros((4, 4, 1))
    a[0:2, :, 0] = 1.0  # 8 voxels
    b[0:2, 0:3, 0] = 1.0
    b[2, 0:2, 0] = 1.0  # 8 voxels, overlap 6
    assert dice_score(_mask(a), _mask(b)) == 75.0


def test_dice_empty_conventions():
    empty = _mask(np.zeros((3, 3, 3)))
    full = _mask(np.ones((3, 3, 3)))
    assert dice_score(empty, empty) == 100.0
    assert dice_score(empty, full) == 0.0


def test_dice_symmetry():
    rng = np.random.default_rng(0)
    a = _mask(random_mask(rng, (5, 5, 3)))
    b = _mask(random_mask(rng, (5, 5, 3)))
    assert dice_score(a, b) == dice_score(b, a)


def test_surface_single_voxel():
    m = np.zeros((3, 3, 3))
    m[1, 1, 1] = 1.0
    np.testing.assert_array_equal(surface_voxels(_mask(m)).data, m)


def test_surface_solid_cube_shell():
    m = np.zeros((5, 5, 5))
    m[1:4, 1:4, 1:4] = 1.0
    surf = surface_voxels(_mask(m)).data
    assert surf.sum() == 26  # all but the center voxel
    assert surf[2, 2, 2] == 0.0


def test_surface_empty():
    assert surface_voxels(_mask(np.zeros((3, 3, 3)))).data.sum() == 0


def test_surface_matches_neighbor_oracle():
    rng = np.random.default_rng(1)
    for _ in range(10):
        fg = random_mask(rng, (6, 6, 4))
        surf = surface_voxels(_mask(fg)).data > 0.5
        np.testing.assert_array_equal(surf, surface_6conn(fg))


def test_hd_identical_zero():
    m = np.zeros((4, 4, 4))
    m[1:3, 1:3, 1:3] = 1.0
    assert hausdorff(_mask(m), _mask(m), SP) == 0.0
    assert asd(_mask(m), _mask(m), SP) == 0.0


def test_hd_two_voxels_z_steps():
    sp = Spacing(1.0, 1.0, 2.5)
    a = np.zeros((3, 3, 5))
    b = np.zeros((3, 3, 5))
    a[1, 1, 0] = 1.0
    b[1, 1, 3] = 1.0
    assert hausdorff(_mask(a, sp), _mask(b, sp), sp) == pytest.approx(7.5)
    assert asd(_mask(a, sp), _mask(b, sp), sp) == pytest.approx(7.5)


def test_hd_asd_match_brute_force():
    rng = np.random.default_rng(2)
    for _ in range(20):
        dims = tuple(rng.integers(3, 9, size=3))
        fa = random_mask(rng, dims)
        fb = random_mask(rng, dims)
        if not fa.any() or not fb.any():
            continue
        sp = random_spacing(rng)
        assert hausdorff(_mask(fa, sp), _mask(fb, sp), sp) == pytest.approx(
            brute_hd(fa, fb, sp), abs=1e-4
        )
        assert asd(_mask(fa, sp), _mask(fb, sp), sp) == pytest.approx(
            brute_asd(fa, fb, sp), abs=1e-4
        )


def test_hd_at_least_asd():
    rng = np.random.default_rng(3)
    for _ in range(10):
        fa = random_mask(rng, (6, 6, 4))
        fb = random_mask(rng, (6, 6, 4))
        if not fa.any() or not fb.any():
            continue
        assert hausdorff(_mask(fa), _mask(fb), SP) >= asd(_mask(fa), _mask(fb), SP)


def test_hd95_flag():
    rng = np.random.default_rng(4)
    fa = random_mask(rng, (8, 8, 4))
    fb = random_mask(rng, (8, 8, 4))
    assert hausdorff(_mask(fa), _mask(fb), SP, percentile=95.0) <= hausdorff(
        _mask(fa), _mask(fb), SP
    )


def test_empty_mask_is_error():
    m = np.zeros((3, 3, 3))
    m[1, 1, 1] = 1.0
    with pytest.raises(DegenerateInputError):
        hausdorff(_mask(np.zeros((3, 3, 3))), _mask(m), SP)
    with pytest.raises(DegenerateInputError):
        asd(_mask(m), _mask(np.zeros((3, 3, 3))), SP)


def test_axis_permutation_invariance():
    rng = np.random.default_rng(5)
    fa = random_mask(rng, (5, 6, 7))
    fb = random_mask(rng, (5, 6, 7))
    sp = Spacing(0.5, 1.5, 2.5)
    perm = (1, 2, 0)
    sp_perm = Spacing(*(np.asarray(sp.as_tuple())[list(perm)]))
    a, b = _mask(fa, sp), _mask(fb, sp)
    ap = _mask(fa.transpose(perm), sp_perm)
    bp = _mask(fb.transpose(perm), sp_perm)
    assert dice_score(ap, bp) == dice_score(a, b)
    assert hausdorff(ap, bp, sp_perm) == pytest.approx(hausdorff(a, b, sp), abs=1e-9)
    assert asd(ap, bp, sp_perm) == pytest.approx(asd(a, b, sp), abs=1e-9)


def test_aggregate_single_row():
    report = aggregate([CaseMetrics("c1", 80.0, 3.0, 1.0)])
    assert report.mean["dice_pct"] == 80.0
    assert report.std["dice_pct"] == 0.0


def test_aggregate_hand_values():
    rows = [CaseMetrics("c1", 80.0, 2.0, 1.0), CaseMetrics("c2", 90.0, 4.0, 3.0)]
    report = aggregate(rows)
    assert report.mean["dice_pct"] == 85.0
    assert report.std["dice_pct"] == 5.0
    assert report.mean["hd_mm"] == 3.0


def test_aggregate_empty_error():
    with pytest.raises(ValueError):
        aggregate([])


def test_report_layout():
    report = aggregate([CaseMetrics("c1", 80.0, 2.0, 1.0), CaseMetrics("c2", 90.0, 4.0, 3.0)])
    table = render_table(report)
    for token in ("Dice (%)", "HD", "ASD", "Mean", "Std", "c1", "c2"):
        assert token in table
    rows = render_rows_json(report).strip().splitlines()
    assert len(rows) == 3  # two cases + aggregate
    assert '"case_id": "c1"' in rows[0]
