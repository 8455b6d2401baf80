import numpy as np
import pytest

from conftest import brute_edt, random_mask, random_spacing
from laseg import DegenerateInputError, Spacing, Volume, edt, signed_boundary_distance
from laseg.boundary import boundary_mask

SP = Spacing(1.0, 1.0, 1.0)
ANISO = Spacing(0.625, 0.625, 2.5)


def _mask(data, spacing=SP):
    return Volume(np.asarray(data, dtype=np.float32), spacing, "label")


def test_collinear_distances():
    m = _mask(np.array([0.0, 1.0, 1.0]).reshape(3, 1, 1))
    d = edt(m, SP).data.ravel(order="F")
    np.testing.assert_allclose(d, [0.0, 1.0, 2.0], atol=1e-6)


def test_z_spacing_respected():
    m = _mask(np.array([0.0, 1.0, 1.0, 0.0]).reshape(1, 1, 4), ANISO)
    d = edt(m, ANISO).data.ravel(order="F")
    np.testing.assert_allclose(d, [0.0, 2.5, 2.5, 0.0], atol=1e-6)


def test_matches_brute_force():
    rng = np.random.default_rng(11)
    for _ in range(25):
        dims = tuple(rng.integers(3, 9, size=3))
        fg = random_mask(rng, dims, p_fg=float(rng.uniform(0.2, 0.9)))
        if fg.all():
            fg[0, 0, 0] = False
        sp = random_spacing(rng)
        d = edt(_mask(fg, sp), sp).data.astype(np.float64)
        np.testing.assert_allclose(d, brute_edt(fg, sp), atol=1e-4)


def test_all_foreground_error():
    with pytest.raises(DegenerateInputError):
        edt(_mask(np.ones((3, 3, 3))), SP)


def test_background_is_zero():
    rng = np.random.default_rng(2)
    fg = random_mask(rng, (8, 8, 4))
    d = edt(_mask(fg), SP).data
    assert np.all(d[~fg] == 0.0)


def test_lipschitz_in_physical_coordinates():
    rng = np.random.default_rng(5)
    fg = random_mask(rng, (10, 10, 5), p_fg=0.7)
    fg[0, 0, 0] = False
    sp = Spacing(0.8, 1.2, 2.0)
    d = edt(_mask(fg, sp), sp).data.astype(np.float64)
    pts = rng.integers(0, (10, 10, 5), size=(200, 3))
    qts = rng.integers(0, (10, 10, 5), size=(200, 3))
    phys = np.asarray(sp.as_tuple())
    for p, q in zip(pts, qts):
        lhs = abs(d[tuple(p)] - d[tuple(q)])
        rhs = np.linalg.norm((p - q) * phys)
        assert lhs <= rhs + 1e-5  # slack for float32 storage of the map


def test_axis_permutation_equivariance():
    rng = np.random.default_rng(9)
    fg = random_mask(rng, (6, 7, 8))
    fg[0, 0, 0] = False
    sp = Spacing(0.5, 1.5, 2.5)
    d = edt(_mask(fg, sp), sp).data
    perm = (2, 0, 1)
    sp_perm = Spacing(*(np.asarray(sp.as_tuple())[list(perm)]))
    d_perm = edt(_mask(fg.transpose(perm), sp_perm), sp_perm).data
    np.testing.assert_allclose(d_perm, d.transpose(perm), atol=1e-6)


def test_signed_adjacent_unit_step():
    band = np.zeros((5, 5, 1))
    band[2, :, 0] = 1.0
    d = signed_boundary_distance(_mask(band), SP).data
    assert d[1, 2, 0] == pytest.approx(1.0)
    assert d[3, 2, 0] == pytest.approx(1.0)
    assert d[0, 2, 0] == pytest.approx(2.0)
    # band voxels: nearest off-band one unit step away -> -(1 - 1) = 0
    assert d[2, 2, 0] == pytest.approx(0.0)


def test_signed_literal_formula_submillimeter():
    band = np.zeros((3, 1, 1))
    band[1, 0, 0] = 1.0
    band[2, 0, 0] = 1.0
    d = signed_boundary_distance(_mask(band, ANISO), ANISO).data.ravel(order="F")
    # off-band voxel adjacent to the band at 0.625 mm
    assert d[0] == pytest.approx(0.625)
    # band voxel one 0.625 mm step from off-band: -(0.625 - 1) = +0.375
    assert d[1] == pytest.approx(0.375)
    assert d[2] == pytest.approx(-(1.25 - 1.0))


def test_signed_voxel_mode():
    band = np.zeros((3, 1, 1))
    band[1, 0, 0] = 1.0
    band[2, 0, 0] = 1.0
    d = signed_boundary_distance(_mask(band, ANISO), ANISO, mode="voxel").data.ravel(order="F")
    np.testing.assert_allclose(d, [1.0, -0.0, -1.0], atol=1e-6)


def test_signed_matches_literal_oracle():
    rng = np.random.default_rng(21)
    for _ in range(10):
        fg = random_mask(rng, (12, 12, 4), p_fg=0.3)
        band_vol = boundary_mask(_mask(fg))
        band = band_vol.data > 0.5
        if not band.any() or band.all():
            continue
        sp = random_spacing(rng)
        d = signed_boundary_distance(_mask(band_vol.data, sp), sp).data.astype(np.float64)
        expected = np.where(band, -(brute_edt(band, sp) - 1.0), brute_edt(~band, sp))
        np.testing.assert_allclose(d, expected, atol=1e-4)


def test_signed_positive_away_from_band():
    fg = np.zeros((14, 14, 3))
    fg[5:9, 5:9, 1] = 1.0
    band = boundary_mask(_mask(fg))
    d = signed_boundary_distance(band, SP).data
    bandmask = band.data > 0.5
    assert np.all(d[~bandmask] > 0.0)


def test_signed_degenerate_inputs():
    with pytest.raises(DegenerateInputError):
        signed_boundary_distance(_mask(np.zeros((4, 4, 2))), SP)
    with pytest.raises(DegenerateInputError):
        signed_boundary_distance(_mask(np.ones((4, 4, 2))), SP)
