import numpy as np
import pytest

from otrestore.rng import Rng
from otrestore.spectral import (
    channels,
    dft2,
    extract_patches,
    hermitian_defect,
    hermitian_project,
    idft2,
)


def dft2_direct(x):
    """O(N^2) reference DFT, unitary normalization, built from first principles."""
    h, w = x.shape
    iu = np.outer(np.arange(h), np.arange(h))
    jv = np.outer(np.arange(w), np.arange(w))
    eh = np.exp(-2j * np.pi * iu / h)
    ew = np.exp(-2j * np.pi * jv / w)
    return eh @ x.astype(complex) @ ew.T / np.sqrt(h * w)


def test_delta_image_flat_spectrum():
    x = np.zeros((4, 4))
    x[0, 0] = 1.0
    s = dft2(x)
    assert np.allclose(s, 0.25 + 0j, atol=1e-12)


def test_constant_image_dc_only():
    c = 0.37
    s = dft2(np.full((8, 8), c))
    assert abs(s[0, 0] - 8 * c) < 1e-12
    s[0, 0] = 0
    assert np.max(np.abs(s)) < 1e-12


def test_round_trip_identity():
    rng = Rng(7)
    x = rng.uniform((16, 16))
    back = idft2(dft2(x))
    assert np.max(np.abs(back - x)) < 1e-10


@pytest.mark.parametrize("shape", [(1, 1), (3, 5), (6, 10), (7, 7), (12, 12), (64, 64)])
def test_matches_direct_dft_oracle(shape):
    rng = Rng(shape[0] * 100 + shape[1])
    x = rng.uniform(shape)
    assert np.max(np.abs(dft2(x) - dft2_direct(x))) < 1e-9


@pytest.mark.parametrize("shape", [(8, 8), (5, 9), (64, 64)])
def test_parseval(shape):
    rng = Rng(11)
    x = rng.uniform(shape) - 0.5
    lhs = np.sum(np.abs(dft2(x)) ** 2)
    rhs = np.sum(x * x)
    assert abs(lhs - rhs) <= 1e-9 * max(1.0, rhs)


def test_linearity():
    rng = Rng(3)
    x, y = rng.uniform((9, 9)), rng.uniform((9, 9))
    a, b = 1.7, -0.4
    lhs = dft2(a * x + b * y)
    rhs = a * dft2(x) + b * dft2(y)
    assert np.max(np.abs(lhs - rhs)) < 1e-10


def test_hermitian_symmetry_of_real_input():
    rng = Rng(5)
    for shape in [(4, 4), (5, 7), (16, 16)]:
        assert hermitian_defect(dft2(rng.uniform(shape))) < 1e-9


def test_idft2_rejects_asymmetric_spectrum():
    s = np.zeros((4, 4), dtype=complex)
    s[1, 0] = 1.0 + 1.0j  # conjugate partner at (3, 0) missing
    with pytest.raises(ValueError, match="Hermitian"):
        idft2(s)


def test_idft2_zero_and_dc():
    assert np.max(np.abs(idft2(np.zeros((5, 5), dtype=complex)))) == 0.0
    s = np.zeros((8, 8), dtype=complex)
    c = 0.3
    s[0, 0] = 8 * c
    assert np.allclose(idft2(s), c, atol=1e-12)


def test_hermitian_project_idempotent_and_fixes_defect():
    rng = Rng(9)
    s = rng.uniform((6, 6)) + 1j * rng.uniform((6, 6))
    p = hermitian_project(s)
    assert hermitian_defect(p) < 1e-12
    assert np.max(np.abs(hermitian_project(p) - p)) < 1e-15


def test_dft2_rejects_non_finite():
    x = np.ones((4, 4))
    x[2, 2] = np.nan
    with pytest.raises(ValueError, match="non-finite"):
        dft2(x)


def test_patch_counts():
    img = Rng(1).uniform((8, 8))
    assert len(extract_patches(img, 8, 1)) == 1
    assert np.array_equal(extract_patches(img, 8, 1)[0], img)
    quads = extract_patches(img, 4, 4)
    assert len(quads) == 4
    assert np.array_equal(quads[0], img[:4, :4])
    assert np.array_equal(quads[3], img[4:, 4:])
    img9 = Rng(2).uniform((9, 9))
    assert len(extract_patches(img9, 4, 2)) == 9


def test_patches_tile_exactly():
    img = Rng(3).uniform((12, 10))
    patches = extract_patches(img, 5, 5)
    rows = [np.hstack(patches[i * 2:(i + 1) * 2]) for i in range(2)]
    assert np.array_equal(np.vstack(rows), img[:10, :10])


def test_patch_too_large_rejected():
    with pytest.raises(ValueError, match="exceeds"):
        extract_patches(np.zeros((4, 4)), 5, 1)


def test_channels_iteration():
    rgb = Rng(4).uniform((6, 6, 3))
    planes = list(channels(rgb))
    assert len(planes) == 3
    assert np.array_equal(planes[1], rgb[:, :, 1])
    assert len(list(channels(rgb[:, :, 0]))) == 1
