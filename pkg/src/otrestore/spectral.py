"""Unitary 2-D discrete Fourier transform and image plumbing.

Images are numpy float64 arrays of shape (H, W) for grayscale or
(H, W, 3) for color, nominally valued in [0, 1] (intermediates may
exceed).  Spectra are complex128 arrays of shape (H, W).

The transform is unitary: forward and inverse are each scaled by
1/sqrt(H*W), so Parseval holds exactly and the frequency-domain l2 cost
of a residual equals its spatial l2 cost.  Color images are transformed
per channel.
"""

import numpy as np

SPECTRUM_NORMALIZATION = "unitary"


def check_image(x, name="image"):
    """Validate an image array; returns it as float64."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 2:
        pass
    elif x.ndim == 3 and x.shape[2] in (1, 3):
        if x.shape[2] == 1:
            x = x[:, :, 0]
    else:
        raise ValueError(f"{name}: expected shape (H, W) or (H, W, 1|3), got {x.shape}")
    if x.shape[0] < 1 or x.shape[1] < 1:
        raise ValueError(f"{name}: empty dimensions {x.shape}")
    if not np.all(np.isfinite(x)):
        bad = np.argwhere(~np.isfinite(x))[0]
        raise ValueError(f"{name}: non-finite value at pixel {tuple(bad)}")
    return x


def channels(x):
    """Iterate over the single-channel planes of an image."""
    if x.ndim == 2:
        yield x
    else:
        for c in range(x.shape[2]):
            yield x[:, :, c]


def dft2(image):
    """Unitary forward 2-D DFT of a single-channel image."""
    x = check_image(image)
    if x.ndim != 2:
        raise ValueError("dft2 operates on a single channel; loop over channels(image)")
    return np.fft.fft2(x, norm="ortho")


def hermitian_defect(spectrum):
    """Max deviation of coeff(u,v) from conj(coeff(-u,-v))."""
    s = np.asarray(spectrum, dtype=np.complex128)
    flipped = np.conj(np.roll(np.flip(s, axis=(0, 1)), shift=(1, 1), axis=(0, 1)))
    return float(np.max(np.abs(s - flipped))) if s.size else 0.0


def idft2(spectrum, tol=1e-6):
    """Unitary inverse 2-D DFT; requires a Hermitian-symmetric spectrum.

    Rejects spectra whose Hermitian defect exceeds ``tol`` since they do
    not correspond to any real image.
    """
    s = np.asarray(spectrum, dtype=np.complex128)
    if s.ndim != 2 or s.shape[0] < 1 or s.shape[1] < 1:
        raise ValueError(f"spectrum: expected 2-D complex array, got shape {s.shape}")
    if not np.all(np.isfinite(s.real)) or not np.all(np.isfinite(s.imag)):
        raise ValueError("spectrum: non-finite coefficients")
    defect = hermitian_defect(s)
    if defect > tol:
        raise ValueError(
            f"spectrum is not Hermitian-symmetric (defect {defect:.3e} > {tol:.1e}); "
            "inverse would not be a real image"
        )
    return np.real(np.fft.ifft2(s, norm="ortho"))


def hermitian_project(spectrum):
    """Nearest Hermitian-symmetric spectrum (average with flipped conjugate)."""
    s = np.asarray(spectrum, dtype=np.complex128)
    flipped = np.conj(np.roll(np.flip(s, axis=(0, 1)), shift=(1, 1), axis=(0, 1)))
    return 0.5 * (s + flipped)


def extract_patches(image, patch, stride):
    """Top-left-anchored patches in row-major order.

    Yields floor((H-patch)/stride + 1) * floor((W-patch)/stride + 1)
    patches; with stride == patch they tile the cropped image exactly.
    """
    x = check_image(image)
    patch = int(patch)
    stride = int(stride)
    if patch < 1 or stride < 1:
        raise ValueError("patch and stride must be positive")
    h, w = x.shape[0], x.shape[1]
    if patch > h or patch > w:
        raise ValueError(f"patch {patch} exceeds image dimensions {h}x{w}")
    out = []
    for i in range(0, h - patch + 1, stride):
        for j in range(0, w - patch + 1, stride):
            out.append(x[i:i + patch, j:j + patch, ...].copy())
    return out
