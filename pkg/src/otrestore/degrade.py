"""Synthetic clean scenes and degradations with frequency-sparse structure.

Every generator is a pure function of its inputs and a 64-bit seed (via
the package's counter-based stream), so datasets regenerate bit-identically.
Degradations are additive in memory: degraded - clean == residual exactly;
clipping to [0, 1] happens only when images are written to disk.
"""

import numpy as np

from .rng import Rng
from .spectral import check_image, dft2, idft2

CLEAN_SCENES = ("piecewise-constant", "smooth-gradient")


def gen_clean(shape, scene="piecewise-constant", seed=0):
    """Random clean scene: overlapping rectangles or a bounded linear ramp."""
    h, w = int(shape[0]), int(shape[1])
    if h < 1 or w < 1:
        raise ValueError(f"bad shape {shape}")
    rng = Rng(seed)
    if scene == "piecewise-constant":
        img = np.full((h, w), rng.uniform(None, 0.1, 0.9))
        nrect = 3 + rng.integers(6)  # 3..8 rectangles
        for _ in range(nrect):
            i0 = rng.integers(h)
            j0 = rng.integers(w)
            hh = 1 + rng.integers(max(1, h - i0))
            ww = 1 + rng.integers(max(1, w - j0))
            img[i0:i0 + hh, j0:j0 + ww] = rng.uniform(None, 0.05, 0.95)
        return img
    if scene == "smooth-gradient":
        slope = 0.75 / (h + w)  # keeps the full ramp inside [0, 1]
        gx = rng.uniform(None, -slope, slope)
        gy = rng.uniform(None, -slope, slope)
        ii, jj = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
        ramp = gy * ii + gx * jj
        lo, hi = float(ramp.min()), float(ramp.max())
        offset = rng.uniform(None, -lo, 1.0 - hi)
        return ramp + offset
    raise ValueError(f"unknown scene model {scene!r} (want one of {CLEAN_SCENES})")


def _half_plane_frequencies(h, w):
    """One representative (u, v) per conjugate pair, excluding DC."""
    reps = []
    for u in range(h):
        for v in range(w):
            if u == 0 and v == 0:
                continue
            cu, cv = (-u) % h, (-v) % w
            if (u, v) <= (cu, cv):
                reps.append((u, v))
    return reps


def draw_frequency_set(shape, count, seed):
    """Deterministic sample of `count` distinct conjugate-pair representatives."""
    h, w = shape
    reps = _half_plane_frequencies(h, w)
    if count > len(reps):
        raise ValueError(f"cannot draw {count} pairs from {len(reps)} available")
    perm = Rng(seed).shuffle_index(len(reps))
    return [reps[p] for p in perm[:count]]


def apply_freq_sparse_noise(image, count, amplitude, seed, freqs=None):
    """Additive residual supported on exactly `count` conjugate frequency pairs.

    Each selected frequency gets a coefficient of magnitude ``amplitude``
    (unitary scale) with a random phase; the conjugate partner mirrors it
    so the spatial residual is real.  Self-conjugate frequencies receive a
    real +-amplitude coefficient, reducing the nonzero count by one.
    ``freqs`` pins the support explicitly, e.g. to share one degradation
    pattern across a whole dataset while phases vary per image.
    """
    x = check_image(image)
    if x.ndim != 2:
        raise ValueError("frequency-sparse noise operates on single-channel images")
    h, w = x.shape
    count = int(count)
    if count < 0:
        raise ValueError("count must be >= 0")
    if count > h * w // 2:
        raise ValueError(f"count {count} exceeds {h * w // 2} available pairs")
    rng = Rng(seed)
    chosen = draw_frequency_set((h, w), count, rng.spawn(1).seed) if freqs is None else list(freqs)
    if len(chosen) != count:
        raise ValueError(f"freqs must list {count} frequency pairs")
    spec = np.zeros((h, w), dtype=complex)
    for (u, v) in chosen:
        cu, cv = (-u) % h, (-v) % w
        if (cu, cv) == (u, v):  # self-conjugate: real coefficient
            spec[u, v] = amplitude * (1.0 if rng.uniform() < 0.5 else -1.0)
        else:
            phase = rng.uniform(None, 0.0, 2.0 * np.pi)
            spec[u, v] = amplitude * np.exp(1j * phase)
            spec[cu, cv] = np.conj(spec[u, v])
    degraded = x + idft2(spec)
    # return degraded - x (not the raw inverse transform) so the additive
    # identity holds bit-exactly in floating point
    return degraded, degraded - x


def apply_rain_streaks(image, count, angle_deg, length, intensity, seed):
    """Additive anti-aliased line segments; residual capped at `intensity`.

    The cap keeps degraded within [0, 1 + intensity] for in-range input.
    """
    x = check_image(image)
    if x.ndim != 2:
        raise ValueError("rain streaks operate on single-channel images")
    if length <= 0:
        raise ValueError("streak length must be positive")
    h, w = x.shape
    rng = Rng(seed)
    theta = np.deg2rad(angle_deg)
    di, dj = np.cos(theta), np.sin(theta)  # angle 0 = vertical streak
    ii, jj = np.meshgrid(np.arange(h, dtype=float), np.arange(w, dtype=float),
                         indexing="ij")
    coverage = np.zeros((h, w))
    for _ in range(int(count)):
        ci = rng.uniform(None, 0.0, h - 1.0)
        cj = rng.uniform(None, 0.0, w - 1.0)
        half = length / 2.0
        # distance from each pixel center to the segment
        pi_, pj_ = ii - ci, jj - cj
        t = np.clip(pi_ * di + pj_ * dj, -half, half)
        dist = np.hypot(pi_ - t * di, pj_ - t * dj)
        coverage += np.clip(1.0 - dist, 0.0, 1.0)
    degraded = x + intensity * np.minimum(coverage, 1.0)
    return degraded, degraded - x


def apply_haze(image, t, A):
    """Uniform atmospheric veil: degraded = t * image + (1 - t) * A."""
    x = check_image(image)
    t = float(t)
    A = float(A)
    if not (0.0 < t <= 1.0):
        raise ValueError(f"transmission t must lie in (0, 1], got {t}")
    if not (0.0 <= A <= 1.0):
        raise ValueError(f"airlight A must lie in [0, 1], got {A}")
    degraded = t * x + (1.0 - t) * A
    return degraded, degraded - x


def _keys_kernel(s):
    """Cubic convolution kernel with a = -0.5 (Catmull-Rom family)."""
    s = np.abs(s)
    out = np.zeros_like(s)
    near = s <= 1.0
    far = (s > 1.0) & (s < 2.0)
    out[near] = (1.5 * s[near] - 2.5) * s[near] ** 2 + 1.0
    out[far] = ((-0.5 * s[far] + 2.5) * s[far] - 4.0) * s[far] + 2.0
    return out


def _reflect_index(idx, n):
    """Symmetric (half-sample) reflection of arbitrary integer indices."""
    idx = np.asarray(idx)
    period = 2 * n
    idx = np.mod(idx, period)
    return np.where(idx >= n, period - 1 - idx, idx)


def _resize_matrix(n_in, factor):
    """Row-stochastic 1-D bicubic resampling matrix (antialiased on shrink)."""
    n_out = int(round(n_in * factor))
    scale = min(factor, 1.0)  # widen the kernel when shrinking
    # center-aligned sample positions in input coordinates
    pos = (np.arange(n_out) + 0.5) / factor - 0.5
    support = int(np.ceil(2.0 / scale))
    offsets = np.arange(-support + 1, support + 1)
    base = np.floor(pos).astype(int)
    idx = base[:, None] + offsets[None, :]
    weights = _keys_kernel((pos[:, None] - idx) * scale)
    weights /= weights.sum(axis=1, keepdims=True)  # exact partition of unity
    src = _reflect_index(idx, n_in)
    M = np.zeros((n_out, n_in))
    for r in range(n_out):
        np.add.at(M[r], src[r], weights[r])
    return M


def bicubic_resize(image, factor):
    """Separable bicubic resampling by a factor in {1/4, 1/2, 1, 2, 4}.

    Downscales require dimensions divisible by the inverse factor.
    """
    x = check_image(image)
    if factor not in (0.25, 0.5, 1, 1.0, 2, 2.0, 4, 4.0):
        raise ValueError(f"factor {factor} not in {{1/4, 1/2, 1, 2, 4}}")
    factor = float(factor)
    if factor == 1.0:
        return x.copy()
    h, w = x.shape[0], x.shape[1]
    if factor < 1.0:
        den = int(round(1.0 / factor))
        if h % den or w % den:
            raise ValueError(
                f"dimensions {h}x{w} not divisible by {den} for factor {factor}"
            )
    mr = _resize_matrix(h, factor)
    mc = _resize_matrix(w, factor)
    if x.ndim == 2:
        return mr @ x @ mc.T
    return np.stack([mr @ x[:, :, c] @ mc.T for c in range(x.shape[2])], axis=2)


def apply_sr_degradation(image, sr_factor, seed=0):
    """Down-then-up bicubic resampling: loses high-frequency content."""
    if sr_factor not in (2, 4):
        raise ValueError(f"SR factor must be 2 or 4, got {sr_factor}")
    low = bicubic_resize(image, 1.0 / sr_factor)
    degraded = bicubic_resize(low, float(sr_factor))
    return degraded, degraded - check_image(image)
