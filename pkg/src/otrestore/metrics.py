"""Distortion metrics: PSNR and SSIM."""

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import correlate

from .spectral import channels, check_image

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03


def psnr(x, ref, peak=1.0):
    """10 log10(peak^2 / MSE); returns inf for identical images."""
    x = check_image(x, "x")
    ref = check_image(ref, "ref")
    if x.shape != ref.shape:
        raise ValueError(f"shape mismatch {x.shape} vs {ref.shape}")
    mse = float(np.mean((x - ref) ** 2))
    if mse == 0.0:
        return float("inf")
    return float(10.0 * np.log10(peak * peak / mse))


def _gaussian_window(size, sigma):
    r = np.arange(size) - (size - 1) / 2.0
    g = np.exp(-(r * r) / (2.0 * sigma * sigma))
    k = np.outer(g, g)
    return k / k.sum()


def _ssim_single(x, ref, peak):
    win = _gaussian_window(SSIM_WINDOW, SSIM_SIGMA)
    c1 = (SSIM_K1 * peak) ** 2
    c2 = (SSIM_K2 * peak) ** 2
    # symmetric boundary: each local window sees the edge-reflected image
    f = lambda im: correlate(im, win, mode="reflect")
    mu_x, mu_r = f(x), f(ref)
    var_x = f(x * x) - mu_x * mu_x
    var_r = f(ref * ref) - mu_r * mu_r
    cov = f(x * ref) - mu_x * mu_r
    num = (2 * mu_x * mu_r + c1) * (2 * cov + c2)
    den = (mu_x ** 2 + mu_r ** 2 + c1) * (var_x + var_r + c2)
    return float(np.mean(num / den))


def ssim(x, ref, peak=1.0):
    """Mean local SSIM, 11x11 Gaussian window sigma 1.5; color averages channels."""
    x = check_image(x, "x")
    ref = check_image(ref, "ref")
    if x.shape != ref.shape:
        raise ValueError(f"shape mismatch {x.shape} vs {ref.shape}")
    if x.shape[0] < SSIM_WINDOW or x.shape[1] < SSIM_WINDOW:
        raise ValueError(
            f"image {x.shape[0]}x{x.shape[1]} smaller than the {SSIM_WINDOW}x{SSIM_WINDOW} window"
        )
    vals = [_ssim_single(cx, cr, peak) for cx, cr in zip(channels(x), channels(ref))]
    return float(np.mean(vals))


@dataclass
class MetricReport:
    names: list
    psnr_values: list
    ssim_values: list
    perceptual_metrics_available: bool = False
    extra: dict = field(default_factory=dict)

    @property
    def mean_psnr(self):
        return float(np.mean(self.psnr_values))

    @property
    def mean_ssim(self):
        return float(np.mean(self.ssim_values))

    def to_dict(self):
        def enc(v):
            return "inf" if np.isinf(v) else float(v)

        return {
            "per_image": [
                {"name": n, "psnr_db": enc(p), "ssim": float(s)}
                for n, p, s in zip(self.names, self.psnr_values, self.ssim_values)
            ],
            "mean": {"psnr_db": enc(self.mean_psnr), "ssim": self.mean_ssim},
            "perceptual_metrics_available": self.perceptual_metrics_available,
            **self.extra,
        }

    def to_json(self, **kwargs):
        kwargs.setdefault("sort_keys", True)
        kwargs.setdefault("indent", 2)
        return json.dumps(self.to_dict(), **kwargs)


def evaluate_pairs(pairs, names=None):
    """PSNR/SSIM per (restored, reference) pair plus the means."""
    if not pairs:
        raise ValueError("no image pairs to evaluate")
    names = names or [f"image_{k}" for k in range(len(pairs))]
    ps, ss = [], []
    for x, ref in pairs:
        ps.append(psnr(x, ref))
        ss.append(ssim(x, ref))
    return MetricReport(list(names), ps, ss)
