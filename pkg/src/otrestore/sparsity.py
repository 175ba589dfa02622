"""Frequency-domain sparsity diagnostics for degradation residuals.

Given degraded-clean pairs, histogram the magnitudes of the unitary DFT
of the residuals (averaged per pair), and quantify the tail behavior by
fitting a generalized-Gaussian shape parameter: gamma = 2 is Gaussian,
gamma = 1 Laplacian, gamma < 1 heavy-tailed/sparse.
"""

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .spectral import SPECTRUM_NORMALIZATION, channels, check_image, dft2

GAMMA_LO = 0.05
GAMMA_HI = 10.0
GAMMA_TOL = 1e-6
MIN_EFFECTIVE_SAMPLES = 100


@dataclass
class Histogram:
    bin_edges: np.ndarray          # len nbins+1, ascending
    counts: np.ndarray             # len nbins, averaged over the pair count
    pair_count: int
    overflow: float = 0.0          # averaged mass beyond the last edge
    normalization: str = SPECTRUM_NORMALIZATION
    metadata: dict = field(default_factory=dict)

    def to_csv(self):
        lines = ["bin_lo,bin_hi,count"]
        for lo, hi, c in zip(self.bin_edges[:-1], self.bin_edges[1:], self.counts):
            lines.append(f"{lo!r},{hi!r},{c!r}")
        return "\n".join(lines) + "\n"

    def total_mass(self):
        return float(self.counts.sum() + self.overflow)


@dataclass
class GGFit:
    alpha: float                   # scale
    gamma: float                   # shape; < 1 indicates heavy tails
    diagnostics: dict = field(default_factory=dict)

    def to_json(self, **kwargs):
        kwargs.setdefault("sort_keys", True)
        return json.dumps(
            {"alpha": self.alpha, "gamma": self.gamma, "diagnostics": self.diagnostics},
            **kwargs,
        )


def residual_spectrum_histogram(pairs, nbins=200, max_magnitude=None, log_bins=False):
    """Histogram of residual spectrum magnitudes over degraded-clean pairs.

    Counts are divided by the number of pairs, so the total mass equals
    H*W*C per pair (minus any clipped overflow, which is reported).
    """
    if len(pairs) == 0:
        raise ValueError("need at least one degraded-clean pair")
    mags = []
    shape0 = None
    for k, (deg, clean) in enumerate(pairs):
        deg = check_image(deg, f"pair[{k}].degraded")
        clean = check_image(clean, f"pair[{k}].clean")
        if deg.shape != clean.shape:
            raise ValueError(
                f"pair[{k}]: shape mismatch {deg.shape} vs {clean.shape}"
            )
        if shape0 is None:
            shape0 = deg.shape
        elif deg.shape != shape0:
            raise ValueError(f"pair[{k}]: shape {deg.shape} differs from {shape0}")
        for plane in channels(deg - clean):
            mags.append(np.abs(dft2(plane)).ravel())
    mags = np.concatenate(mags)
    L = len(pairs)

    top = float(np.max(mags)) if max_magnitude is None else float(max_magnitude)
    top = max(top, np.finfo(float).tiny)
    if log_bins:
        positive = mags[mags > 0]
        lo = float(np.min(positive)) if positive.size else top * 1e-12
        edges = np.geomspace(max(lo, top * 1e-12), top, nbins + 1)
        edges[0] = 0.0  # first bin absorbs zeros
    else:
        edges = np.linspace(0.0, top, nbins + 1)
    counts, _ = np.histogram(np.minimum(mags, top) if max_magnitude is None else mags,
                             bins=edges)
    overflow = float(np.sum(mags > edges[-1]))
    return Histogram(
        bin_edges=edges,
        counts=counts.astype(np.float64) / L,
        pair_count=L,
        overflow=overflow / L,
        metadata={
            "nbins": int(nbins),
            "includes_dc": True,
            "log_bins": bool(log_bins),
            "max_magnitude": top,
        },
    )


def _gg_moment_ratio(gamma):
    """E|x| / sqrt(E x^2) for the generalized Gaussian with shape gamma."""
    return float(np.exp(
        gammaln(2.0 / gamma) - 0.5 * (gammaln(1.0 / gamma) + gammaln(3.0 / gamma))
    ))


def fit_generalized_gaussian(samples=None, histogram=None):
    """Fit (alpha, gamma) by matching the moment ratio E|x|/sqrt(E x^2).

    The ratio is monotone in gamma on [GAMMA_LO, GAMMA_HI]; bisection
    solves it to GAMMA_TOL.  Accepts raw samples (interpreted as
    magnitudes of a symmetric variable) or a Histogram, whose bin centers
    weighted by counts supply the moments.
    """
    if (samples is None) == (histogram is None):
        raise ValueError("provide exactly one of samples or histogram")
    if samples is not None:
        x = np.abs(np.asarray(samples, dtype=np.float64).ravel())
        if x.size < MIN_EFFECTIVE_SAMPLES:
            raise ValueError(f"need >= {MIN_EFFECTIVE_SAMPLES} samples, got {x.size}")
        m1 = float(np.mean(x))
        m2 = float(np.mean(x * x))
        effective = x.size
    else:
        centers = 0.5 * (histogram.bin_edges[:-1] + histogram.bin_edges[1:])
        w = histogram.counts
        total = float(w.sum())
        effective = total * histogram.pair_count
        if effective < MIN_EFFECTIVE_SAMPLES:
            raise ValueError(
                f"need >= {MIN_EFFECTIVE_SAMPLES} effective samples, got {effective:.0f}"
            )
        m1 = float(np.dot(w, centers) / total)
        m2 = float(np.dot(w, centers * centers) / total)
    if m2 <= 0.0:
        raise ValueError("all samples are zero; shape parameter undefined")

    ratio = m1 / np.sqrt(m2)
    lo, hi = GAMMA_LO, GAMMA_HI
    clipped = None
    if ratio <= _gg_moment_ratio(lo):
        gamma, clipped = lo, "low"
    elif ratio >= _gg_moment_ratio(hi):
        gamma, clipped = hi, "high"
    else:
        while hi - lo > GAMMA_TOL:
            mid = 0.5 * (lo + hi)
            if _gg_moment_ratio(mid) < ratio:
                lo = mid
            else:
                hi = mid
        gamma = 0.5 * (lo + hi)
    alpha = float(np.sqrt(m2 * np.exp(gammaln(1.0 / gamma) - gammaln(3.0 / gamma))))
    return GGFit(
        alpha=alpha,
        gamma=float(gamma),
        diagnostics={
            "mean_abs": m1,
            "mean_square": m2,
            "moment_ratio": ratio,
            "effective_samples": float(effective),
            "method": "moment-ratio-bisection",
            "clipped": clipped,
        },
    )
