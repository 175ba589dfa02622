import numpy as np
import pytest
from scipy import stats

from otrestore.rng import Rng
from otrestore.sparsity import (
    GAMMA_HI,
    GAMMA_LO,
    _gg_moment_ratio,
    fit_generalized_gaussian,
    residual_spectrum_histogram,
)
from otrestore.spectral import dft2


def gg_samples(gamma, n, seed):
    """Sampling oracle: scipy's generalized normal distribution."""
    return stats.gennorm.rvs(beta=gamma, size=n, random_state=np.random.RandomState(seed))


class TestGGFit:
    def test_moment_ratio_gaussian_value(self):
        assert _gg_moment_ratio(2.0) == pytest.approx(np.sqrt(2 / np.pi), abs=1e-12)

    def test_moment_ratio_monotone(self):
        gammas = np.linspace(GAMMA_LO, GAMMA_HI, 50)
        vals = [_gg_moment_ratio(g) for g in gammas]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    @pytest.mark.parametrize(
        "gamma,lo,hi",
        [(0.6, 0.5, 0.7), (1.0, 0.93, 1.07), (2.0, 1.9, 2.1)],
    )
    def test_calibration_against_sampling_oracle(self, gamma, lo, hi):
        fit = fit_generalized_gaussian(gg_samples(gamma, 100_000, seed=42))
        assert lo <= fit.gamma <= hi

    def test_scale_recovered(self):
        # gennorm draws with scale s have E x^2 = s^2 G(3/g)/G(1/g), so the
        # fitted alpha should recover s itself
        x = gg_samples(2.0, 100_000, seed=7) * 0.25
        fit = fit_generalized_gaussian(x)
        assert fit.alpha == pytest.approx(0.25, rel=0.05)

    def test_scale_equivariance(self):
        x = gg_samples(0.8, 50_000, seed=3)
        f1 = fit_generalized_gaussian(x)
        f2 = fit_generalized_gaussian(7.5 * x)
        assert abs(f1.gamma - f2.gamma) < 1e-3
        assert f2.alpha == pytest.approx(7.5 * f1.alpha, rel=1e-3)

    def test_too_few_samples_rejected(self):
        with pytest.raises(ValueError, match="samples"):
            fit_generalized_gaussian(np.ones(50))

    def test_all_zero_rejected(self):
        with pytest.raises(ValueError, match="zero"):
            fit_generalized_gaussian(np.zeros(500))

    def test_histogram_input_path(self):
        x = np.abs(gg_samples(1.0, 100_000, seed=11))
        pairs = None
        edges = np.linspace(0, float(x.max()), 400)
        counts, _ = np.histogram(x, bins=edges)
        from otrestore.sparsity import Histogram

        h = Histogram(bin_edges=edges, counts=counts.astype(float), pair_count=1)
        fit = fit_generalized_gaussian(histogram=h)
        assert 0.9 <= fit.gamma <= 1.1


class TestResidualHistogram:
    def test_identical_pairs_single_zero_bin(self):
        img = Rng(1).uniform((8, 8))
        h = residual_spectrum_histogram([(img, img.copy())] * 3, nbins=16)
        assert h.counts[0] == 64.0
        assert np.sum(h.counts[1:]) == 0.0

    def test_delta_residual_uniform_magnitudes(self):
        clean = np.zeros((8, 8))
        deg = clean.copy()
        amp = 0.8
        deg[3, 5] += amp
        h = residual_spectrum_histogram([(deg, clean)], nbins=32)
        # all 64 magnitudes equal amp/8: exactly one occupied bin
        occupied = np.flatnonzero(h.counts)
        assert occupied.size == 1
        assert h.counts[occupied[0]] == 64.0
        lo, hi = h.bin_edges[occupied[0]], h.bin_edges[occupied[0] + 1]
        assert lo <= amp / 8 <= hi

    def test_mass_conservation_and_overflow(self):
        rng = Rng(5)
        pairs = [(rng.uniform((8, 8)), rng.uniform((8, 8))) for _ in range(4)]
        h = residual_spectrum_histogram(pairs, nbins=50)
        assert h.total_mass() == pytest.approx(64.0, abs=1e-9)
        clipped = residual_spectrum_histogram(pairs, nbins=50, max_magnitude=0.05)
        assert clipped.total_mass() == pytest.approx(64.0, abs=1e-9)
        assert clipped.overflow > 0

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValueError, match="mismatch"):
            residual_spectrum_histogram([(np.zeros((4, 4)), np.zeros((4, 5)))])

    def test_gaussian_residuals_match_magnitude_law(self):
        # Monte-Carlo oracle: the spectrum of iid N(0, sigma^2) noise has
        # complex-Gaussian coefficients, so magnitudes follow a Rayleigh
        # law with scale sigma/sqrt(2); compare empirical quantiles.
        sigma = 0.1
        rng = Rng(99)
        pairs = []
        for _ in range(30):
            clean = rng.uniform((16, 16))
            noise = rng.normal((16, 16), sigma=sigma)
            pairs.append((clean + noise, clean))
        h = residual_spectrum_histogram(pairs, nbins=120)
        centers = 0.5 * (h.bin_edges[:-1] + h.bin_edges[1:])
        cdf = np.cumsum(h.counts) / h.counts.sum()

        oracle = np.random.RandomState(7)
        sim = np.abs(
            sigma / np.sqrt(2) * (oracle.randn(10_000) + 1j * oracle.randn(10_000))
        )
        for quant in (0.25, 0.5, 0.75, 0.9):
            xq = float(np.quantile(sim, quant))
            got = float(np.interp(xq, centers, cdf))
            assert abs(got - quant) < 0.05

    def test_csv_format(self):
        img = Rng(2).uniform((4, 4))
        h = residual_spectrum_histogram([(img, img * 0.9)], nbins=4)
        lines = h.to_csv().strip().split("\n")
        assert lines[0] == "bin_lo,bin_hi,count"
        assert len(lines) == 5

    def test_metadata_records_layout(self):
        img = Rng(3).uniform((4, 4))
        h = residual_spectrum_histogram([(img, img * 0.5)], nbins=10)
        assert h.metadata["includes_dc"] is True
        assert h.normalization == "unitary"


class TestQualitativeSparsityFinding:
    def test_sparse_degradation_fits_heavy_tailed(self):
        from otrestore.degrade import apply_freq_sparse_noise, gen_clean

        pairs = []
        for s in range(12):
            clean = gen_clean((32, 32), "piecewise-constant", seed=s)
            deg, _ = apply_freq_sparse_noise(clean, count=6, amplitude=1.0, seed=1000 + s)
            pairs.append((deg, clean))
        mags = np.concatenate(
            [np.abs(dft2(d - c)).ravel() for d, c in pairs]
        )
        fit = fit_generalized_gaussian(mags)
        assert fit.gamma < 1.0

    def test_dense_gaussian_degradation_fits_near_gaussian(self):
        rng = Rng(17)
        mags = []
        for _ in range(12):
            clean = rng.uniform((32, 32))
            noise = rng.normal((32, 32), sigma=0.1)
            mags.append(np.abs(dft2(noise)).ravel())
        # signed surrogate: magnitudes of a complex Gaussian spectrum have
        # the moment ratio of a 2-D Gaussian; use components instead
        comps = []
        for _ in range(12):
            spec = dft2(rng.normal((32, 32), sigma=0.1))
            comps.extend([spec.real.ravel(), spec.imag.ravel()])
        fit = fit_generalized_gaussian(np.concatenate(comps))
        assert 1.7 <= fit.gamma <= 2.3
