import json

import numpy as np
import pytest

from otrestore.metrics import MetricReport, evaluate_pairs, psnr, ssim
from otrestore.rng import Rng


class TestPsnr:
    def test_identical_images_infinite(self):
        img = Rng(1).uniform((16, 16))
        assert psnr(img, img.copy()) == float("inf")

    def test_known_mse_values(self):
        ref = np.zeros((10, 10))
        x = np.full((10, 10), 0.1)  # MSE = 0.01
        assert psnr(x, ref) == pytest.approx(20.0, abs=1e-12)
        x = np.full((10, 10), 0.01)  # MSE = 1e-4
        assert psnr(x, ref) == pytest.approx(40.0, abs=1e-12)

    def test_symmetry(self):
        rng = Rng(2)
        a, b = rng.uniform((12, 12)), rng.uniform((12, 12))
        assert psnr(a, b) == pytest.approx(psnr(b, a), abs=1e-12)

    def test_monotone_in_noise_amplitude(self):
        rng = Rng(3)
        ref = rng.uniform((16, 16))
        noise = rng.normal((16, 16))
        vals = [psnr(ref + amp * noise, ref) for amp in (0.01, 0.02, 0.05, 0.1, 0.2)]
        assert all(b < a for a, b in zip(vals, vals[1:]))

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError, match="mismatch"):
            psnr(np.zeros((4, 4)), np.zeros((5, 4)))


class TestSsim:
    def test_identical_images_one(self):
        img = Rng(4).uniform((16, 16))
        assert ssim(img, img.copy()) == pytest.approx(1.0, abs=1e-12)

    def test_constant_images_closed_form(self):
        a, b = 0.3, 0.6
        c1 = (0.01 * 1.0) ** 2
        expected = (2 * a * b + c1) / (a * a + b * b + c1)
        got = ssim(np.full((16, 16), a), np.full((16, 16), b))
        assert got == pytest.approx(expected, abs=1e-12)

    def test_contrast_inversion_negative(self):
        # mean-centered sign flip of a structured pattern
        jj = np.arange(32)
        ref = 0.5 + 0.4 * np.sin(2 * np.pi * 3 * jj / 32)[None, :] * np.ones((32, 1))
        x = 1.0 - ref
        assert ssim(x, ref) < 0.0

    def test_too_small_image_rejected(self):
        with pytest.raises(ValueError, match="window"):
            ssim(np.zeros((8, 8)), np.zeros((8, 8)))

    def test_symmetry(self):
        rng = Rng(5)
        a, b = rng.uniform((16, 16)), rng.uniform((16, 16))
        assert ssim(a, b) == pytest.approx(ssim(b, a), abs=1e-12)

    def test_color_averages_channels(self):
        rng = Rng(6)
        a = rng.uniform((16, 16, 3))
        b = a.copy()
        b[:, :, 0] = rng.uniform((16, 16))
        per = np.mean([ssim(a[:, :, c], b[:, :, c]) for c in range(3)])
        assert ssim(a, b) == pytest.approx(per, abs=1e-12)


class TestReport:
    def test_mean_matches_per_image(self):
        rng = Rng(7)
        pairs = [(rng.uniform((16, 16)), rng.uniform((16, 16))) for _ in range(3)]
        rep = evaluate_pairs(pairs)
        assert rep.mean_psnr == pytest.approx(np.mean(rep.psnr_values), abs=1e-12)
        assert rep.mean_ssim == pytest.approx(np.mean(rep.ssim_values), abs=1e-12)

    def test_infinity_serialized_as_string(self):
        img = Rng(8).uniform((16, 16))
        rep = evaluate_pairs([(img, img.copy())])
        doc = json.loads(rep.to_json())
        assert doc["per_image"][0]["psnr_db"] == "inf"
        assert doc["mean"]["psnr_db"] == "inf"
        assert doc["perceptual_metrics_available"] is False

    def test_report_includes_per_image_and_mean(self):
        rng = Rng(9)
        pairs = [(rng.uniform((16, 16)), rng.uniform((16, 16))) for _ in range(2)]
        doc = json.loads(evaluate_pairs(pairs, names=["a", "b"]).to_json())
        assert [row["name"] for row in doc["per_image"]] == ["a", "b"]
        assert "mean" in doc
