"""Trainable frequency-gain restoration model and its descent loop.

The model multiplies each DFT coefficient of the input by a learnable
complex gain (kept Hermitian-symmetric so outputs stay real), optionally
followed by a small spatial convolution.  It is a linear shift-invariant
filter: few enough parameters to validate every gradient by finite
differences, yet able to represent exact notch filters, the optimal
response to frequency-sparse degradation.

Training minimizes

    mean_batch lq(DFT(f(y) - y)) + lambda * energy_distance(features(f(y)), features(x))

by plain gradient descent with a fixed step.  Setting q = 2 recovers the
plain quadratic-fidelity baseline; q < 1 variants prefer residuals that
are concentrated on few frequencies.  All batch sampling is counter-based
on (seed, iteration), so runs are deterministic and resumable bit-exactly.
"""

import json
from dataclasses import dataclass, field, asdict

import numpy as np
from scipy import signal

from .costs import complex_lq, complex_lq_grad
from .rng import Rng
from .spectral import check_image, hermitian_defect, hermitian_project

VALID_Q = (0.5, 1.0, 2.0)
VALID_FEATURES = ("pixels", "patches-of-8")
VALID_DIVERGENCES = ("energy-distance",)
VALID_KERNELS = (0, 3, 5)
INIT_SIGMA = 0.01


class TrainingDiverged(RuntimeError):
    """Loss became non-finite; carries the last finite model and log."""

    def __init__(self, message, model, log):
        super().__init__(message)
        self.model = model
        self.log = log


@dataclass
class TrainConfig:
    q: float = 1.0
    eps: float = 1e-4
    lam: float = 1.0
    learning_rate: float = 0.02
    batch_size: int = 8
    iterations: int = 300
    seed: int = 0
    divergence: str = "energy-distance"
    feature: str = "pixels"
    patch_size: int = 32
    kernel_size: int = 0

    def __post_init__(self):
        if float(self.q) not in VALID_Q:
            raise ValueError(f"q must be one of {VALID_Q}, got {self.q}")
        self.q = float(self.q)
        if self.eps < 0 or (self.q < 2.0 and self.eps <= 0):
            raise ValueError("eps must be positive for q < 2")
        if self.lam < 0:
            raise ValueError("lambda must be >= 0")
        if self.learning_rate <= 0 or self.batch_size < 1 or self.iterations < 0:
            raise ValueError("learning_rate, batch_size, iterations must be positive")
        if self.divergence not in VALID_DIVERGENCES:
            raise ValueError(f"divergence must be one of {VALID_DIVERGENCES}")
        if self.feature not in VALID_FEATURES:
            raise ValueError(f"feature must be one of {VALID_FEATURES}")
        if self.feature == "patches-of-8" and self.patch_size % 8 != 0:
            raise ValueError("patches-of-8 features need patch_size divisible by 8")
        if self.kernel_size not in VALID_KERNELS:
            raise ValueError(f"kernel_size must be one of {VALID_KERNELS}")
        if self.patch_size < 1:
            raise ValueError("patch_size must be positive")

    def to_dict(self):
        return asdict(self)


class GainModel:
    """Per-frequency complex gains plus an optional k x k spatial kernel."""

    def __init__(self, gains, kernel=None):
        gains = np.asarray(gains, dtype=np.complex128)
        if gains.ndim != 2 or gains.shape[0] != gains.shape[1]:
            raise ValueError(f"gains must be square, got {gains.shape}")
        defect = hermitian_defect(gains)
        if defect > 1e-9:
            raise ValueError(f"gains not Hermitian-symmetric (defect {defect:.3e})")
        self.gains = gains
        self.kernel = None if kernel is None else np.asarray(kernel, dtype=np.float64)
        if self.kernel is not None and self.kernel.shape not in ((3, 3), (5, 5)):
            raise ValueError(f"kernel must be 3x3 or 5x5, got {self.kernel.shape}")

    @property
    def size(self):
        return self.gains.shape[0]

    def copy(self):
        return GainModel(self.gains.copy(),
                         None if self.kernel is None else self.kernel.copy())

    @classmethod
    def identity(cls, size, kernel_size=0):
        kernel = None
        if kernel_size:
            kernel = np.zeros((kernel_size, kernel_size))
            kernel[kernel_size // 2, kernel_size // 2] = 1.0
        return cls(np.ones((size, size), dtype=np.complex128), kernel)

    @classmethod
    def seeded_init(cls, size, seed, kernel_size=0, sigma=INIT_SIGMA):
        """Identity plus a small seeded complex perturbation."""
        rng = Rng(seed).spawn(0xC0FFEE)
        pert = rng.normal((size, size), sigma=sigma) + 1j * rng.normal(
            (size, size), sigma=sigma
        )
        model = cls.identity(size, kernel_size)
        model.gains = hermitian_project(model.gains + pert)
        return model

    def to_dict(self, extra=None):
        doc = {
            "patch_size": self.size,
            "gains_interleaved": np.stack(
                [self.gains.real.ravel(), self.gains.imag.ravel()], axis=1
            ).ravel().tolist(),
            "kernel": None if self.kernel is None else self.kernel.tolist(),
        }
        if extra:
            doc.update(extra)
        return doc

    @classmethod
    def from_dict(cls, doc):
        size = int(doc["patch_size"])
        flat = np.asarray(doc["gains_interleaved"], dtype=np.float64).reshape(-1, 2)
        gains = (flat[:, 0] + 1j * flat[:, 1]).reshape(size, size)
        kernel = doc.get("kernel")
        return cls(gains, None if kernel is None else np.asarray(kernel))


def _pad_index(shape, pad):
    return np.pad(
        np.arange(shape[0] * shape[1]).reshape(shape), pad, mode="symmetric"
    )


def _forward(model, y):
    yf = np.fft.fft2(y, norm="ortho")
    z = np.fft.ifft2(model.gains * yf, norm="ortho").real
    if model.kernel is None:
        return z, (yf, None)
    pad = model.kernel.shape[0] // 2
    zp = np.pad(z, pad, mode="symmetric")
    out = signal.correlate(zp, model.kernel, mode="valid")
    return out, (yf, zp)


def _backward(model, w, cache):
    """Pull an output-space gradient back to (gains, kernel) space."""
    yf, zp = cache
    if model.kernel is None:
        dz, dk = w, None
    else:
        dk = signal.correlate(zp, w, mode="valid")
        dzp = signal.convolve(w, model.kernel, mode="full")
        pad = model.kernel.shape[0] // 2
        idx = _pad_index(w.shape, pad)
        flat = np.zeros(w.size)
        np.add.at(flat, idx.ravel(), dzp.ravel())
        dz = flat.reshape(w.shape)
    dg = np.fft.fft2(dz, norm="ortho") * np.conj(yf)
    return dg, dk


def apply_model(model, y):
    """Restore one patch-sized image."""
    y = check_image(y)
    if y.shape != (model.size, model.size):
        raise ValueError(f"input {y.shape} does not match model size {model.size}")
    out, _ = _forward(model, y)
    return out


def restore(model, image):
    """Tiled inference: partition into model-size tiles, apply, reassemble."""
    x = check_image(image)
    if x.ndim != 2:
        return np.stack([restore(model, x[:, :, c]) for c in range(x.shape[2])], axis=2)
    s = model.size
    h, w = x.shape
    if h % s or w % s:
        raise ValueError(
            f"image {h}x{w} not divisible by model size {s}; "
            f"pad to {-(-h // s) * s}x{-(-w // s) * s} first"
        )
    out = np.empty_like(x)
    for i in range(0, h, s):
        for j in range(0, w, s):
            out[i:i + s, j:j + s] = apply_model(model, x[i:i + s, j:j + s])
    return out


def _features(images, mode):
    """Stack images (or their 8x8 tiles) as feature rows."""
    rows = []
    for img in images:
        if mode == "pixels":
            rows.append(img.ravel())
        else:
            s = img.shape[0]
            for i in range(0, s, 8):
                for j in range(0, s, 8):
                    rows.append(img[i:i + 8, j:j + 8].ravel())
    return np.asarray(rows)


def _feature_grad_to_images(grad_rows, n_images, shape, mode):
    """Scatter feature-row gradients back into per-image arrays."""
    out = []
    if mode == "pixels":
        for s in range(n_images):
            out.append(grad_rows[s].reshape(shape))
        return out
    tiles = (shape[0] // 8) * (shape[1] // 8)
    for s in range(n_images):
        g = np.zeros(shape)
        r = s * tiles
        for i in range(0, shape[0], 8):
            for j in range(0, shape[1], 8):
                g[i:i + 8, j:j + 8] = grad_rows[r].reshape(8, 8)
                r += 1
        out.append(g)
    return out


def _energy_distance_raw(A, B, want_grad=False):
    """V-statistic energy distance, optionally with the gradient wrt A rows."""
    from scipy.spatial.distance import cdist

    na, nb = A.shape[0], B.shape[0]
    dab = cdist(A, B)
    daa = cdist(A, A)
    dbb = cdist(B, B)
    val = 2.0 * dab.mean() - daa.mean() - dbb.mean()
    if not want_grad:
        return val, None
    tiny = 1e-12
    grad = np.zeros_like(A)
    for i in range(na):
        diff_b = A[i] - B
        grad[i] = (2.0 / (na * nb)) * (diff_b / np.maximum(dab[i], tiny)[:, None]).sum(axis=0)
        diff_a = A[i] - A
        grad[i] -= (2.0 / (na * na)) * (diff_a / np.maximum(daa[i], tiny)[:, None]).sum(axis=0)
    return val, grad


def _batch_terms(model, batch_y, batch_x, cfg, want_grad):
    outs, caches, fid_grads = [], [], []
    fidelity = 0.0
    # the smoothed cost of an all-zero spectrum is N * eps^q; subtract that
    # floor so zero residual reports zero fidelity (gradients are unchanged
    # by the constant)
    floor = cfg.patch_size * cfg.patch_size * cfg.eps ** cfg.q
    for y in batch_y:
        out, cache = _forward(model, y)
        outs.append(out)
        caches.append(cache)
        spec = np.fft.fft2(out - y, norm="ortho")
        fidelity += complex_lq(spec, cfg.q, cfg.eps) - floor
        if want_grad:
            g = complex_lq_grad(spec, cfg.q, cfg.eps)
            fid_grads.append(np.fft.ifft2(g, norm="ortho").real)
    fidelity /= len(batch_y)

    A = _features(outs, cfg.feature)
    B = _features([check_image(x) for x in batch_x], cfg.feature)
    div, div_grad_rows = _energy_distance_raw(A, B, want_grad=want_grad)
    total = fidelity + cfg.lam * div
    if not want_grad:
        return total, fidelity, div, None, None

    div_grads = _feature_grad_to_images(
        div_grad_rows, len(outs), outs[0].shape, cfg.feature
    )
    dg = np.zeros_like(model.gains)
    dk = None if model.kernel is None else np.zeros_like(model.kernel)
    nb = len(batch_y)
    for s in range(nb):
        w = fid_grads[s] / nb + cfg.lam * div_grads[s]
        dgs, dks = _backward(model, w, caches[s])
        dg += dgs
        if dk is not None:
            dk += dks
    return total, fidelity, div, dg, dk


def sot_objective(model, batch_y, batch_x, cfg):
    """(total, fidelity, divergence) of the combined objective on a batch."""
    if not batch_y or not len(batch_x):
        raise ValueError("batches must be nonempty")
    batch_y = [check_image(y) for y in batch_y]
    total, fid, div, _, _ = _batch_terms(model, batch_y, batch_x, cfg, want_grad=False)
    return total, fid, div


def sot_gradient(model, batch_y, batch_x, cfg):
    """Analytic gradient wrt gains (complex, d/dRe + 1j d/dIm) and kernel."""
    if not batch_y or not len(batch_x):
        raise ValueError("batches must be nonempty")
    batch_y = [check_image(y) for y in batch_y]
    total, fid, div, dg, dk = _batch_terms(model, batch_y, batch_x, cfg, want_grad=True)
    return dg, dk, {"total": total, "fidelity": fid, "divergence": div}


def _sample_batch(pool, rng, size):
    idx = rng.integers(len(pool), size)
    return [pool[int(i)] for i in idx]


def train(cfg, degraded_pool, clean_pool, start_model=None, start_iteration=0):
    """Fixed-step gradient descent; returns (model, per-iteration log).

    Restarting from (start_model, start_iteration) continues the exact
    same trajectory because batch indices depend only on (seed, iteration).
    """
    degraded_pool = [check_image(y) for y in degraded_pool]
    clean_pool = [check_image(x) for x in clean_pool]
    for pool, name in ((degraded_pool, "degraded"), (clean_pool, "clean")):
        if not pool:
            raise ValueError(f"{name} pool is empty")
        for img in pool:
            if img.shape != (cfg.patch_size, cfg.patch_size):
                raise ValueError(
                    f"{name} pool image shape {img.shape} != "
                    f"({cfg.patch_size}, {cfg.patch_size})"
                )

    model = (start_model.copy() if start_model is not None
             else GainModel.seeded_init(cfg.patch_size, cfg.seed, cfg.kernel_size))
    log = []
    for it in range(start_iteration, cfg.iterations):
        rng = Rng(cfg.seed).spawn(1_000_003 * it + 1)
        batch_y = _sample_batch(degraded_pool, rng, cfg.batch_size)
        batch_x = _sample_batch(clean_pool, rng, cfg.batch_size)
        with np.errstate(over="ignore", invalid="ignore"):
            dg, dk, parts = sot_gradient(model, batch_y, batch_x, cfg)
        if not np.isfinite(parts["total"]):
            raise TrainingDiverged(
                f"non-finite loss at iteration {it}", model, log
            )
        candidate = model.copy()
        candidate.gains = hermitian_project(candidate.gains - cfg.learning_rate * dg)
        if dk is not None:
            candidate.kernel = candidate.kernel - cfg.learning_rate * dk
        if not (np.all(np.isfinite(candidate.gains.real))
                and np.all(np.isfinite(candidate.gains.imag))):
            raise TrainingDiverged(
                f"non-finite gains after iteration {it}", model, log
            )
        model = candidate
        log.append({
            "iteration": it,
            "fidelity": parts["fidelity"],
            "divergence": parts["divergence"],
            "total": parts["total"],
        })
    return model, log


def checkpoint_dict(model, cfg, iteration):
    return model.to_dict(extra={
        "config": cfg.to_dict(),
        "seed": cfg.seed,
        "iteration": int(iteration),
    })


def checkpoint_json(model, cfg, iteration):
    return json.dumps(checkpoint_dict(model, cfg, iteration), sort_keys=True)


def load_checkpoint(doc):
    if isinstance(doc, str):
        doc = json.loads(doc)
    model = GainModel.from_dict(doc)
    cfg = TrainConfig(**doc["config"])
    return model, cfg, int(doc["iteration"])
