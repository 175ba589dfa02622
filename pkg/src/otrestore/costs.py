"""Scalar fidelity costs on residuals and their gradients.

Two families:

* spatial cost ``(sum r_i^2)^(beta/2)`` with beta >= 1, the classical
  norm-power transport cost on pixel residuals;
* complex lq cost ``sum (Re^2 + Im^2 + eps^2)^(q/2)`` on spectra with
  q in [0, 1] or q = 2, the sparsity-promoting frequency-domain cost.

The eps term smooths the q < 1 singularity at the origin; evaluation
with eps = 0 recovers the exact quasi-norm.  Costs are summed over
coefficients, never averaged; batch averaging is the trainer's job.
"""

import numpy as np

# below this magnitude a coefficient counts as zero for the q = 0 cost
L0_THRESHOLD = 1e-12

DEFAULT_EPS = 1e-4


def _check_q(q):
    q = float(q)
    if not (0.0 <= q <= 1.0 or q == 2.0):
        raise ValueError(f"q must lie in [0, 1] or equal 2, got {q}")
    return q


def spatial_cost(residual, beta=2.0):
    """Euclidean norm of the flattened residual raised to beta."""
    beta = float(beta)
    if beta < 1.0:
        raise ValueError(f"beta must be >= 1, got {beta}")
    r = np.asarray(residual, dtype=np.float64).ravel()
    if not np.all(np.isfinite(r)):
        raise ValueError("residual contains non-finite values")
    return float(np.sum(r * r) ** (beta / 2.0))


def complex_lq(spectrum, q, eps=0.0):
    """Smoothed lq cost of a complex spectrum.

    Exact for eps = 0; for q = 0 with eps = 0 returns the number of
    coefficients with magnitude above ``L0_THRESHOLD``.
    """
    q = _check_q(q)
    eps = float(eps)
    if eps < 0.0:
        raise ValueError(f"eps must be >= 0, got {eps}")
    s = np.asarray(spectrum, dtype=np.complex128).ravel()
    if not (np.all(np.isfinite(s.real)) and np.all(np.isfinite(s.imag))):
        raise ValueError("spectrum contains non-finite values")
    mag2 = s.real * s.real + s.imag * s.imag
    if q == 0.0 and eps == 0.0:
        return float(np.count_nonzero(mag2 > L0_THRESHOLD ** 2))
    return float(np.sum((mag2 + eps * eps) ** (q / 2.0)))


def complex_lq_grad(spectrum, q, eps=0.0):
    """Gradient of complex_lq per coefficient, as d/dRe + 1j * d/dIm.

    For q < 2 the cost is non-differentiable at the origin, so eps > 0 is
    required there.
    """
    q = _check_q(q)
    eps = float(eps)
    if q < 2.0 and eps <= 0.0:
        raise ValueError("gradient for q < 2 requires eps > 0 (cost is non-smooth at 0)")
    s = np.asarray(spectrum, dtype=np.complex128)
    mag2 = s.real * s.real + s.imag * s.imag + eps * eps
    scale = q * mag2 ** (q / 2.0 - 1.0)
    return scale * s.real + 1j * (scale * s.imag)
