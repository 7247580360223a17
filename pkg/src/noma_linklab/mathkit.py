"""Scalar numerical kernels shared by the analytic and Monte Carlo chains.

Covers the standard Gaussian tail function, its average over exponentially
distributed (Rayleigh-power) fading, circularly symmetric complex Gaussian
sampling, and keyed random streams for reproducible parallel simulation.

Convention: a complex Gaussian CN(0, v) has independent real and imaginary
parts with variance v/2 each, so E[|z|^2] = v.
"""

from __future__ import annotations

import numpy as np
from scipy.special import erfc

_SQRT2 = np.sqrt(2.0)
_MASK64 = (1 << 64) - 1


def q_function(x):
    """Gaussian tail probability Q(x) = P(N(0,1) > x).

    Evaluated as erfc(x/sqrt(2))/2, which stays accurate deep into the
    tail. Accepts scalars or arrays; raises on non-finite input.
    """
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("q_function requires finite input")
    out = 0.5 * erfc(x / _SQRT2)
    return float(out) if out.ndim == 0 else out


def rayleigh_avg_q(c, gamma_mean):
    """E[Q(sqrt(2*c*g))] for g exponentially distributed with mean gamma_mean.

    Closed form (1 - sqrt(x/(1+x)))/2 with x = c*gamma_mean. Decreasing in
    both arguments; equals 1/2 at c = 0 and tends to 0 as c -> inf.
    """
    c = np.asarray(c, dtype=float)
    gamma_mean = np.asarray(gamma_mean, dtype=float)
    if np.any(c < 0) or np.any(gamma_mean < 0):
        raise ValueError("rayleigh_avg_q requires c >= 0 and gamma_mean >= 0")
    with np.errstate(invalid="ignore"):
        x = c * gamma_mean
        ratio = np.where(np.isinf(x), 1.0, x / (1.0 + x))
    out = 0.5 * (1.0 - np.sqrt(ratio))
    return float(out) if out.ndim == 0 else out


def sample_cgauss(variance, rng, size=None):
    """Draw from CN(0, variance): per-component variance is variance/2.

    With size=None returns a complex scalar, otherwise a complex128 array.
    The real block is drawn before the imaginary block; that order is part
    of the reproducibility contract of keyed streams.
    """
    if variance < 0:
        raise ValueError("sample_cgauss requires variance >= 0")
    scale = np.sqrt(variance / 2.0)
    re = rng.standard_normal(size)
    im = rng.standard_normal(size)
    return scale * (re + 1j * im)


def block_rng(seed, block_index):
    """Independent substream keyed by (seed, block index).

    Counter-based Philox keyed directly with the two 64-bit words, so block
    streams are independent and reproducible regardless of how many other
    blocks ran, in what order, or on which worker.
    """
    key = np.array([int(seed) & _MASK64, int(block_index) & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
