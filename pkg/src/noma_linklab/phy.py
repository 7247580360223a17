"""Transceiver signal chain: BPSK, superposition coding, ML and SIC detection.

The base station transmits sqrt(ps)*(sqrt(alpha)*x1 + sqrt(1-alpha)*x2) over
each user's channel. The far user (weaker channel, larger power share)
detects its symbol directly by a two-point ML metric against its channel
estimate; the near user first detects and subtracts the far symbol (SIC),
then detects its own. All detection uses the estimated channel h_hat, so
the residual estimation error is what degrades both stages.

All operations are vectorized: bits and samples may be scalars or arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization, draw_noise


@dataclass(frozen=True)
class PowerSplit:
    """Power allocation: fraction alpha of total power ps to the near user.

    alpha < 0.5 keeps the far user's symbols dominant, which is what makes
    the SIC decoding order (far first) valid.
    """

    alpha: float
    ps: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.alpha < 0.5):
            raise ValueError(f"alpha must lie in (0, 0.5), got {self.alpha}")
        if not self.ps > 0:
            raise ValueError("total power ps must be > 0")

    @property
    def amp_near(self):
        return np.sqrt(self.alpha * self.ps)

    @property
    def amp_far(self):
        return np.sqrt((1.0 - self.alpha) * self.ps)


def bpsk_map(b):
    """Map bit 0 -> +1, bit 1 -> -1."""
    b = np.asarray(b)
    if not np.all((b == 0) | (b == 1)):
        raise ValueError("bits must be 0 or 1")
    out = 1.0 - 2.0 * np.asarray(b, dtype=float)
    return float(out) if out.ndim == 0 else out


def superpose(x1, x2, split):
    """Composite transmit signal sqrt(ps)*(sqrt(alpha)*x1 + sqrt(1-alpha)*x2)."""
    return np.sqrt(split.ps) * (
        np.sqrt(split.alpha) * np.asarray(x1, dtype=float)
        + np.sqrt(1.0 - split.alpha) * np.asarray(x2, dtype=float)
    )


def receive(composite, ch, n0, rng):
    """Received sample y = composite * h + n with n ~ CN(0, n0).

    The true channel h carries the signal; the estimate h_hat is only used
    by the detectors.
    """
    sig = np.asarray(composite, dtype=float) * ch.h
    size = np.shape(sig) if np.ndim(sig) else None
    return sig + draw_noise(n0, rng, size)


def detect_bpsk(y, h_hat, amplitude):
    """Two-point ML decision: argmin over x in {+1,-1} of |y - amplitude*x*h_hat|^2.

    Returns the bit of the minimizing constellation point (0 for +1).
    Exact metric ties resolve to bit 0. Equivalent to the sign of
    Re(y * conj(h_hat)); the explicit two-candidate metric is kept so the
    same code serves any later constellation.
    """
    y = np.asarray(y)
    h_hat = np.asarray(h_hat)
    m_plus = np.abs(y - amplitude * h_hat) ** 2
    m_minus = np.abs(y + amplitude * h_hat) ** 2
    bits = (m_plus > m_minus).astype(np.uint8)
    return bits[()] if bits.ndim == 0 else bits


def ml_detect_far(y, h_hat, split):
    """Far-user ML detection of x2, treating the near-user symbol as noise."""
    return detect_bpsk(y, h_hat, split.amp_far)


def sic_detect_near(y, h_hat, split):
    """Near-user SIC chain: detect x2, subtract it, then detect x1.

    The far symbol is detected with the same two-point rule as the far
    user's own detector, only with this user's channel estimate. The
    reconstructed far component amp_far * x2_hat * h_hat is subtracted
    using h_hat, so even a correct subtraction leaves the estimation-error
    residual in place. Returns (b2_hat, b1_hat).
    """
    b2_hat = detect_bpsk(y, h_hat, split.amp_far)
    y_plus = np.asarray(y) - split.amp_far * bpsk_map(b2_hat) * np.asarray(h_hat)
    b1_hat = detect_bpsk(y_plus, h_hat, split.amp_near)
    return b2_hat, b1_hat
