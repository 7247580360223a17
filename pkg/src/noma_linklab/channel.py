"""Per-trial fading channels, estimation errors, and receiver noise.

Each user's flat-fading coefficient is h ~ CN(0, sigma^2). The receiver
works with an estimate h_hat = h - eps where the estimation error
eps ~ CN(0, delta^2) is drawn independently of h, independently per user
and per trial. Channels are redrawn every trial (one symbol per coherence
interval).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mathkit import sample_cgauss


@dataclass(frozen=True)
class FadingProfile:
    """Mean channel powers (linear scale) and estimation-error variance.

    sigma1_sq belongs to the near user and must dominate sigma2_sq; that
    ordering is what makes user 1 "near" and fixes the SIC decoding order.
    """

    sigma1_sq: float
    sigma2_sq: float
    delta_sq: float

    def __post_init__(self):
        if not (self.sigma1_sq > 0 and self.sigma2_sq > 0):
            raise ValueError("channel powers sigma1_sq, sigma2_sq must be > 0")
        if self.sigma1_sq < self.sigma2_sq:
            raise ValueError(
                "near user must have the stronger statistical channel "
                f"(sigma1_sq={self.sigma1_sq} < sigma2_sq={self.sigma2_sq})"
            )
        if not (self.delta_sq >= 0):
            raise ValueError("delta_sq must be >= 0")


@dataclass(frozen=True)
class ChannelRealization:
    """One (or a block of) channel draw(s): true h, error eps, estimate h_hat.

    h_hat = h - eps holds exactly by construction.
    """

    h: np.ndarray
    epsilon: np.ndarray
    h_hat: np.ndarray


def draw_user_channel(sigma_sq, delta_sq, rng, size=None):
    """Draw h ~ CN(0, sigma_sq), eps ~ CN(0, delta_sq) independently.

    Returns a ChannelRealization with h_hat = h - eps. Draw order (h block,
    then eps block) is fixed for stream reproducibility.
    """
    if not sigma_sq > 0:
        raise ValueError("sigma_sq must be > 0")
    if delta_sq < 0:
        raise ValueError("delta_sq must be >= 0")
    h = sample_cgauss(sigma_sq, rng, size)
    eps = sample_cgauss(delta_sq, rng, size)
    return ChannelRealization(h=h, epsilon=eps, h_hat=h - eps)


def draw_noise(n0, rng, size=None):
    """Receiver noise n ~ CN(0, n0)."""
    if not n0 > 0:
        raise ValueError("noise level n0 must be > 0")
    return sample_cgauss(n0, rng, size)
