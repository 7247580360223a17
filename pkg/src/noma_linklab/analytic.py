"""Closed-form average bit error probabilities for both users.

Two evaluation modes are carried side by side:

* ``AS_DERIVED`` (default) re-derives every average through the exact
  exponential-fading identity E[Q(sqrt(2*c*g))] = (1 - sqrt(c*m/(1+c*m)))/2,
  with the composite-symbol power coefficients beta = (sqrt(1-alpha) +/-
  sqrt(alpha))^2 = 1 +/- 2*sqrt(alpha - alpha^2) and the effective-SNR
  mapping c_k = beta_k*rho/(beta_k*delta^2*rho + 1). These forms are the
  ones validated against the Monte Carlo chain.

* ``AS_PRINTED`` evaluates an alternate set of published closed forms
  verbatim: beta_k = 1 +/- sqrt(alpha - alpha^2), the far-user average with
  rho*sigma^2 under the radical undamped by the matching denominator term,
  and the SIC-stage variant with sigma^2 inside its denominator. Those
  expressions leave [0, 1/2] over much of the parameter space, so printed
  results are clamped into [0, 1/2] and the clamp event is flagged rather
  than raised, letting sweeps complete while marking the invalid region.

The near user's composite ABEP uses the worst-case approximation "error
probability given a wrong SIC decision = 1/2" in both modes; the Monte
Carlo engine measures the true conditional rate so the quality of that
approximation is itself an observable output.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .channel import FadingProfile
from .mathkit import rayleigh_avg_q


class FormulaMode(enum.Enum):
    """Which closed-form variant to evaluate."""

    AS_DERIVED = "derived"
    AS_PRINTED = "printed"


@dataclass(frozen=True)
class OperatingPoint:
    """One scenario: power split alpha, transmit SNR rho_s (linear), fading."""

    alpha: float
    rho_s: float
    profile: FadingProfile

    def __post_init__(self):
        if not (0.0 < self.alpha < 0.5):
            raise ValueError(f"alpha must lie in (0, 0.5), got {self.alpha}")
        if not (np.isfinite(self.rho_s) and self.rho_s > 0):
            raise ValueError("rho_s must be finite and > 0")


@dataclass(frozen=True)
class AbepBreakdown:
    """All analytic error rates for one operating point, plus the PF index.

    p1 always equals p_sic/2 + (1 - p_sic)*p1_correct by construction.
    ``clamped`` records whether any printed-mode component left [0, 1/2]
    and was clamped.
    """

    p2: float
    p_sic: float
    p1_correct: float
    p1: float
    pf: float
    mode: FormulaMode
    clamped: bool = False


_HALF = 0.5


def _clamp(raw):
    """Clamp a printed-mode probability into [0, 1/2]; flag if it moved."""
    value = min(max(raw, 0.0), _HALF)
    return value, value != raw


def beta_coeffs(alpha, mode=FormulaMode.AS_DERIVED):
    """Composite-symbol power coefficients (beta1, beta2), beta1 > 1 > beta2 > 0.

    Derived mode squares the two composite amplitudes sqrt(1-alpha) +/-
    sqrt(alpha); printed mode keeps the listed 1 +/- sqrt(alpha - alpha^2),
    which differs by a factor of two under the radical. Both satisfy
    beta1 + beta2 = 2.
    """
    if not (0.0 < alpha < 0.5):
        raise ValueError(f"alpha must lie in (0, 0.5), got {alpha}")
    root = np.sqrt(alpha - alpha * alpha)
    if mode is FormulaMode.AS_DERIVED:
        return 1.0 + 2.0 * root, 1.0 - 2.0 * root
    return 1.0 + root, 1.0 - root


def _avg_bep_derived(alpha, rho_s, sigma_sq, delta_sq):
    """Derived two-level average: sum_k E[Q(sqrt(2*c_k*g))]/2 over Exp(sigma_sq)."""
    out = 0.0
    for beta in beta_coeffs(alpha, FormulaMode.AS_DERIVED):
        c = beta * rho_s / (beta * delta_sq * rho_s + 1.0)
        out += 0.5 * rayleigh_avg_q(c, sigma_sq)
    return out


def _far_printed_raw(alpha, rho_s, sigma_sq, delta_sq):
    """Printed far-user form: sum_k (1 - sqrt(beta*rho*sigma^2/(beta*delta^2*rho+1)))/4."""
    out = 0.0
    for beta in beta_coeffs(alpha, FormulaMode.AS_PRINTED):
        out += 0.25 * (
            1.0 - np.sqrt(beta * rho_s * sigma_sq / (beta * delta_sq * rho_s + 1.0))
        )
    return out


def _sic_printed_raw(alpha, rho_s, sigma_sq, delta_sq):
    """Printed SIC-stage form, with sigma^2 also inside the denominator."""
    out = 0.0
    for beta in beta_coeffs(alpha, FormulaMode.AS_PRINTED):
        out += 0.25 * (
            1.0
            - np.sqrt(
                beta * rho_s * sigma_sq / (beta * delta_sq * rho_s * sigma_sq + 1.0)
            )
        )
    return out


def abep_far(pt, mode=FormulaMode.AS_DERIVED):
    """Average BEP of the far user (direct ML detection, near symbol as noise)."""
    prof = pt.profile
    if mode is FormulaMode.AS_DERIVED:
        return _avg_bep_derived(pt.alpha, pt.rho_s, prof.sigma2_sq, prof.delta_sq)
    value, _ = _clamp(_far_printed_raw(pt.alpha, pt.rho_s, prof.sigma2_sq, prof.delta_sq))
    return value


def p_sic(pt, mode=FormulaMode.AS_DERIVED):
    """Average BEP of the far symbol as detected at the near user (SIC stage).

    Same functional form as abep_far with the near user's channel power.
    """
    prof = pt.profile
    if mode is FormulaMode.AS_DERIVED:
        return _avg_bep_derived(pt.alpha, pt.rho_s, prof.sigma1_sq, prof.delta_sq)
    value, _ = _clamp(_sic_printed_raw(pt.alpha, pt.rho_s, prof.sigma1_sq, prof.delta_sq))
    return value


def abep_near_correct(pt, mode=FormulaMode.AS_DERIVED):
    """Near user's average BEP given a correct SIC decision.

    After correct subtraction only the estimation-error residual remains:
    effective SNR gain c = alpha*rho/(delta^2*rho + 1) over the near
    channel. Printed mode keeps rho*sigma^2 under the radical undamped.
    """
    prof = pt.profile
    c = pt.alpha * pt.rho_s / (prof.delta_sq * pt.rho_s + 1.0)
    if mode is FormulaMode.AS_DERIVED:
        return rayleigh_avg_q(c, prof.sigma1_sq)
    value, _ = _clamp(0.5 * (1.0 - np.sqrt(c * prof.sigma1_sq)))
    return value


def abep_near(pt, mode=FormulaMode.AS_DERIVED):
    """Near user's composite ABEP: p_sic/2 + (1 - p_sic)*p1_correct.

    The 1/2 is the worst-case bit error rate after a wrong subtraction.
    """
    psic = p_sic(pt, mode)
    return _HALF * psic + (1.0 - psic) * abep_near_correct(pt, mode)


def pf_index(p1, p2):
    """Proportional fairness index p1/p2; 1 means perfectly balanced users."""
    if p2 == 0:
        raise ValueError("pf_index undefined for p2 = 0")
    return p1 / p2


def abep_breakdown(pt, mode=FormulaMode.AS_DERIVED):
    """Evaluate the full analytic chain at one point, with clamp diagnostics."""
    prof = pt.profile
    clamped = False
    if mode is FormulaMode.AS_DERIVED:
        p2 = abep_far(pt, mode)
        psic = p_sic(pt, mode)
        p1c = abep_near_correct(pt, mode)
    else:
        p2, c2 = _clamp(_far_printed_raw(pt.alpha, pt.rho_s, prof.sigma2_sq, prof.delta_sq))
        psic, cs = _clamp(_sic_printed_raw(pt.alpha, pt.rho_s, prof.sigma1_sq, prof.delta_sq))
        c = pt.alpha * pt.rho_s / (prof.delta_sq * pt.rho_s + 1.0)
        p1c, c1 = _clamp(0.5 * (1.0 - np.sqrt(c * prof.sigma1_sq)))
        clamped = c2 or cs or c1
    p1 = _HALF * psic + (1.0 - psic) * p1c
    return AbepBreakdown(
        p2=p2,
        p_sic=psic,
        p1_correct=p1c,
        p1=p1,
        pf=pf_index(p1, p2),
        mode=mode,
        clamped=clamped,
    )
