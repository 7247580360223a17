"""Min-max fair power allocation over alpha, using the analytic chain.

The objective is max(p1(alpha), p2(alpha)) on alpha in [1e-4, 0.5 - 1e-4].
A coarse grid (step 0.005) locates the candidate basin. Where the two ABEP
curves cross, the min-max optimum is the crossing, found by bisection on
p1 - p2; otherwise golden-section refines the basin. The objective is
closed-form and cheap, so the optimizer is deterministic and fast; Monte
Carlo cross-checks of alpha* belong to the validation suite, not here.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .analytic import FormulaMode, OperatingPoint, abep_far, abep_near, pf_index
from .channel import FadingProfile

ALPHA_LO = 1e-4
ALPHA_HI = 0.5 - 1e-4
COARSE_STEP = 0.005
_INV_PHI = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class AllocationResult:
    """Optimizer output at one (rho_s, profile) cell."""

    alpha_star: float
    p1_at_star: float
    p2_at_star: float
    worst: float
    pf_at_star: float
    iterations: int
    bracket_width: float
    boundary: bool


def _curves(rho_s, profile, mode):
    def p1(alpha):
        return abep_near(OperatingPoint(alpha, rho_s, profile), mode)

    def p2(alpha):
        return abep_far(OperatingPoint(alpha, rho_s, profile), mode)

    return p1, p2


def optimize_alpha(rho_s, profile, mode=FormulaMode.AS_DERIVED, tol=1e-6):
    """Minimize max(p1, p2) over alpha; tol is in probability units.

    Returns the best evaluated alpha, so shrinking tol can only improve
    (never worsen) the returned objective, and the result is never worse
    than any coarse-grid point.
    """
    if not tol > 0:
        raise ValueError("tol must be > 0")
    p1f, p2f = _curves(rho_s, profile, mode)

    grid = np.arange(ALPHA_LO, ALPHA_HI + COARSE_STEP / 2, COARSE_STEP)
    grid[-1] = min(grid[-1], ALPHA_HI)
    p1s = np.array([p1f(a) for a in grid])
    p2s = np.array([p2f(a) for a in grid])
    obj = np.maximum(p1s, p2s)
    bad = ~np.isfinite(obj)
    if np.any(bad):
        raise ValueError(f"objective non-finite at alpha = {grid[np.argmax(bad)]:.6g}")

    i_best = int(np.argmin(obj))
    candidates = [(float(obj[i_best]), float(grid[i_best]))]
    boundary = i_best in (0, len(grid) - 1)
    iterations = 0

    # Prefer bisection on the crossing of p1 - p2 nearest the coarse optimum.
    g = p1s - p2s
    sign_change = np.nonzero(np.sign(g[:-1]) * np.sign(g[1:]) < 0)[0]
    if sign_change.size:
        j = int(sign_change[np.argmin(np.abs(sign_change - i_best))])
        lo, hi = float(grid[j]), float(grid[j + 1])
        glo = g[j]
        while hi - lo > 1e-12:
            mid = 0.5 * (lo + hi)
            gm = p1f(mid) - p2f(mid)
            if gm == 0.0:
                lo = hi = mid
                break
            if np.sign(gm) == np.sign(glo):
                lo = mid
            else:
                hi = mid
            iterations += 1
        alpha_x = 0.5 * (lo + hi)
        candidates.append((max(p1f(alpha_x), p2f(alpha_x)), alpha_x))
        width = hi - lo
        boundary = False
    else:
        # No crossing: golden-section on the max-objective within the basin.
        lo = float(grid[max(i_best - 1, 0)])
        hi = float(grid[min(i_best + 1, len(grid) - 1)])
        f = lambda a: max(p1f(a), p2f(a))  # noqa: E731
        width_target = max(1e-10, min(tol, COARSE_STEP))
        c = hi - _INV_PHI * (hi - lo)
        d = lo + _INV_PHI * (hi - lo)
        fc, fd = f(c), f(d)
        candidates += [(fc, c), (fd, d)]
        while hi - lo > width_target:
            if fc <= fd:
                hi, d, fd = d, c, fc
                c = hi - _INV_PHI * (hi - lo)
                fc = f(c)
                candidates.append((fc, c))
            else:
                lo, c, fc = c, d, fd
                d = lo + _INV_PHI * (hi - lo)
                fd = f(d)
                candidates.append((fd, d))
            iterations += 1
        width = hi - lo

    _, alpha_star = min(candidates, key=lambda t: (t[0], t[1]))
    p1v, p2v = p1f(alpha_star), p2f(alpha_star)
    return AllocationResult(
        alpha_star=float(alpha_star),
        p1_at_star=p1v,
        p2_at_star=p2v,
        worst=max(p1v, p2v),
        pf_at_star=pf_index(p1v, p2v),
        iterations=iterations,
        bracket_width=float(width),
        boundary=boundary,
    )


def fairness_sweep(rho_grid, profile, deltas, fixed_alphas, mode=FormulaMode.AS_DERIVED):
    """PF index over (rho, delta) for each fixed alpha and for the optimum.

    Returns one record per (rho, delta, scheme); a failing cell carries its
    error message instead of aborting the sweep.
    """
    if not (len(list(rho_grid)) and len(list(deltas))):
        raise ValueError("fairness_sweep needs nonempty rho and delta grids")
    rows = []
    for rho in rho_grid:
        for delta in deltas:
            prof = replace(profile, delta_sq=float(delta) ** 2)
            for alpha in fixed_alphas:
                rows.append(_pf_cell(rho, delta, prof, f"alpha={alpha:g}", alpha, mode))
            try:
                best = optimize_alpha(rho, prof, mode)
                rows.append(
                    _pf_cell(rho, delta, prof, "optimized", best.alpha_star, mode)
                )
            except ValueError as exc:
                rows.append(_error_cell(rho, delta, "optimized", str(exc)))
    return rows


def _pf_cell(rho, delta, prof, scheme, alpha, mode):
    try:
        pt = OperatingPoint(alpha, rho, prof)
        p1 = abep_near(pt, mode)
        p2 = abep_far(pt, mode)
        return {
            "snr_db": 10.0 * np.log10(rho),
            "rho_s": float(rho),
            "delta": float(delta),
            "scheme": scheme,
            "alpha": float(alpha),
            "p1": p1,
            "p2": p2,
            "pf": pf_index(p1, p2),
            "error": None,
        }
    except ValueError as exc:
        return _error_cell(rho, delta, scheme, str(exc), alpha)


def _error_cell(rho, delta, scheme, message, alpha=None):
    return {
        "snr_db": 10.0 * np.log10(rho),
        "rho_s": float(rho),
        "delta": float(delta),
        "scheme": scheme,
        "alpha": alpha,
        "p1": None,
        "p2": None,
        "pf": None,
        "error": message,
    }
