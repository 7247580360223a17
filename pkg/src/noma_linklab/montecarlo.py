"""Deterministic, block-parallel Monte Carlo engine over the signal chain.

Trials are partitioned into fixed-size blocks. Each block draws from an
independent random substream keyed by (seed, block index), and block
results are integer counters reduced in block order, so the outcome is
bit-identical for a given (seed, block_size) regardless of worker count.

Per block the draw order is fixed and is part of the reproducibility
contract: near bits, far bits, near channel (h then eps), far channel
(h then eps), near noise, far noise.

The transmit power is rho_s with the noise level at 1, so the configured
transmit SNR is applied exactly.

Besides the three primary error counters (near user, far user, SIC stage
at the near user), the engine tracks the near-user errors conditioned on
the SIC decision being correct or wrong, and a forced-correct-cancellation
(genie) counter in which the true far symbol is subtracted regardless of
the SIC decision. The conditional counters measure the accuracy of the
worst-case-1/2 approximation used by the analytic chain; the genie counter
isolates the correct-cancellation stage from the selection bias of
conditioning on trials where SIC happened to succeed.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .analytic import FormulaMode, OperatingPoint, abep_breakdown
from .channel import draw_user_channel
from .mathkit import block_rng
from .phy import PowerSplit, bpsk_map, detect_bpsk, ml_detect_far, receive, sic_detect_near, superpose

DEFAULT_BLOCK_SIZE = 100_000
MIN_ERROR_EVENTS = 100  # below this a BER point is flagged low-confidence
_NOISE_LEVEL = 1.0
_WORKERS_ENV = "NOMA_LINKLAB_WORKERS"


@dataclass(frozen=True)
class SystemConfig:
    """One Monte Carlo run: operating point, trial budget, stream seed."""

    point: OperatingPoint
    n_trials: int
    seed: int
    block_size: int = DEFAULT_BLOCK_SIZE
    mode: FormulaMode = FormulaMode.AS_DERIVED

    def __post_init__(self):
        if not (self.n_trials >= self.block_size >= 1):
            raise ValueError(
                f"need n_trials >= block_size >= 1, got {self.n_trials}, {self.block_size}"
            )


@dataclass(frozen=True)
class BerEstimate:
    """Error counts and derived rates for one operating point.

    Counts are Python ints (no overflow for any realistic trial budget).
    """

    errors_ue1: int
    errors_ue2: int
    errors_sic_stage: int
    trials: int
    errors_ue1_correct_sic: int
    errors_ue1_error_sic: int
    trials_correct_sic: int
    errors_ue1_ideal_sic: int

    @staticmethod
    def _rate(errors, trials):
        return errors / trials if trials else 0.0

    @staticmethod
    def _stderr(errors, trials):
        if not trials:
            return 0.0
        p = errors / trials
        return float(np.sqrt(p * (1.0 - p) / trials))

    @property
    def ber_ue1(self):
        return self._rate(self.errors_ue1, self.trials)

    @property
    def ber_ue2(self):
        return self._rate(self.errors_ue2, self.trials)

    @property
    def ber_sic(self):
        return self._rate(self.errors_sic_stage, self.trials)

    @property
    def stderr_ue1(self):
        return self._stderr(self.errors_ue1, self.trials)

    @property
    def stderr_ue2(self):
        return self._stderr(self.errors_ue2, self.trials)

    @property
    def stderr_sic(self):
        return self._stderr(self.errors_sic_stage, self.trials)

    @property
    def ber_ue1_given_correct_sic(self):
        return self._rate(self.errors_ue1_correct_sic, self.trials_correct_sic)

    @property
    def ber_ue1_given_sic_error(self):
        return self._rate(self.errors_ue1_error_sic, self.trials - self.trials_correct_sic)

    @property
    def ber_ue1_ideal_sic(self):
        """Near-user BER under forced-correct cancellation of the far symbol."""
        return self._rate(self.errors_ue1_ideal_sic, self.trials)

    @property
    def stderr_ue1_ideal_sic(self):
        return self._stderr(self.errors_ue1_ideal_sic, self.trials)

    @property
    def low_confidence_ue1(self):
        return self.errors_ue1 < MIN_ERROR_EVENTS

    @property
    def low_confidence_ue2(self):
        return self.errors_ue2 < MIN_ERROR_EVENTS

    @property
    def low_confidence_sic(self):
        return self.errors_sic_stage < MIN_ERROR_EVENTS

    @property
    def low_confidence(self):
        return self.low_confidence_ue1 or self.low_confidence_ue2 or self.low_confidence_sic


@dataclass(frozen=True)
class GridResult:
    """Per-point grid outcome; a failure is attached instead of aborting."""

    config: SystemConfig
    estimate: "BerEstimate | None"
    breakdown: object
    error: "str | None" = None


def resolve_workers(workers=None):
    """Worker count: explicit argument, else NOMA_LINKLAB_WORKERS, else CPU count."""
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get(_WORKERS_ENV)
    if env is not None:
        try:
            value = int(env)
        except ValueError as exc:
            raise ValueError(f"{_WORKERS_ENV} must be an integer, got {env!r}") from exc
        return max(1, value)
    return os.cpu_count() or 1


def _run_block(cfg, block_index, length):
    """Simulate one block; returns the seven counters as int64."""
    pt = cfg.point
    prof = pt.profile
    split = PowerSplit(alpha=pt.alpha, ps=pt.rho_s * _NOISE_LEVEL)
    rng = block_rng(cfg.seed, block_index)

    b1 = rng.integers(0, 2, size=length, dtype=np.uint8)
    b2 = rng.integers(0, 2, size=length, dtype=np.uint8)
    x1 = bpsk_map(b1)
    x2 = bpsk_map(b2)
    composite = superpose(x1, x2, split)

    ch1 = draw_user_channel(prof.sigma1_sq, prof.delta_sq, rng, size=length)
    ch2 = draw_user_channel(prof.sigma2_sq, prof.delta_sq, rng, size=length)
    y1 = receive(composite, ch1, _NOISE_LEVEL, rng)
    y2 = receive(composite, ch2, _NOISE_LEVEL, rng)

    b2_hat = ml_detect_far(y2, ch2.h_hat, split)
    b2_at_near, b1_hat = sic_detect_near(y1, ch1.h_hat, split)

    # Genie branch: subtract the true far symbol (still through h_hat), so the
    # correct-cancellation stage is measured without SIC selection bias.
    y_ideal = y1 - split.amp_far * x2 * ch1.h_hat
    b1_ideal = detect_bpsk(y_ideal, ch1.h_hat, split.amp_near)

    ue1_err = b1_hat != b1
    sic_ok = b2_at_near == b2
    return np.array(
        [
            np.count_nonzero(ue1_err),
            np.count_nonzero(b2_hat != b2),
            np.count_nonzero(~sic_ok),
            np.count_nonzero(ue1_err & sic_ok),
            np.count_nonzero(ue1_err & ~sic_ok),
            np.count_nonzero(sic_ok),
            np.count_nonzero(b1_ideal != b1),
        ],
        dtype=np.int64,
    )


def _blocks(cfg):
    n, bs = cfg.n_trials, cfg.block_size
    return [(i, min(bs, n - i * bs)) for i in range((n + bs - 1) // bs)]


def run_point(cfg, workers=None):
    """Monte Carlo BER estimate at one operating point.

    Deterministic in (seed, block_size): the worker count changes only the
    wall-clock time, never the counts.
    """
    blocks = _blocks(cfg)
    workers = resolve_workers(workers)
    if workers == 1 or len(blocks) == 1:
        parts = [_run_block(cfg, i, n) for i, n in blocks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: _run_block(cfg, *b), blocks))
    total = np.sum(parts, axis=0)  # block order; integer sum is exact
    e1, e2, esic, e1c, e1e, ncorr, e1i = (int(v) for v in total)
    return BerEstimate(
        errors_ue1=e1,
        errors_ue2=e2,
        errors_sic_stage=esic,
        trials=cfg.n_trials,
        errors_ue1_correct_sic=e1c,
        errors_ue1_error_sic=e1e,
        trials_correct_sic=ncorr,
        errors_ue1_ideal_sic=e1i,
    )


def run_grid(configs, workers=None):
    """Evaluate each config's MC estimate and analytic companion, in order.

    A per-point failure is recorded on its GridResult; the rest of the grid
    still runs.
    """
    configs = list(configs)
    if not configs:
        raise ValueError("run_grid needs at least one config")
    results = []
    for cfg in configs:
        estimate = breakdown = None
        error = None
        try:
            estimate = run_point(cfg, workers=workers)
            breakdown = abep_breakdown(cfg.point, cfg.mode)
        except Exception as exc:  # noqa: BLE001 - attached to the point by contract
            error = str(exc)
        results.append(GridResult(config=cfg, estimate=estimate, breakdown=breakdown, error=error))
    return results
