"""Flat key = value scenario configs, with dB/linear entry for power terms.

Grammar (UTF-8, one key per line, '#' starts a comment):

    alpha  = 0.2              # or a comma list / a:step:b range
    snr    = 0:2:40 dB        # transmit SNR grid; 'dB' suffix or linear
    delta  = 0, 0.01, 0.05    # estimation-error standard deviations
    sigma1 = 10 dB            # near-user mean channel power
    sigma2 = 0 dB             # far-user mean channel power
    trials = 1e7
    seed   = 42
    block_size = 100000       # optional
    mode   = derived          # optional: derived | printed

Unknown keys, malformed values, and constraint violations each produce a
distinct diagnostic naming the offending line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from ..analytic import FormulaMode, OperatingPoint
from ..channel import FadingProfile
from ..montecarlo import DEFAULT_BLOCK_SIZE, SystemConfig

REQUIRED_KEYS = ("alpha", "snr", "delta", "sigma1", "sigma2", "trials", "seed")
OPTIONAL_KEYS = ("block_size", "mode")


class ConfigError(ValueError):
    """Config file rejected; message carries the line number where known."""


@dataclass(frozen=True)
class SweepSpec:
    """Parsed scenario: parameter grids plus Monte Carlo controls."""

    alphas: tuple
    snr_db: tuple
    deltas: tuple
    sigma1_sq: float
    sigma2_sq: float
    trials: int
    seed: int
    block_size: int = DEFAULT_BLOCK_SIZE
    mode: FormulaMode = FormulaMode.AS_DERIVED

    def profile(self, delta):
        return FadingProfile(
            sigma1_sq=self.sigma1_sq, sigma2_sq=self.sigma2_sq, delta_sq=float(delta) ** 2
        )

    def system_configs(self):
        """All (alpha, snr, delta) combinations, in grid order."""
        out = []
        for alpha in self.alphas:
            for snr in self.snr_db:
                for delta in self.deltas:
                    point = OperatingPoint(alpha, 10.0 ** (snr / 10.0), self.profile(delta))
                    out.append(
                        SystemConfig(
                            point=point,
                            n_trials=self.trials,
                            seed=self.seed,
                            block_size=min(self.block_size, self.trials),
                            mode=self.mode,
                        )
                    )
        return out

    def override(self, trials=None, seed=None, mode=None):
        changes = {}
        if trials is not None:
            changes["trials"] = int(trials)
        if seed is not None:
            changes["seed"] = int(seed)
        if mode is not None:
            changes["mode"] = mode
        return replace(self, **changes) if changes else self


def _split_values(text, lineno, key):
    text = text.strip()
    is_db = False
    lowered = text.lower()
    if lowered.endswith("db"):
        is_db = True
        text = text[:-2].strip()
    if not text:
        raise ConfigError(f"line {lineno}: empty value for '{key}'")
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"line {lineno}: range for '{key}' must be start:step:stop")
        try:
            start, step, stop = (float(p) for p in parts)
        except ValueError:
            raise ConfigError(f"line {lineno}: malformed range for '{key}': {text!r}") from None
        if step <= 0 or stop < start:
            raise ConfigError(f"line {lineno}: range for '{key}' needs step > 0 and stop >= start")
        values = []
        k = 0
        while start + k * step <= stop + 1e-9:
            values.append(start + k * step)
            k += 1
    else:
        try:
            values = [float(p) for p in text.split(",")]
        except ValueError:
            raise ConfigError(f"line {lineno}: malformed value for '{key}': {text!r}") from None
    return values, is_db


def _db_to_linear(values):
    return [10.0 ** (v / 10.0) for v in values]


def parse_config(path):
    """Parse a scenario file into a SweepSpec, rejecting anything off-grammar."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.readlines()

    raw = {}
    for lineno, line in enumerate(lines, start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {body!r}")
        key, value = (part.strip() for part in body.split("=", 1))
        if key not in REQUIRED_KEYS + OPTIONAL_KEYS:
            raise ConfigError(f"line {lineno}: unknown key '{key}'")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key '{key}'")
        raw[key] = (value, lineno)

    missing = [k for k in REQUIRED_KEYS if k not in raw]
    if missing:
        raise ConfigError("missing required keys: " + ", ".join(missing))

    def values_of(key, allow_db):
        value, lineno = raw[key]
        vals, is_db = _split_values(value, lineno, key)
        if is_db and not allow_db:
            raise ConfigError(f"line {lineno}: '{key}' does not take a dB suffix")
        return vals, is_db, lineno

    alphas, _, ln = values_of("alpha", allow_db=False)
    for a in alphas:
        if not (0.0 < a < 0.5):
            raise ConfigError(f"line {ln}: alpha must lie in (0, 0.5), got {a:g}")

    snr_vals, snr_db_given, _ = values_of("snr", allow_db=True)
    if snr_db_given:
        snr_db = snr_vals
    else:
        for v in snr_vals:
            if v <= 0:
                raise ConfigError("linear snr values must be > 0 (or use the dB suffix)")
        snr_db = [10.0 * math.log10(v) for v in snr_vals]

    deltas, _, ln = values_of("delta", allow_db=False)
    for d in deltas:
        if d < 0:
            raise ConfigError(f"line {ln}: delta must be >= 0, got {d:g}")

    def scalar_power(key):
        vals, is_db, lineno = values_of(key, allow_db=True)
        if len(vals) != 1:
            raise ConfigError(f"line {lineno}: '{key}' takes a single value")
        v = _db_to_linear(vals)[0] if is_db else vals[0]
        if v <= 0:
            raise ConfigError(f"line {lineno}: '{key}' must be > 0 in linear scale")
        return v

    sigma1_sq = scalar_power("sigma1")
    sigma2_sq = scalar_power("sigma2")
    if sigma1_sq < sigma2_sq:
        raise ConfigError(
            f"sigma1 must be >= sigma2 (near user has the stronger channel); "
            f"got {sigma1_sq:g} < {sigma2_sq:g} linear"
        )

    def scalar_int(key, minimum):
        vals, _, lineno = values_of(key, allow_db=False)
        if len(vals) != 1:
            raise ConfigError(f"line {lineno}: '{key}' takes a single value")
        v = vals[0]
        if v != int(v):
            raise ConfigError(f"line {lineno}: '{key}' must be an integer, got {v:g}")
        v = int(v)
        if v < minimum:
            raise ConfigError(f"line {lineno}: '{key}' must be >= {minimum}")
        return v

    trials = scalar_int("trials", 1)
    seed_value, seed_line = raw["seed"]
    try:
        seed = int(seed_value.strip())
    except ValueError:
        raise ConfigError(f"line {seed_line}: seed must be an integer") from None

    block_size = scalar_int("block_size", 1) if "block_size" in raw else DEFAULT_BLOCK_SIZE

    mode = FormulaMode.AS_DERIVED
    if "mode" in raw:
        value, lineno = raw["mode"]
        try:
            mode = FormulaMode(value.strip().lower())
        except ValueError:
            raise ConfigError(
                f"line {lineno}: mode must be 'derived' or 'printed', got {value!r}"
            ) from None

    return SweepSpec(
        alphas=tuple(alphas),
        snr_db=tuple(snr_db),
        deltas=tuple(deltas),
        sigma1_sq=sigma1_sq,
        sigma2_sq=sigma2_sq,
        trials=trials,
        seed=seed,
        block_size=block_size,
        mode=mode,
    )


def format_config(spec):
    """Render a SweepSpec back to config text; parse(format(spec)) == spec."""
    join = lambda vals: ", ".join(repr(float(v)) for v in vals)  # noqa: E731
    lines = [
        f"alpha = {join(spec.alphas)}",
        f"snr = {join(spec.snr_db)} dB",
        f"delta = {join(spec.deltas)}",
        f"sigma1 = {spec.sigma1_sq!r}",
        f"sigma2 = {spec.sigma2_sq!r}",
        f"trials = {spec.trials}",
        f"seed = {spec.seed}",
        f"block_size = {spec.block_size}",
        f"mode = {spec.mode.value}",
    ]
    return "\n".join(lines) + "\n"
