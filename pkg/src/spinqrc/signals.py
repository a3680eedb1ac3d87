"""Input series and task targets.

Frequency-controlled inputs are sums of 20 sinusoids with equally spaced
frequencies in [f/5000, f/50], random phases, min-max rescaled onto [0, 1]
over the generated window.  The infinite-frequency marker (math.inf) selects
an uncorrelated uniform series instead.  Targets are the delayed input or a
NARMA-n recurrence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, ConvergenceError

#: alpha, beta, gamma, delta of the NARMA recurrence.
NARMA_CONSTANTS = (0.3, 0.002, 1.5, 0.1)

_DIVERGENCE_LIMIT = 1e3


@dataclass(frozen=True)
class InputSpec:
    f: float                 # frequency scale; math.inf selects the random series
    k_steps: int
    dt_inject: float
    seed: int
    n_components: int = 20
    shared_phase: bool = False

    def __post_init__(self):
        if not (self.f > 0):  # also rejects NaN
            raise ConfigError(f"frequency scale must be positive, got {self.f}")
        if self.k_steps <= 0:
            raise ConfigError("k_steps must be positive")
        if self.dt_inject <= 0:
            raise ConfigError("dt_inject must be positive")
        if self.n_components < 1:
            raise ConfigError("need at least one frequency component")


@dataclass(frozen=True)
class InputSeries:
    values: np.ndarray
    spec: InputSpec


@dataclass(frozen=True)
class TargetSeries:
    """Task target aligned with an input series.

    Entries before `valid_from` are placeholders that must be masked out of
    training and evaluation.
    """

    values: np.ndarray
    valid_from: int
    task: str       # "delay" or "narma"
    param: int      # the delay tau, or the NARMA order n
    constants: tuple[float, float, float, float] | None = None


def component_frequencies(f: float, n_components: int = 20) -> np.ndarray:
    """Equally spaced component frequencies spanning [f/5000, f/50] inclusive."""
    return np.linspace(f / 5000.0, f / 50.0, n_components)


def gen_input(spec: InputSpec) -> InputSeries:
    """Sum-of-sinusoids input rescaled to exact range [0, 1] over the window."""
    if math.isinf(spec.f):
        return gen_random_input(spec.k_steps, spec.seed, dt_inject=spec.dt_inject)
    rng = np.random.default_rng(spec.seed)
    if spec.shared_phase:
        phases = np.full(spec.n_components, rng.random())
    else:
        phases = rng.random(spec.n_components)
    freqs = component_frequencies(spec.f, spec.n_components)
    t = np.arange(spec.k_steps) * spec.dt_inject
    raw = np.sin(2.0 * np.pi * (np.outer(t, freqs) + phases)).sum(axis=1)
    lo, hi = raw.min(), raw.max()
    if hi == lo:
        raise ConfigError("degenerate input window: the generated series is constant")
    return InputSeries(values=(raw - lo) / (hi - lo), spec=spec)


def gen_random_input(k_steps: int, seed: int, dt_inject: float = 1.0) -> InputSeries:
    """Uncorrelated uniform [0, 1] series (the infinite-frequency input)."""
    if k_steps <= 0:
        raise ConfigError("k_steps must be positive")
    rng = np.random.default_rng(seed)
    spec = InputSpec(f=math.inf, k_steps=k_steps, dt_inject=dt_inject, seed=seed)
    return InputSeries(values=rng.random(k_steps), spec=spec)


def target_delay(series: InputSeries, tau: int) -> TargetSeries:
    """Delayed-input target y_k = s_{k - tau}; the first tau entries are invalid."""
    s = series.values
    if not 0 <= tau < len(s):
        raise ConfigError(f"delay {tau} outside [0, {len(s) - 1}]")
    values = np.empty_like(s)
    values[:tau] = 0.0
    values[tau:] = s[: len(s) - tau]
    return TargetSeries(values=values, valid_from=tau, task="delay", param=tau)


def target_narma(series: InputSeries, n: int,
                 constants: tuple[float, float, float, float] = NARMA_CONSTANTS) -> TargetSeries:
    """NARMA-n target.

    y_{k+1} = a y_k + b y_k * sum_{j=1..n} y_{k-j} + c s_{k-n} s_{k-1} + d,
    with y = 0 for k <= n; entries up to and including k = n are invalid.
    Raises ConvergenceError if |y| exceeds 1e3.
    """
    s = np.asarray(series.values, dtype=float)
    if n < 1:
        raise ConfigError("NARMA order must be at least 1")
    if len(s) <= n:
        raise ConfigError(f"series of length {len(s)} too short for NARMA-{n}")
    a, b, c, d = constants
    y = np.zeros(len(s))
    for k in range(n, len(s) - 1):
        y[k + 1] = a * y[k] + b * y[k] * y[k - n:k].sum() + c * s[k - n] * s[k - 1] + d
        if not np.isfinite(y[k + 1]) or abs(y[k + 1]) > _DIVERGENCE_LIMIT:
            raise ConvergenceError(f"NARMA-{n} recurrence diverged at step {k + 1}")
    return TargetSeries(values=y, valid_from=n + 1, task="narma", param=n,
                        constants=tuple(constants))


def shift_target(target: TargetSeries, tau: int) -> TargetSeries:
    """The same task target delayed by tau steps (y_k <- y_{k-tau})."""
    values = np.asarray(target.values)
    if not 0 <= tau < len(values):
        raise ConfigError(f"delay {tau} outside [0, {len(values) - 1}]")
    shifted = np.empty_like(values)
    shifted[:tau] = 0.0
    shifted[tau:] = values[: len(values) - tau]
    return TargetSeries(values=shifted, valid_from=target.valid_from + tau,
                        task=target.task, param=target.param,
                        constants=target.constants)


def fresh_series(series: InputSeries, seed: int) -> InputSeries:
    """Same generation settings, new random seed; used for train/test splits."""
    if math.isinf(series.spec.f):
        return gen_random_input(series.spec.k_steps, seed, dt_inject=series.spec.dt_inject)
    return gen_input(replace(series.spec, seed=seed))
