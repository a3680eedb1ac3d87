"""Regularized linear readout training and memory-capacity evaluation.

A readout is a ridge regression from the N*V virtual-node signals onto a
task target, with an unpenalized bias.  Performance per delay is the squared
Pearson correlation between prediction and target on held-out data; the
total capacity sums these over delays.  The regularization strength is
chosen on a validation split of the training data so the test sequence never
influences model selection.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, IllConditionedError
from .reservoir import ReadoutMatrix
from .signals import InputSeries, TargetSeries, shift_target, target_delay, target_narma

#: NARMA order of the nonlinear task (the recurrence is stable for inputs in
#: [0, 1] at low orders; higher orders can diverge on slowly varying inputs).
DEFAULT_NARMA_ORDER = 2

#: Default regularization grid: 17 log-spaced points over 1e-9 .. 1e-1.
LAMBDA_GRID: tuple[float, ...] = tuple(float(x) for x in np.logspace(-9.0, -1.0, 17))

VALIDATION_FRACTION = 0.25
EARLY_STOP_THRESHOLD = 0.01
EARLY_STOP_RUNS = 3


@dataclass
class RidgeModel:
    """Linear readout; `weights` holds the feature weights with the bias last."""

    weights: np.ndarray
    lam: float

    def predict(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x) @ self.weights[:-1] + self.weights[-1]


@dataclass
class CapacityReport:
    per_tau: dict[int, float]
    lambdas: dict[int, float]
    total: float
    tau_max: int
    task: str


class _CenteredSolver:
    """Shared SVD of a centered design matrix; solves every lambda cheaply.

    Centering the features and the target makes the bias unpenalized: the
    solution satisfies the normal equations of [X, 1] with the ridge penalty
    applied to the feature block only.
    """

    def __init__(self, x: np.ndarray):
        x = np.asarray(x, dtype=float)
        if x.ndim != 2:
            raise ConfigError("design matrix must be 2-D")
        self.mean = x.mean(axis=0)
        self.u, self.s, vt = np.linalg.svd(x - self.mean, full_matrices=False)
        self.v = vt.T
        self.n_rows = x.shape[0]

    def solve(self, y: np.ndarray, lam: float) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        y_mean = y.mean()
        coeffs = self.u.T @ (y - y_mean)
        if lam == 0.0:
            cutoff = max(self.u.shape[0], self.v.shape[0]) * np.finfo(float).eps * self.s[0]
            if self.s[-1] <= cutoff:
                raise IllConditionedError(
                    "singular design at lambda = 0; use a positive regularization")
            filt = coeffs / self.s
        else:
            filt = coeffs * self.s / (self.s ** 2 + lam)
        w = self.v @ filt
        bias = y_mean - self.mean @ w
        return np.append(w, bias)


def _as_feature_target(x, y) -> tuple[np.ndarray, np.ndarray]:
    """Extract aligned valid rows from (ReadoutMatrix | array, TargetSeries | array)."""
    if isinstance(x, ReadoutMatrix):
        start = x.valid_from
        rows = x.rows
    else:
        start = 0
        rows = np.asarray(x, dtype=float)
    if isinstance(y, TargetSeries):
        start = max(start, y.valid_from)
        target = y.values
    else:
        target = np.asarray(y, dtype=float)
    if len(rows) != len(target):
        raise ConfigError(f"feature rows {len(rows)} != target length {len(target)}")
    return rows[start:], target[start:]


def ridge_fit(x, y, lam: float, fit_intercept: bool = True) -> RidgeModel:
    """w = (X^T X + lam I)^-1 X^T y via SVD, bias appended and unpenalized.

    Accepts raw arrays or (ReadoutMatrix, TargetSeries), in which case only
    the aligned valid rows enter the fit.
    """
    if lam < 0:
        raise ConfigError("regularization strength must be nonnegative")
    rows, target = _as_feature_target(x, y)
    if rows.shape[0] < rows.shape[1]:
        warnings.warn(f"fewer rows ({rows.shape[0]}) than features ({rows.shape[1]})",
                      stacklevel=2)
    if not fit_intercept:
        u, s, vt = np.linalg.svd(rows, full_matrices=False)
        if lam == 0.0:
            cutoff = max(rows.shape) * np.finfo(float).eps * (s[0] if len(s) else 0.0)
            if len(s) == 0 or s[-1] <= cutoff:
                raise IllConditionedError(
                    "singular design at lambda = 0; use a positive regularization")
            filt = (u.T @ target) / s
        else:
            filt = (u.T @ target) * s / (s ** 2 + lam)
        return RidgeModel(weights=np.append(vt.T @ filt, 0.0), lam=lam)
    solver = _CenteredSolver(rows)
    return RidgeModel(weights=solver.solve(target, lam), lam=lam)


def memory_capacity(y_pred, y_target) -> float:
    """Squared Pearson correlation cov^2 / (var * var), in [0, 1].

    Zero variance on either side makes the measure undefined; reported as 0
    with a warning so sweep tables stay rectangular.
    """
    y_pred = np.asarray(y_pred, dtype=float)
    y_target = np.asarray(y_target, dtype=float)
    if y_pred.shape != y_target.shape or y_pred.ndim != 1 or len(y_pred) < 2:
        raise ConfigError("need two equal-length 1-D series of length >= 2")
    dp = y_pred - y_pred.mean()
    dt = y_target - y_target.mean()
    vp = float(dp @ dp)
    vt = float(dt @ dt)
    if vp == 0.0 or vt == 0.0:
        warnings.warn("zero variance; capacity undefined, reporting 0", stacklevel=2)
        return 0.0
    cov = float(dp @ dt)
    return cov * cov / (vp * vt)


def select_lambda(x, y, grid=LAMBDA_GRID, val_fraction: float = VALIDATION_FRACTION
                  ) -> tuple[RidgeModel, float]:
    """Pick the grid lambda maximizing capacity on a held-out validation split.

    The trailing `val_fraction` of the valid rows is the validation block;
    the winning lambda (ties go to the smaller value) is refit on all rows.
    """
    grid = list(grid)
    if not grid:
        raise ConfigError("lambda grid must be non-empty")
    rows, target = _as_feature_target(x, y)
    split = max(1, int(round(len(rows) * (1.0 - val_fraction))))
    split = min(split, len(rows) - 1)
    solver = _CenteredSolver(rows[:split])
    best_lam, best_cap = None, -1.0
    for lam in sorted(grid):
        w = solver.solve(target[:split], lam)
        pred = rows[split:] @ w[:-1] + w[-1]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            cap = memory_capacity(pred, target[split:])
        if cap > best_cap:
            best_lam, best_cap = lam, cap
    model = ridge_fit(rows, target, best_lam)
    return model, best_lam


class _TargetFactory:
    """Per-sequence targets at any delay; the NARMA base series is cached."""

    def __init__(self, task: str, narma_order: int):
        if task not in ("delay", "narma"):
            raise ConfigError(f"unknown task {task!r}; expected 'delay' or 'narma'")
        self.task = task
        self.narma_order = narma_order
        self._base: dict[int, TargetSeries] = {}

    def target(self, series: InputSeries, tau: int) -> TargetSeries:
        if self.task == "delay":
            return target_delay(series, tau)
        key = id(series)
        if key not in self._base:
            self._base[key] = target_narma(series, self.narma_order)
        return shift_target(self._base[key], tau)


def total_capacity(train_sets, test_set, task: str = "delay", *,
                   tau_max: int = 20,
                   narma_order: int = DEFAULT_NARMA_ORDER,
                   lambda_grid=LAMBDA_GRID,
                   val_fraction: float = VALIDATION_FRACTION,
                   early_stop_threshold: float | None = EARLY_STOP_THRESHOLD,
                   early_stop_runs: int = EARLY_STOP_RUNS) -> CapacityReport:
    """Independent readout per delay, capacities summed over delays.

    train_sets: list of (ReadoutMatrix, InputSeries) pairs; test_set one such
    pair.  The per-delay target is the delayed input for the linear task and
    the delayed NARMA series (fixed order) for the nonlinear one.  For every
    delay, lambda is selected on a validation split of the training
    sequences, the readout is refit on all training rows, and the capacity is
    evaluated on the test sequence.  Iteration stops early once
    `early_stop_runs` consecutive capacities fall below `early_stop_threshold`
    (pass early_stop_threshold=None to disable).
    """
    if not train_sets:
        raise ConfigError("need at least one training sequence")
    factory = _TargetFactory(task, narma_order)
    test_readout, test_input = test_set
    per_tau: dict[int, float] = {}
    lambdas: dict[int, float] = {}
    small_run = 0
    # The design matrices depend on tau only through the valid-row start, so
    # the (expensive) SVDs are cached per start layout and shared across
    # delays and the whole lambda grid.
    solver_cache: dict[tuple[int, ...], tuple[_CenteredSolver, _CenteredSolver]] = {}
    for tau in range(tau_max + 1):
        fit_blocks, val_blocks, starts = [], [], []
        for readout, series in train_sets:
            tgt = factory.target(series, tau)
            rows, target = _as_feature_target(readout, tgt)
            starts.append(len(series.values) - len(rows))
            split = max(1, int(round(len(rows) * (1.0 - val_fraction))))
            split = min(split, len(rows) - 1)
            fit_blocks.append((rows[:split], target[:split]))
            val_blocks.append((rows[split:], target[split:]))
        fit_y = np.concatenate([b[1] for b in fit_blocks])
        val_x = np.concatenate([b[0] for b in val_blocks])
        val_y = np.concatenate([b[1] for b in val_blocks])

        key = tuple(starts)
        if key not in solver_cache:
            fit_x = np.concatenate([b[0] for b in fit_blocks])
            full_x = np.concatenate([np.concatenate([f[0], v[0]])
                                     for f, v in zip(fit_blocks, val_blocks)])
            solver_cache[key] = (_CenteredSolver(fit_x), _CenteredSolver(full_x))
        fit_solver, full_solver = solver_cache[key]

        best_lam, best_cap = None, -1.0
        for lam in sorted(lambda_grid):
            w = fit_solver.solve(fit_y, lam)
            pred = val_x @ w[:-1] + w[-1]
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                cap = memory_capacity(pred, val_y)
            if cap > best_cap:
                best_lam, best_cap = lam, cap

        full_y = np.concatenate([np.concatenate([f[1], v[1]])
                                 for f, v in zip(fit_blocks, val_blocks)])
        model = RidgeModel(weights=full_solver.solve(full_y, best_lam), lam=best_lam)

        test_tgt = factory.target(test_input, tau)
        rows, target = _as_feature_target(test_readout, test_tgt)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            cap = memory_capacity(model.predict(rows), target)
        per_tau[tau] = cap
        lambdas[tau] = float(best_lam)

        if early_stop_threshold is not None:
            small_run = small_run + 1 if cap < early_stop_threshold else 0
            if small_run >= early_stop_runs:
                break
    total = float(sum(per_tau[t] for t in sorted(per_tau)))
    return CapacityReport(per_tau=per_tau, lambdas=lambdas, total=total,
                          tau_max=tau_max, task=task)
