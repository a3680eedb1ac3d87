"""Sweep orchestration: seeded grids, disorder averaging, persistence.

A sweep point is one (coupling scale, dissipation rate, input frequency,
disorder realization).  Each point gets a deterministic seed derived from the
base seed and its coordinates, so reruns reproduce every number bitwise.
Per point the harness runs the training/test sequences for the capacity
reports and one diagnostics sequence for the entanglement average and the
covariance dimension; one result row is emitted per task (or a single
"none" row for metrics-only sweeps).  Rows are appended to results.csv as
they complete so a crashed point costs one row, never the sweep.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import core, pca, reservoir, signals, training
from .entanglement import record_mean
from .errors import ConfigError

SCHEMA_VERSION = 1

#: Ergodic-to-localized crossover region of the coupling scale at h = 2,
#: used only as a figure annotation (adjacent-gap-ratio estimate; the sweep
#: itself never consumes it).
TRANSITION_REGION_J = (12.0, 40.0)

CSV_COLUMNS = [
    "schema_version", "config_hash", "j_s", "gamma", "f", "realization", "seed",
    "task", "status", "total_capacity", "tau_values", "per_tau", "lambda_per_tau",
    "mean_negativity_all", "mean_negativity_single", "covariance_dimension",
    "runtime_s", "error",
]


def default_j_grid(n_points: int = 24, lo: float = 0.02, hi: float = 100.0) -> tuple[float, ...]:
    """Log-spaced coupling scales spanning both sides of the crossover region."""
    return tuple(float(x) for x in np.geomspace(lo, hi, n_points))


@dataclass(frozen=True)
class SweepSpec:
    j_s_grid: tuple[float, ...] = field(default_factory=default_j_grid)
    gammas: tuple[float, ...] = (0.0, 0.01, 0.05)
    freqs: tuple[float, ...] = (0.2, 1.0, 5.0, math.inf)
    tasks: tuple[str, ...] = ("delay",)
    n_qubits: int = 4
    h: float = 2.0
    dt_inject: float = 2.5
    v_nodes: int = 10
    washout: int = 100
    disorder_realizations: int = 10
    base_seed: int = 0
    train_sequences: int = 4
    train_injections: int = 2000
    test_injections: int = 2000
    diag_injections: int = 400
    tau_max: int = 20
    narma_order: int = 2
    jumps: str = "both"
    n_components: int = 20
    pca_d: int = 32
    pca_epsilon: float = 1e-6
    pca_iterations: int = 200
    early_stop: bool = True

    def __post_init__(self):
        object.__setattr__(self, "j_s_grid", tuple(float(x) for x in self.j_s_grid))
        object.__setattr__(self, "gammas", tuple(float(x) for x in self.gammas))
        object.__setattr__(self, "freqs", tuple(float(x) for x in self.freqs))
        object.__setattr__(self, "tasks", tuple(self.tasks))
        if not self.j_s_grid or not self.gammas or not self.freqs:
            raise ConfigError("sweep grids must be non-empty")
        if any(j <= 0 for j in self.j_s_grid):
            raise ConfigError("coupling scales must be positive")
        if any(g < 0 for g in self.gammas):
            raise ConfigError("dissipation rates must be nonnegative")
        if any(not (f > 0) for f in self.freqs):
            raise ConfigError("frequency scales must be positive (math.inf allowed)")
        for task in self.tasks:
            if task not in ("delay", "narma"):
                raise ConfigError(f"unknown task {task!r}")
        if self.disorder_realizations < 1:
            raise ConfigError("need at least one disorder realization")
        if self.train_sequences < 1:
            raise ConfigError("need at least one training sequence")

    def to_dict(self) -> dict:
        out = asdict(self)
        out["freqs"] = ["inf" if math.isinf(f) else f for f in self.freqs]
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "SweepSpec":
        data = dict(data)
        if "freqs" in data:
            data["freqs"] = tuple(math.inf if f in ("inf", "Infinity") else float(f)
                                  for f in data["freqs"])
        for key in ("j_s_grid", "gammas", "tasks"):
            if key in data:
                data[key] = tuple(data[key])
        return cls(**data)


def config_hash(spec: SweepSpec) -> str:
    payload = json.dumps(spec.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def point_seed(base_seed: int, j_s: float, gamma: float, f: float, realization: int) -> int:
    """Deterministic per-point seed from the base seed and grid coordinates."""
    key = json.dumps([base_seed, repr(float(j_s)), repr(float(gamma)),
                      "inf" if math.isinf(f) else repr(float(f)), realization])
    return int.from_bytes(hashlib.sha256(key.encode()).digest()[:8], "little")


def disorder_seed(base_seed: int, j_s: float, realization: int) -> int:
    """Seed of one coupling-matrix draw.

    Depends only on (base seed, coupling scale, realization index), so the
    same reservoir ensemble underlies every dissipation rate and input
    frequency; comparisons across those axes are paired.
    """
    key = json.dumps([base_seed, "couplings", repr(float(j_s)), realization])
    return int.from_bytes(hashlib.sha256(key.encode()).digest()[:8], "little")


def _make_input(f: float, k_steps: int, dt: float, seed: int, n_components: int) -> signals.InputSeries:
    if math.isinf(f):
        return signals.gen_random_input(k_steps, seed, dt_inject=dt)
    return signals.gen_input(signals.InputSpec(f=f, k_steps=k_steps, dt_inject=dt,
                                               seed=seed, n_components=n_components))


def evaluate_point(spec: SweepSpec, j_s: float, gamma: float, f: float,
                   realization: int) -> list[dict]:
    """All result rows for one sweep point (one per task, or one metrics row)."""
    t_start = time.perf_counter()
    seed = point_seed(spec.base_seed, j_s, gamma, f, realization)
    rng = np.random.default_rng(seed)
    sub_seeds = rng.integers(0, 2 ** 62, size=spec.train_sequences + 2)
    train_seeds = [int(s) for s in sub_seeds[: spec.train_sequences]]
    test_seed = int(sub_seeds[-2])
    diag_seed = int(sub_seeds[-1])

    couplings = core.sample_couplings(
        j_s, disorder_seed(spec.base_seed, j_s, realization), spec.n_qubits)
    params = core.HamiltonianParams(couplings, h=spec.h)
    base_cfg = reservoir.RunConfig(
        register=core.RegisterSpec(spec.n_qubits), hamiltonian=params, gamma=gamma,
        dt_inject=spec.dt_inject, v_nodes=spec.v_nodes, washout=spec.washout,
        jumps=spec.jumps)
    gen = reservoir.build_generator(base_cfg)
    prop = core.make_propagator(gen, spec.dt_inject / spec.v_nodes)

    # Diagnostics sequence: entanglement trajectory and sampled states.
    diag_cfg = reservoir.RunConfig(
        register=base_cfg.register, hamiltonian=params, gamma=gamma,
        dt_inject=spec.dt_inject, v_nodes=spec.v_nodes, washout=spec.washout,
        jumps=spec.jumps, record_states=True, record_negativity=True)
    diag_input = _make_input(f, spec.washout + spec.diag_injections, spec.dt_inject,
                             diag_seed, spec.n_components)
    _, diags = reservoir.run_reservoir(diag_cfg, diag_input, propagator=prop)
    # Time average over post-washout substep samples (injection-instant
    # records are duplicate time points and excluded from the average).
    keep = ~diags.negativity_at_injection
    keep[: spec.washout * (spec.v_nodes + 1)] = False
    post = [r for r, k in zip(diags.negativity, keep) if k]
    neg_all = float(np.mean([record_mean(r, "all") for r in post]))
    neg_single = float(np.mean([record_mean(r, "single-qubit") for r in post]))
    pca_cfg = pca.PcaConfig(d=spec.pca_d, epsilon=spec.pca_epsilon,
                            iterations=spec.pca_iterations, seed=seed)
    dimension = pca.covariance_dimension(pca.embed_states(diags.states), pca_cfg,
                                         washout=spec.washout * spec.v_nodes)

    common = {
        "schema_version": SCHEMA_VERSION,
        "j_s": j_s, "gamma": gamma, "f": f, "realization": realization, "seed": seed,
        "status": "ok", "error": "",
        "mean_negativity_all": neg_all, "mean_negativity_single": neg_single,
        "covariance_dimension": dimension,
    }
    if not spec.tasks:
        row = dict(common)
        row.update(task="none", total_capacity="", tau_values="", per_tau="",
                   lambda_per_tau="", runtime_s=time.perf_counter() - t_start)
        return [row]

    # Training and test sequences share the propagator.
    train_sets = []
    for s in train_seeds:
        series = _make_input(f, spec.train_injections, spec.dt_inject, s, spec.n_components)
        readout, _ = reservoir.run_reservoir(base_cfg, series, propagator=prop)
        train_sets.append((readout, series))
    test_series = _make_input(f, spec.test_injections, spec.dt_inject, test_seed,
                              spec.n_components)
    test_readout, _ = reservoir.run_reservoir(base_cfg, test_series, propagator=prop)

    rows = []
    for task in spec.tasks:
        report = training.total_capacity(
            train_sets, (test_readout, test_series), task=task, tau_max=spec.tau_max,
            narma_order=spec.narma_order,
            early_stop_threshold=training.EARLY_STOP_THRESHOLD if spec.early_stop else None)
        taus = sorted(report.per_tau)
        row = dict(common)
        row.update(
            task=task,
            total_capacity=report.total,
            tau_values="|".join(str(t) for t in taus),
            per_tau="|".join(repr(report.per_tau[t]) for t in taus),
            lambda_per_tau="|".join(repr(report.lambdas[t]) for t in taus),
            runtime_s=time.perf_counter() - t_start,
        )
        rows.append(row)
    return rows


def _evaluate_point_guarded(args) -> list[dict]:
    spec, j_s, gamma, f, realization = args
    try:
        return evaluate_point(spec, j_s, gamma, f, realization)
    except Exception as exc:  # noqa: BLE001 - crash isolation is the contract
        seed = point_seed(spec.base_seed, j_s, gamma, f, realization)
        rows = []
        for task in (spec.tasks or ("none",)):
            rows.append({
                "schema_version": SCHEMA_VERSION,
                "j_s": j_s, "gamma": gamma, "f": f, "realization": realization,
                "seed": seed, "task": task, "status": "failed",
                "total_capacity": "", "tau_values": "", "per_tau": "",
                "lambda_per_tau": "", "mean_negativity_all": "",
                "mean_negativity_single": "", "covariance_dimension": "",
                "runtime_s": "", "error": f"{type(exc).__name__}: {exc}",
            })
        return rows


def _format_value(key: str, value) -> str:
    if isinstance(value, float):
        if key == "runtime_s":
            return f"{value:.3f}"
        if math.isinf(value):
            return "inf"
        return repr(value)
    return str(value)


def write_meta(spec: SweepSpec, out_dir: Path) -> Path:
    meta = {
        "schema_version": SCHEMA_VERSION,
        "config_hash": config_hash(spec),
        "spec": spec.to_dict(),
        "notes": {
            "negativity_average": "post-washout substep samples, injection instants excluded",
            "bipartition_modes": "all = every distinct split; single-qubit = isolating splits",
            "transition_region_j": list(TRANSITION_REGION_J),
            "point_seed": "sha256(base_seed, j_s, gamma, f, realization)",
            "disorder_seed": "sha256(base_seed, 'couplings', j_s, realization); "
                             "shared across gamma and f for paired comparisons",
        },
    }
    path = out_dir / "results.meta.json"
    path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return path


def run_sweep(spec: SweepSpec, out_dir, workers: int = 1) -> list[dict]:
    """Execute the full grid, appending rows to out_dir/results.csv as they finish."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_meta(spec, out_dir)
    chash = config_hash(spec)

    points = [(spec, j_s, gamma, f, r)
              for j_s in spec.j_s_grid
              for gamma in spec.gammas
              for f in spec.freqs
              for r in range(spec.disorder_realizations)]

    all_rows: list[dict] = []
    csv_path = out_dir / "results.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()

        def emit(rows):
            for row in rows:
                row = dict(row)
                row["config_hash"] = chash
                all_rows.append(row)
                writer.writerow({k: _format_value(k, row.get(k, "")) for k in CSV_COLUMNS})
            fh.flush()

        if workers <= 1:
            for args in points:
                emit(_evaluate_point_guarded(args))
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                futures = {pool.submit(_evaluate_point_guarded, args): args
                           for args in points}
                for fut in as_completed(futures):
                    emit(fut.result())

    # Deterministic on-disk order regardless of worker count or completion order.
    _rewrite_sorted(csv_path)
    all_rows.sort(key=_row_order)
    return all_rows


def _row_order(row: dict):
    f = row["f"]
    f = float("inf") if f in ("inf",) else float(f)
    return (float(row["j_s"]), float(row["gamma"]), f,
            int(row["realization"]), str(row["task"]))


def _rewrite_sorted(csv_path: Path) -> None:
    with open(csv_path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    rows.sort(key=_row_order)
    with open(csv_path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)


def stationary_point_rate(values: np.ndarray) -> float:
    """Sign changes of the discrete first difference, per step."""
    diff = np.diff(np.asarray(values, dtype=float))
    signs = np.sign(diff)
    signs = signs[signs != 0]
    if len(signs) < 2:
        return 0.0
    return float(np.sum(signs[1:] != signs[:-1])) / len(values)


def infinity_scale_factor(spec: SweepSpec) -> float:
    """Rescaling factor standing in for f at the uncorrelated input.

    The factor compares how often the random series turns around with how
    often the f = 5 series does, scaled by 5.
    """
    seed = point_seed(spec.base_seed, 0.0, 0.0, math.inf, -1)
    random_series = signals.gen_random_input(spec.test_injections, seed,
                                             dt_inject=spec.dt_inject)
    five = _make_input(5.0, spec.test_injections, spec.dt_inject, seed,
                       spec.n_components)
    rate_f5 = stationary_point_rate(five.values)
    if rate_f5 == 0.0:
        raise ConfigError("f=5 reference series has no stationary points")
    return 5.0 * stationary_point_rate(random_series.values) / rate_f5


def rescale_capacity_by_frequency(rows, spec: SweepSpec) -> list[dict]:
    """Capacity rows with total capacity multiplied by the input frequency.

    Finite f multiplies directly; the uncorrelated series uses the
    stationary-point comparison against the f = 5 series, which must be
    present in the rows.
    """
    rows = [dict(r) for r in rows
            if r.get("task") not in ("none",) and r.get("status") == "ok"]
    has_inf = any(math.isinf(_row_f(r)) for r in rows)
    if has_inf:
        if not any(_row_f(r) == 5.0 for r in rows):
            raise ConfigError("rescaling the uncorrelated input requires f = 5 rows")
        inf_factor = infinity_scale_factor(spec)
    out = []
    for row in rows:
        f = _row_f(row)
        factor = inf_factor if math.isinf(f) else f
        row["frequency_scale_factor"] = factor
        row["rescaled_capacity"] = float(row["total_capacity"]) * factor
        out.append(row)
    return out


def _row_f(row: dict) -> float:
    f = row["f"]
    return float("inf") if f in ("inf",) else float(f)
