"""Partial transpose and logarithmic negativity over register bipartitions.

The negativity of a state rho for a bipartition (A, rest) is the log2 trace
norm of the partial transpose over A.  Since the partial transpose is
Hermitian, the trace norm is the sum of absolute eigenvalues.  Bipartitions
are unordered pairs; the canonical key is the smaller side (ties broken
lexicographically), so at N=4 the seven distinct splits are keyed
(1,), (2,), (3,), (4,), (1,2), (1,3), (1,4).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import ConfigError

NEGATIVITY_MODES = ("all", "single-qubit")

# Numerical floor: tiny negative values of a quantity that is nonnegative by
# definition are clamped to zero.
_CLAMP = -1e-10


def canonical_bipartition(part, n: int) -> tuple[int, ...]:
    """Canonical key of the unordered pair {part, complement}."""
    side = tuple(sorted(set(int(q) for q in part)))
    if not side or len(side) >= n:
        raise ConfigError(f"bipartition side must be a proper nonempty subset, got {side}")
    if side[0] < 1 or side[-1] > n:
        raise ConfigError(f"bipartition {side} outside register 1..{n}")
    other = tuple(q for q in range(1, n + 1) if q not in side)
    if len(other) < len(side) or (len(other) == len(side) and other < side):
        return other
    return side


def all_bipartitions(n: int) -> list[tuple[int, ...]]:
    """Every distinct bipartition of an n-qubit register (2^(n-1) - 1 of them)."""
    seen: dict[tuple[int, ...], None] = {}
    for size in range(1, n):
        for side in combinations(range(1, n + 1), size):
            seen.setdefault(canonical_bipartition(side, n), None)
    return list(seen)


def singleton_bipartitions(n: int) -> list[tuple[int, ...]]:
    """The n bipartitions isolating one qubit each."""
    return [(q,) for q in range(1, n + 1)]


def partial_transpose(rho: np.ndarray, part) -> np.ndarray:
    """Transpose the indices of subsystem `part` (1-based qubits) only.

    The requested side is transposed literally; transposing the complement
    instead yields the elementwise conjugate (same spectrum).
    """
    rho = np.asarray(rho)
    n = int(round(math.log2(rho.shape[-1])))
    side = tuple(sorted(set(int(q) for q in part)))
    canonical_bipartition(side, n)  # validates the side
    batch = rho.shape[:-2]
    nb = len(batch)
    tensor = rho.reshape(batch + (2,) * (2 * n))
    axes = list(range(nb + 2 * n))
    for q in side:
        r_ax = nb + q - 1
        c_ax = nb + n + q - 1
        axes[r_ax], axes[c_ax] = axes[c_ax], axes[r_ax]
    return tensor.transpose(axes).reshape(rho.shape)


def log_negativity(rho: np.ndarray, part) -> float:
    """log2 of the trace norm of the partial transpose; clamped at zero."""
    pt = partial_transpose(rho, part)
    evals = np.linalg.eigvalsh(pt)
    value = float(np.log2(np.sum(np.abs(evals))))
    if value < _CLAMP:
        return value  # genuinely negative is a bug upstream; do not hide it
    return max(value, 0.0)


@dataclass
class NegativityRecord:
    """Per-bipartition negativities at one sampling instant."""

    per_bipartition: dict[tuple[int, ...], float]
    mean: float
    time_index: int


def mean_log_negativity(rho: np.ndarray, mode: str = "all", time_index: int = 0) -> NegativityRecord:
    """Negativity averaged over bipartitions.

    mode="all" uses every distinct bipartition; mode="single-qubit" averages
    only the splits isolating one qubit each.
    """
    if mode not in NEGATIVITY_MODES:
        raise ConfigError(f"mode must be one of {NEGATIVITY_MODES}, got {mode!r}")
    n = int(round(math.log2(rho.shape[0])))
    parts = all_bipartitions(n) if mode == "all" else singleton_bipartitions(n)
    per = {p: log_negativity(rho, p) for p in parts}
    return NegativityRecord(per_bipartition=per, mean=float(np.mean(list(per.values()))),
                            time_index=time_index)


def negativity_records(states: np.ndarray, start_index: int = 0) -> list[NegativityRecord]:
    """All-bipartition negativity for a stack of states, batched per bipartition.

    `states` has shape (T, dim, dim); one record per state, time_index counted
    from start_index.  The batched eigensolve makes this much faster than
    calling :func:`mean_log_negativity` in a loop.
    """
    states = np.asarray(states)
    t = states.shape[0]
    n = int(round(math.log2(states.shape[-1])))
    parts = all_bipartitions(n)
    values = np.empty((len(parts), t))
    for i, p in enumerate(parts):
        pt = partial_transpose(states, p)
        evals = np.linalg.eigvalsh(pt)
        values[i] = np.log2(np.sum(np.abs(evals), axis=-1))
    values = np.where(values < 0.0, np.maximum(values, 0.0), values)
    records = []
    for k in range(t):
        per = {p: float(values[i, k]) for i, p in enumerate(parts)}
        records.append(NegativityRecord(per_bipartition=per,
                                        mean=float(values[:, k].mean()),
                                        time_index=start_index + k))
    return records


def record_mean(record: NegativityRecord, mode: str = "all") -> float:
    """Mean of a record's entries restricted to the requested bipartition family."""
    if mode == "all":
        return record.mean
    if mode != "single-qubit":
        raise ConfigError(f"mode must be one of {NEGATIVITY_MODES}, got {mode!r}")
    singles = [v for p, v in record.per_bipartition.items() if len(p) == 1]
    if not singles:
        raise ConfigError("record holds no single-qubit bipartitions")
    return float(np.mean(singles))


def trajectory_mean_negativity(records, washout: int) -> float:
    """Arithmetic mean of record means after discarding the first `washout` records."""
    records = list(records)
    if washout < 0 or washout >= len(records):
        raise ConfigError(f"washout {washout} must be < number of records {len(records)}")
    return float(np.mean([r.mean for r in records[washout:]]))
