"""The injection / evolution / readout loop with time multiplexing.

Each injection step re-prepares qubit 1 from the current input sample, then
the register evolves under the exact substep propagator V times; after every
substep all N sigma_z expectations are read out, giving N*V virtual nodes per
injection.  Runs are deterministic functions of (config, input).

Two equivalent execution paths exist.  The stepwise path materializes the
density matrix at every substep, which diagnostics (negativity trajectories,
sampled states for dimensionality estimates) require.  The folded path used
for undiagnosed runs precomputes the readout functionals against propagator
powers, collapsing each injection interval into two dense mat-vecs; it
produces the same readout up to floating-point roundoff at a fraction of the
cost.  The stepwise path re-hermitizes after every substep; the folded path
once per injection interval, which is enough because the propagator itself
preserves hermiticity, so drift between hermitizations is a few ulps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import core
from .entanglement import NegativityRecord, negativity_records
from .errors import ConfigError, NumericError
from .signals import InputSeries

_TRACE_DRIFT_LIMIT = 1e-6


@dataclass(frozen=True)
class RunConfig:
    register: core.RegisterSpec
    hamiltonian: core.HamiltonianParams
    gamma: float
    dt_inject: float = 2.5
    v_nodes: int = 10
    washout: int = 100
    record_states: bool = False
    record_negativity: bool = False
    jumps: str = "both"

    def __post_init__(self):
        if self.gamma < 0:
            raise ConfigError("dissipation rate must be nonnegative")
        if self.dt_inject <= 0:
            raise ConfigError("injection period must be positive")
        if self.v_nodes < 1:
            raise ConfigError("need at least one virtual node per qubit")
        if self.washout < 0:
            raise ConfigError("washout must be nonnegative")
        if self.jumps not in core.JUMP_KINDS:
            raise ConfigError(f"jumps must be one of {core.JUMP_KINDS}")
        if self.hamiltonian.couplings.n != self.register.n_qubits:
            raise ConfigError("coupling matrix size does not match register")


@dataclass
class ReadoutMatrix:
    """K x (N*V) sigma_z readout; column (v, q) is index v * N + q."""

    rows: np.ndarray
    valid_from: int

    @property
    def valid_rows(self) -> np.ndarray:
        return self.rows[self.valid_from:]


@dataclass
class TrajectoryDiagnostics:
    """Optional per-run diagnostics.

    `states` holds the density matrices sampled after every substep, i.e. at
    intervals of dt_inject / v_nodes.  `negativity` holds one record per
    sampling instant in chronological order; instants flagged in
    `negativity_at_injection` were taken immediately after an injection
    (after the qubit-1 reset, before any evolution), the rest after each
    substep.
    """

    negativity: list[NegativityRecord] | None = None
    negativity_time: np.ndarray | None = None
    negativity_at_injection: np.ndarray | None = None
    states: np.ndarray | None = None
    sample_interval: float | None = None


def build_generator(config: RunConfig) -> core.LindbladGenerator:
    h_mat = core.build_hamiltonian(config.hamiltonian)
    jumps = core.build_jump_operators(config.register.n_qubits, kind=config.jumps)
    return core.build_liouvillian(h_mat, jumps, config.gamma)


def _readout_functionals(n: int) -> np.ndarray:
    """Rows mapping a column-stacked state to (sigma_z_1 ... sigma_z_N)."""
    dim = 2 ** n
    z = np.zeros((n, dim * dim))
    diag_idx = np.arange(dim) * (dim + 1)  # position of rho[c, c] in vec(rho)
    for q in range(1, n + 1):
        z[q - 1, diag_idx] = core.sigma_z_diagonal(q, n)
    return z


def _transpose_permutation(dim: int) -> np.ndarray:
    """Index permutation realizing the matrix transpose on column-stacked vectors."""
    i = np.arange(dim * dim)
    return (i % dim) * dim + i // dim


def _inject_vec(v: np.ndarray, s: float, dim: int) -> np.ndarray:
    """Injection acting on a column-stacked state; bitwise-equal to inject_input.

    Qubit 1 is the leading kron factor, so the state splits into dim/2 blocks
    and the qubit-1 trace is the sum of the two diagonal blocks.
    """
    rho = v.reshape(dim, dim, order="F")
    half = dim // 2
    red = rho[:half, :half] + rho[half:, half:]
    # Products of the amplitudes, not (1-s) and s directly, so the result is
    # bitwise identical to inject_input's outer-product construction.
    a = math.sqrt(1.0 - s)
    b = math.sqrt(s)
    out = np.empty((dim, dim), dtype=complex, order="F")
    out[:half, :half] = (a * a) * red
    out[:half, half:] = (a * b) * red
    out[half:, :half] = (a * b) * red
    out[half:, half:] = (b * b) * red
    return out.reshape(-1, order="F")


def run_reservoir(config: RunConfig, input_series: InputSeries, *,
                  initial_state: np.ndarray | None = None,
                  propagator: core.Propagator | None = None
                  ) -> tuple[ReadoutMatrix, TrajectoryDiagnostics]:
    """Drive the register with an input series and collect the readout.

    `initial_state` defaults to the maximally mixed state (immaterial after
    washout).  A prebuilt substep propagator can be supplied to share work
    across runs at the same parameter point.
    """
    n = config.register.n_qubits
    dim = config.register.dim
    steps = len(input_series.values)
    if config.washout >= steps:
        raise ConfigError(f"washout {config.washout} >= total steps {steps}")
    if propagator is None:
        gen = build_generator(config)
        propagator = core.make_propagator(gen, config.dt_inject / config.v_nodes)
    if propagator.matrix.shape != (dim * dim, dim * dim):
        raise ConfigError("propagator dimension does not match register")

    rho = core.maximally_mixed(n) if initial_state is None else np.asarray(initial_state, dtype=complex)
    if rho.shape != (dim, dim):
        raise ConfigError("initial state dimension does not match register")

    if config.record_states or config.record_negativity:
        return _run_stepwise(config, input_series, rho, propagator)
    return _run_folded(config, input_series, rho, propagator)


def _check_trace(v: np.ndarray, diag_idx: np.ndarray, step: int) -> None:
    drift = abs(float(np.real(v[diag_idx].sum())) - 1.0)
    if drift > _TRACE_DRIFT_LIMIT:
        raise NumericError(f"trace drift {drift:.3e} at injection {step}; propagator unstable")


def _run_folded(config, input_series, rho, propagator):
    n, dim, v_count = config.register.n_qubits, config.register.dim, config.v_nodes
    z = _readout_functionals(n).astype(complex)
    # Readout rows for substep j are z @ P^j; the state skips to P^V directly.
    blocks = []
    zp = z
    for _ in range(v_count):
        zp = zp @ propagator.matrix
        blocks.append(zp)
    readout_map = np.concatenate(blocks, axis=0)   # (V*N, dim^2)
    prop_full = np.linalg.matrix_power(propagator.matrix, v_count)
    diag_idx = np.arange(dim) * (dim + 1)
    perm = _transpose_permutation(dim)

    rows = np.empty((len(input_series.values), n * v_count))
    v = core.vectorize(rho)
    for k, s in enumerate(input_series.values):
        v = 0.5 * (v + np.conj(v[perm]))
        v = _inject_vec(v, float(s), dim)
        rows[k] = np.real(readout_map @ v)
        v = prop_full @ v
        _check_trace(v, diag_idx, k)
    return ReadoutMatrix(rows=rows, valid_from=config.washout), TrajectoryDiagnostics()


def _run_stepwise(config, input_series, rho, propagator):
    n, dim, v_count = config.register.n_qubits, config.register.dim, config.v_nodes
    steps = len(input_series.values)
    diag_idx = np.arange(dim) * (dim + 1)
    perm = _transpose_permutation(dim)
    z_diag = np.stack([core.sigma_z_diagonal(q, n) for q in range(1, n + 1)])

    rows = np.empty((steps, n * v_count))
    substep_states = np.empty((steps * v_count, dim, dim), dtype=complex)
    inject_states = np.empty((steps, dim, dim), dtype=complex) if config.record_negativity else None

    v = core.vectorize(rho)
    for k, s in enumerate(input_series.values):
        v = 0.5 * (v + np.conj(v[perm]))
        v = _inject_vec(v, float(s), dim)
        if inject_states is not None:
            inject_states[k] = v.reshape(dim, dim, order="F")
        _check_trace(v, diag_idx, k)
        for j in range(v_count):
            v = propagator.matrix @ v
            v = 0.5 * (v + np.conj(v[perm]))
            rows[k, j * n:(j + 1) * n] = z_diag @ np.real(v[diag_idx])
            substep_states[k * v_count + j] = v.reshape(dim, dim, order="F")

    readout = ReadoutMatrix(rows=rows, valid_from=config.washout)
    diags = TrajectoryDiagnostics(sample_interval=config.dt_inject / config.v_nodes)
    if config.record_states:
        diags.states = substep_states
    if config.record_negativity:
        diags.negativity, diags.negativity_time, diags.negativity_at_injection = \
            _negativity_trajectory(config, inject_states, substep_states)
    return readout, diags


def _negativity_trajectory(config, inject_states, substep_states):
    """Interleave injection-instant and substep records chronologically."""
    steps = inject_states.shape[0]
    v_count = config.v_nodes
    dt = config.dt_inject
    delta = dt / v_count

    inj_records = negativity_records(inject_states)
    sub_records = negativity_records(substep_states)
    records: list[NegativityRecord] = []
    times = np.empty(steps * (v_count + 1))
    at_injection = np.zeros(steps * (v_count + 1), dtype=bool)
    pos = 0
    for k in range(steps):
        records.append(inj_records[k])
        times[pos] = k * dt
        at_injection[pos] = True
        pos += 1
        for j in range(v_count):
            records.append(sub_records[k * v_count + j])
            times[pos] = k * dt + (j + 1) * delta
            pos += 1
    for i, rec in enumerate(records):
        rec.time_index = i
    return records, times, at_injection
