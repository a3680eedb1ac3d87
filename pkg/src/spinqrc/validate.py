"""Self-contained invariant suite behind the `validate` CLI subcommand.

Each check is quick and prints one PASS/FAIL line; the suite returns True
only if everything passes.  The heavy behavioural sweeps live in the test
suite, not here.
"""

from __future__ import annotations

import math

import numpy as np

from . import core, entanglement, pca, reservoir, signals, training


def _random_state(n, seed):
    rng = np.random.default_rng(seed)
    dim = 2 ** n
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def _check_generator_rhs() -> bool:
    worst = 0.0
    for n, seed in ((2, 0), (4, 1)):
        cm = core.sample_couplings(1.0, seed=seed, n=n)
        h_mat = core.build_hamiltonian(core.HamiltonianParams(cm, h=2.0))
        jumps = core.build_jump_operators(n)
        gen = core.build_liouvillian(h_mat, jumps, gamma=0.01)
        for k in range(10):
            rho = _random_state(n, 100 + k)
            lhs = core.devectorize(gen.liouvillian @ core.vectorize(rho), 2 ** n)
            rhs = -1j * (h_mat @ rho - rho @ h_mat)
            for op in jumps:
                anti = op.conj().T @ op
                rhs = rhs + 0.01 * (op @ rho @ op.conj().T - 0.5 * (anti @ rho + rho @ anti))
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst < 1e-12


def _check_propagator() -> bool:
    cm = core.sample_couplings(1.0, seed=3, n=2)
    h_mat = core.build_hamiltonian(core.HamiltonianParams(cm, h=2.0))
    gen = core.build_liouvillian(h_mat, core.build_jump_operators(2), gamma=0.02)
    p1 = core.make_propagator(gen, dt=0.25)
    p2 = core.make_propagator(gen, dt=0.5)
    semigroup = float(np.max(np.abs(p1.matrix @ p1.matrix - p2.matrix)))
    rho = _random_state(2, 7)
    for _ in range(200):
        rho = core.evolve(rho, p1)
    trace_ok = abs(np.trace(rho).real - 1.0) < 1e-10
    eig_ok = float(np.min(np.linalg.eigvalsh(rho))) > -1e-8
    return semigroup < 1e-10 and trace_ok and eig_ok


def _check_negativity() -> bool:
    psi = np.zeros(4, dtype=complex)
    psi[0] = psi[3] = 1 / math.sqrt(2)
    bell = np.outer(psi, psi.conj())
    padded = np.kron(bell, np.diag([1.0, 0, 0, 0]).astype(complex))
    bell_ok = abs(entanglement.log_negativity(padded, [1]) - 1.0) < 1e-10
    product = _random_state(1, 8)
    for s in (9, 10, 11):
        product = np.kron(product, _random_state(1, s))
    sep_ok = entanglement.log_negativity(product, [1]) < 1e-9
    injected = core.inject_input(_random_state(4, 12), 0.3)
    drop_ok = entanglement.mean_log_negativity(
        injected, mode="single-qubit").per_bipartition[(1,)] <= 1e-10
    return bell_ok and sep_ok and drop_ok


def _check_ridge() -> bool:
    rng = np.random.default_rng(13)
    x = rng.normal(size=(50, 5))
    y = rng.normal(size=50)
    model = training.ridge_fit(x, y, 0.1)
    xb = np.column_stack([x, np.ones(50)])
    penalty = 0.1 * np.eye(6)
    penalty[-1, -1] = 0.0
    direct = np.linalg.solve(xb.T @ xb + penalty, xb.T @ y)
    fit_ok = float(np.max(np.abs(model.weights - direct))) < 1e-8
    cap_ok = abs(training.memory_capacity(2.0 * y - 1.0, y) - 1.0) < 1e-12
    return fit_ok and cap_ok


def _check_pca() -> bool:
    rng = np.random.default_rng(14)
    basis, _ = np.linalg.qr(rng.normal(size=(64, 3)))
    points = rng.normal(size=(300, 3)) @ basis.T + 1.0
    cfg = pca.PcaConfig(d=15, iterations=50, seed=15)
    return pca.covariance_dimension(points, cfg) == 3.0


def _check_narma() -> bool:
    series = signals.InputSeries(values=np.zeros(3000),
                                 spec=signals.InputSpec(f=1.0, k_steps=3000,
                                                        dt_inject=2.5, seed=0))
    tgt = signals.target_narma(series, 2)
    y = 0.0
    a, b, _, d = signals.NARMA_CONSTANTS
    for _ in range(100_000):
        y = a * y + 2 * b * y * y + d
    return abs(tgt.values[-1] - y) < 1e-10


def _check_reservoir() -> bool:
    cm = core.sample_couplings(0.0, seed=16, n=4)
    cfg = reservoir.RunConfig(register=core.RegisterSpec(4),
                              hamiltonian=core.HamiltonianParams(cm, h=2.0),
                              gamma=0.0, washout=0)
    series = signals.gen_random_input(20, seed=17, dt_inject=2.5)
    readout, _ = reservoir.run_reservoir(cfg, series)
    return float(np.max(np.abs(readout.rows[:, 0] - (1 - 2 * series.values)))) < 1e-6


CHECKS = [
    ("generator matches direct master-equation right-hand side", _check_generator_rhs),
    ("propagator semigroup and trace/positivity stability", _check_propagator),
    ("negativity oracles (Bell pair, separable states, injection drop)", _check_negativity),
    ("ridge solution and capacity affine invariance", _check_ridge),
    ("covariance dimension on a synthetic 3-dim subspace", _check_pca),
    ("NARMA fixed point against fixed-point iteration", _check_narma),
    ("uncoupled reservoir readout encodes the input", _check_reservoir),
]


def run_validation(verbose: bool = True) -> bool:
    all_ok = True
    for label, fn in CHECKS:
        try:
            ok = fn()
        except Exception as exc:  # noqa: BLE001 - a crash is a failure
            ok = False
            label = f"{label} ({type(exc).__name__}: {exc})"
        all_ok &= ok
        if verbose:
            print(f"[{'PASS' if ok else 'FAIL'}] {label}")
    return all_ok
