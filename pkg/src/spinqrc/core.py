"""Exact open-system dynamics for small spin registers.

Dense linear algebra for a network of qubits with random Ising (sigma_x
sigma_x) couplings in a uniform transverse sigma_z field, dissipating
through local raising/lowering operators.  States are 2^N x 2^N complex
density matrices.  Superoperators act on column-stacked vectorized states,
so the unitary part of the generator is -i (I kron H - H^T kron I).

Qubits are indexed 1..N; qubit 1 is the input qubit and the first kron
factor, i.e. basis index b addresses qubit q through bit (b >> (N-q)) & 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .errors import ConfigError, NumericError

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
SIGMA_PLUS = 0.5 * (PAULI_X + 1.0j * PAULI_Y)   # [[0, 1], [0, 0]]
SIGMA_MINUS = 0.5 * (PAULI_X - 1.0j * PAULI_Y)  # [[0, 0], [1, 0]]

JUMP_KINDS = ("both", "lower", "raise")


@dataclass(frozen=True)
class RegisterSpec:
    """Qubit register; qubit 1 receives the input."""

    n_qubits: int

    def __post_init__(self):
        if self.n_qubits < 2:
            raise ConfigError(f"need at least 2 qubits, got {self.n_qubits}")

    @property
    def dim(self) -> int:
        return 2 ** self.n_qubits


@dataclass(frozen=True)
class CouplingMatrix:
    """Symmetric zero-diagonal coupling matrix with entries in [-j_s/2, j_s/2]."""

    j: np.ndarray
    j_s: float

    def __post_init__(self):
        j = np.asarray(self.j, dtype=float)
        object.__setattr__(self, "j", j)
        if j.ndim != 2 or j.shape[0] != j.shape[1]:
            raise ConfigError(f"coupling matrix must be square, got {j.shape}")
        if not np.allclose(j, j.T):
            raise ConfigError("coupling matrix must be symmetric")
        if np.any(np.diag(j) != 0.0):
            raise ConfigError("coupling matrix must have zero diagonal")
        if self.j_s < 0:
            raise ConfigError("coupling scale must be nonnegative")
        if np.any(np.abs(j) > self.j_s / 2 + 1e-12):
            raise ConfigError("coupling entries exceed [-j_s/2, j_s/2]")

    @property
    def n(self) -> int:
        return self.j.shape[0]


@dataclass(frozen=True)
class HamiltonianParams:
    couplings: CouplingMatrix
    h: float

    def __post_init__(self):
        if not math.isfinite(self.h):
            raise ConfigError("transverse field must be finite")


@dataclass(frozen=True)
class LindbladGenerator:
    """Vectorized Lindblad generator (column-stacking convention)."""

    liouvillian: np.ndarray
    gamma: float
    dim: int  # Hilbert-space dimension 2^N


@dataclass(frozen=True)
class Propagator:
    """exp(L dt): the exact evolution map over one substep."""

    matrix: np.ndarray
    dt: float


def sample_couplings(j_s: float, seed: int, n: int) -> CouplingMatrix:
    """Draw the n x n coupling matrix, entries i>j iid uniform on [-j_s/2, j_s/2].

    The draw order is fixed (row-major over the strict lower triangle) so a
    given seed always yields the identical matrix.
    """
    if n <= 0:
        raise ConfigError(f"register size must be positive, got {n}")
    if j_s < 0:
        raise ConfigError("coupling scale must be nonnegative")
    rng = np.random.default_rng(seed)
    j = np.zeros((n, n))
    for i in range(n):
        for k in range(i):
            j[i, k] = j[k, i] = rng.uniform(-j_s / 2, j_s / 2)
    return CouplingMatrix(j=j, j_s=j_s)


def embed_operator(op: np.ndarray, site: int, n: int) -> np.ndarray:
    """Embed a single-qubit operator at 1-based position `site` of an n-qubit register."""
    if not 1 <= site <= n:
        raise ConfigError(f"site {site} outside register 1..{n}")
    out = np.array([[1.0 + 0.0j]])
    eye = np.eye(2, dtype=complex)
    for q in range(1, n + 1):
        out = np.kron(out, op if q == site else eye)
    return out


def build_hamiltonian(params: HamiltonianParams) -> np.ndarray:
    """H = sum_{i>j} J_ij sx_i sx_j + h sum_i sz_i, dense 2^N x 2^N."""
    n = params.couplings.n
    dim = 2 ** n
    h_mat = np.zeros((dim, dim), dtype=complex)
    sx = [embed_operator(PAULI_X, q, n) for q in range(1, n + 1)]
    for i in range(1, n + 1):
        for j in range(1, i):
            jij = params.couplings.j[i - 1, j - 1]
            if jij != 0.0:
                h_mat += jij * (sx[i - 1] @ sx[j - 1])
    # The field term is diagonal: sum over qubits of the sigma_z sign pattern.
    diag = np.zeros(dim)
    for q in range(1, n + 1):
        diag += sigma_z_diagonal(q, n)
    h_mat += params.h * np.diag(diag).astype(complex)
    return h_mat


def build_jump_operators(n: int, kind: str = "both") -> list[np.ndarray]:
    """Local raising/lowering operators embedded at every site.

    kind="both" returns [plus_1, minus_1, ..., plus_N, minus_N] (2N operators);
    "lower" or "raise" return the N corresponding operators only.
    """
    if n < 1:
        raise ConfigError(f"register size must be positive, got {n}")
    if kind not in JUMP_KINDS:
        raise ConfigError(f"jump kind must be one of {JUMP_KINDS}, got {kind!r}")
    ops: list[np.ndarray] = []
    for q in range(1, n + 1):
        if kind in ("both", "raise"):
            ops.append(embed_operator(SIGMA_PLUS, q, n))
        if kind in ("both", "lower"):
            ops.append(embed_operator(SIGMA_MINUS, q, n))
    return ops


def build_liouvillian(h_matrix: np.ndarray, jumps: list[np.ndarray], gamma: float) -> LindbladGenerator:
    """Vectorized generator of drho/dt = -i[H,rho] + gamma * sum_i D[L_i](rho).

    Column stacking: vec(A rho B) = (B^T kron A) vec(rho), hence the unitary
    part is -i (I kron H - H^T kron I) and each dissipator contributes
    conj(L) kron L - (I kron L^dag L + (L^dag L)^T kron I) / 2.
    """
    h_matrix = np.asarray(h_matrix, dtype=complex)
    dim = h_matrix.shape[0]
    if h_matrix.shape != (dim, dim):
        raise ConfigError(f"Hamiltonian must be square, got {h_matrix.shape}")
    if gamma < 0:
        raise ConfigError("dissipation rate must be nonnegative")
    eye = np.eye(dim, dtype=complex)
    liou = -1.0j * (np.kron(eye, h_matrix) - np.kron(h_matrix.T, eye))
    for op in jumps:
        op = np.asarray(op, dtype=complex)
        if op.shape != (dim, dim):
            raise ConfigError(f"jump operator shape {op.shape} does not match dim {dim}")
        anti = op.conj().T @ op
        liou += gamma * (
            np.kron(op.conj(), op)
            - 0.5 * np.kron(eye, anti)
            - 0.5 * np.kron(anti.T, eye)
        )
    if not np.all(np.isfinite(liou)):
        raise NumericError("generator contains non-finite entries")
    return LindbladGenerator(liouvillian=liou, gamma=gamma, dim=dim)


def make_propagator(gen: LindbladGenerator, dt: float) -> Propagator:
    """Matrix exponential exp(L dt), computed once and reused for every substep."""
    if dt <= 0:
        raise ConfigError("substep duration must be positive")
    if not np.all(np.isfinite(gen.liouvillian)):
        raise NumericError("generator contains non-finite entries")
    mat = expm(gen.liouvillian * dt)
    if not np.all(np.isfinite(mat)):
        raise NumericError("propagator contains non-finite entries")
    return Propagator(matrix=mat, dt=dt)


def vectorize(rho: np.ndarray) -> np.ndarray:
    """Column-stack a matrix into a vector."""
    return np.asarray(rho).reshape(-1, order="F")


def devectorize(v: np.ndarray, dim: int) -> np.ndarray:
    """Inverse of :func:`vectorize`."""
    return np.asarray(v).reshape((dim, dim), order="F")


def hermitize(rho: np.ndarray) -> np.ndarray:
    """(rho + rho^dag) / 2, killing accumulated floating-point asymmetry."""
    return 0.5 * (rho + rho.conj().T)


def evolve(rho: np.ndarray, prop: Propagator) -> np.ndarray:
    """Advance one substep: vectorize, apply exp(L dt), devectorize, re-hermitize."""
    dim = rho.shape[0]
    if prop.matrix.shape[0] != dim * dim:
        raise ConfigError("propagator dimension does not match state")
    out = devectorize(prop.matrix @ vectorize(rho), dim)
    return hermitize(out)


def maximally_mixed(n: int) -> np.ndarray:
    dim = 2 ** n
    return np.eye(dim, dtype=complex) / dim


def partial_trace(rho: np.ndarray, keep, n: int | None = None) -> np.ndarray:
    """Reduced state on the kept qubits (1-based indices), in ascending order."""
    rho = np.asarray(rho)
    if n is None:
        n = int(round(math.log2(rho.shape[0])))
    keep = sorted(set(int(q) for q in keep))
    if not keep:
        raise ConfigError("must keep at least one qubit")
    if keep[0] < 1 or keep[-1] > n:
        raise ConfigError(f"kept qubits {keep} outside register 1..{n}")
    tensor = rho.reshape([2] * (2 * n))
    # Contract row with column axis for every traced-out qubit, highest first
    # so the original labels of the remaining qubits stay valid.
    drop = [q for q in range(1, n + 1) if q not in keep]
    for q in sorted(drop, reverse=True):
        n_cur = tensor.ndim // 2
        tensor = np.trace(tensor, axis1=q - 1, axis2=n_cur + q - 1)
    k = len(keep)
    return tensor.reshape((2 ** k, 2 ** k))


def inject_input(rho: np.ndarray, s: float) -> np.ndarray:
    """Replace qubit 1 with sqrt(1-s)|0> + sqrt(s)|1>, keeping the rest of the state.

    Returns |psi_s><psi_s| kron Tr_1[rho]; directly after injection qubit 1
    carries <sigma_z> = 1 - 2s.
    """
    if not (0.0 <= s <= 1.0):
        raise ValueError(f"input sample must lie in [0, 1], got {s}")
    n = int(round(math.log2(rho.shape[0])))
    reduced = partial_trace(rho, keep=range(2, n + 1), n=n)
    psi = np.array([math.sqrt(1.0 - s), math.sqrt(s)], dtype=complex)
    return np.kron(np.outer(psi, psi.conj()), reduced)


def sigma_z_diagonal(qubit: int, n: int) -> np.ndarray:
    """Diagonal of sigma_z at 1-based `qubit` in the computational basis."""
    if not 1 <= qubit <= n:
        raise ConfigError(f"qubit {qubit} outside register 1..{n}")
    b = np.arange(2 ** n)
    return 1.0 - 2.0 * ((b >> (n - qubit)) & 1)


def expect_sigma_z(rho: np.ndarray, qubit: int) -> float:
    """Tr(rho sigma_z_qubit); the diagonal observable, so a weighted diagonal sum."""
    n = int(round(math.log2(rho.shape[0])))
    return float(np.real(np.sum(np.diagonal(rho) * sigma_z_diagonal(qubit, n))))


def purity(rho: np.ndarray) -> float:
    return float(np.real(np.trace(rho @ rho)))


def check_density_matrix(rho: np.ndarray, herm_tol: float = 1e-10,
                         trace_tol: float = 1e-10, eig_floor: float = -1e-8) -> None:
    """Raise NumericError unless rho is Hermitian, unit trace, and PSD to tolerance."""
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > herm_tol:
        raise NumericError(f"hermiticity violation {herm:.3e} > {herm_tol:.1e}")
    tr = np.trace(rho)
    if abs(tr - 1.0) > trace_tol:
        raise NumericError(f"trace {tr} deviates from 1 by more than {trace_tol:.1e}")
    lo = float(np.min(np.linalg.eigvalsh(hermitize(rho))))
    if lo < eig_floor:
        raise NumericError(f"negative eigenvalue {lo:.3e} below floor {eig_floor:.1e}")
