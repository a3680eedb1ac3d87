"""Independent oracles and state constructors shared by the test modules.

Everything here is deliberately written from first principles (explicit index
loops, direct matrix arithmetic, generic ODE integration) so it never shares
code paths with the package implementations it checks.
"""

import numpy as np

SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SY = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SZ = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
ID2 = np.eye(2, dtype=complex)


def kron_chain(ops):
    out = np.array([[1.0 + 0.0j]])
    for op in ops:
        out = np.kron(out, op)
    return out


def site_op(op, site, n):
    """1-based embedding, independent of the package helper."""
    return kron_chain([op if q == site else ID2 for q in range(1, n + 1)])


def random_density_matrix(n, seed, rank=None):
    """Ginibre-style random mixed state on n qubits."""
    dim = 2 ** n
    rank = rank or dim
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def random_pure_state(n, seed):
    dim = 2 ** n
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    psi /= np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def bell_state():
    """|Phi+> = (|00> + |11>)/sqrt(2) as a density matrix."""
    psi = np.zeros(4, dtype=complex)
    psi[0] = psi[3] = 1.0 / np.sqrt(2.0)
    return np.outer(psi, psi.conj())


def ghz_state(n):
    dim = 2 ** n
    psi = np.zeros(dim, dtype=complex)
    psi[0] = psi[-1] = 1.0 / np.sqrt(2.0)
    return np.outer(psi, psi.conj())


def lindblad_rhs(rho, h_mat, jumps, gamma):
    """Direct matrix-form right-hand side of the master equation."""
    out = -1.0j * (h_mat @ rho - rho @ h_mat)
    for op in jumps:
        anti = op.conj().T @ op
        out = out + gamma * (op @ rho @ op.conj().T - 0.5 * (anti @ rho + rho @ anti))
    return out


def integrate_lindblad(rho0, h_mat, jumps, gamma, t, rtol=1e-10, atol=1e-12):
    """Adaptive Runge-Kutta integration of the master equation (test oracle)."""
    from scipy.integrate import solve_ivp

    dim = rho0.shape[0]

    def rhs(_t, y):
        rho = y.reshape(dim, dim)
        return lindblad_rhs(rho, h_mat, jumps, gamma).reshape(-1)

    sol = solve_ivp(rhs, (0.0, t), rho0.reshape(-1).astype(complex),
                    method="DOP853", rtol=rtol, atol=atol)
    return sol.y[:, -1].reshape(dim, dim)


def partial_trace_loops(rho, keep, n):
    """Explicit index-summation partial trace; keep is 1-based and sorted."""
    keep = sorted(keep)
    drop = [q for q in range(1, n + 1) if q not in keep]
    k = len(keep)
    out = np.zeros((2 ** k, 2 ** k), dtype=complex)

    def assemble(bits_keep_row, bits_keep_col, bits_drop):
        row = col = 0
        for q in range(1, n + 1):
            row <<= 1
            col <<= 1
            if q in keep:
                idx = keep.index(q)
                row |= bits_keep_row[idx]
                col |= bits_keep_col[idx]
            else:
                idx = drop.index(q)
                row |= bits_drop[idx]
                col |= bits_drop[idx]
        return row, col

    for r in range(2 ** k):
        bits_r = [(r >> (k - 1 - i)) & 1 for i in range(k)]
        for c in range(2 ** k):
            bits_c = [(c >> (k - 1 - i)) & 1 for i in range(k)]
            val = 0.0 + 0.0j
            for d in range(2 ** len(drop)):
                bits_d = [(d >> (len(drop) - 1 - i)) & 1 for i in range(len(drop))]
                row, col = assemble(bits_r, bits_c, bits_d)
                val += rho[row, col]
            out[r, c] = val
    return out


def partial_transpose_loops(rho, part, n):
    """Explicit index-swap partial transpose over 1-based qubit set `part`."""
    dim = 2 ** n
    out = np.zeros_like(np.asarray(rho, dtype=complex))
    part = set(part)

    def swap_bits(row, col):
        r2 = c2 = 0
        for q in range(1, n + 1):
            shift = n - q
            rb = (row >> shift) & 1
            cb = (col >> shift) & 1
            if q in part:
                rb, cb = cb, rb
            r2 |= rb << shift
            c2 |= cb << shift
        return r2, c2

    for row in range(dim):
        for col in range(dim):
            r2, c2 = swap_bits(row, col)
            out[r2, c2] = rho[row, col]
    return out


def log_negativity_eigensolve(rho, part, n):
    """log2 trace norm of the partial transpose, via a dense eigensolve."""
    pt = partial_transpose_loops(rho, part, n)
    evals = np.linalg.eigvalsh(pt)
    return float(np.log2(np.sum(np.abs(evals))))
