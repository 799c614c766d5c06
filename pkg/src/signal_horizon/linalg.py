"""Dense complex linear algebra for small Hermitian operators.

Eigendecomposition is complex Jacobi: each pivot (p, q) is first
phase-rotated to a real off-diagonal entry and then annihilated with a real
Givens rotation. Pivots are visited in round-robin order so that each round
is a batch of disjoint rotations applied with whole-array operations.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError, EigensolverError
from .pauli import HERMITIAN_TOL, MAX_DENSE_QUBITS, check_hermitian

OFFDIAG_TOL = 1e-12
MAX_SWEEPS = 60


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape[0] * b.shape[0] > 1 << MAX_DENSE_QUBITS:
        raise ConfigError(
            f"Kronecker product of dims {a.shape[0]} and {b.shape[0]} exceeds 2**{MAX_DENSE_QUBITS}"
        )
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ConfigError("non-finite entries in Kronecker factor")
    return np.kron(a, b)


def _offdiag_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(off.real**2 + off.imag**2)))


def round_robin(dim: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Disjoint pivot pairs covering every (p, q) exactly once per sweep (circle method)."""
    players = list(range(dim + (dim % 2)))
    m = len(players)
    rounds = []
    for _ in range(m - 1):
        pairs = [
            (min(players[i], players[m - 1 - i]), max(players[i], players[m - 1 - i]))
            for i in range(m // 2)
        ]
        # the extra player for odd dim is a bye
        pairs = [pq for pq in pairs if pq[1] < dim]
        rounds.append((np.array([p for p, _ in pairs]), np.array([q for _, q in pairs])))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def hermitian_eigh(
    mat: np.ndarray, tol: float = OFFDIAG_TOL, max_sweeps: int = MAX_SWEEPS
) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and unitary eigenvector columns of a Hermitian matrix.

    Jacobi sweeps in round-robin order: every round annihilates a set of
    disjoint pivots (p, q) at once. Iterates until the off-diagonal Frobenius
    norm is below ``tol * ||A||_F``; raises :class:`EigensolverError` after
    ``max_sweeps`` without convergence.
    """
    a = np.array(mat, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ConfigError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise EigensolverError("non-finite entries")
    check_hermitian(a, HERMITIAN_TOL)
    a = 0.5 * (a + a.conj().T)
    dim = a.shape[0]
    vecs = np.eye(dim, dtype=complex)

    scale = float(np.linalg.norm(a))
    if scale == 0.0 or dim == 1:
        return np.sort(np.diag(a).real), vecs
    threshold = tol * scale
    # pivots below this are numerically zero already
    negligible = 1e-3 * threshold / dim
    schedule = round_robin(dim)

    for _ in range(max_sweeps):
        if _offdiag_norm(a) <= threshold:
            break
        for p, q in schedule:
            apq = a[p, q]
            r = np.abs(apq)
            active = r > negligible
            if not np.any(active):
                continue
            r_safe = np.where(active, r, 1.0)
            phase = np.where(active, apq / r_safe, 1.0)
            tau = (a[q, q].real - a[p, p].real) / (2.0 * r_safe)
            t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
            t = np.where(active, t, 0.0)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            # per pivot: U = diag(1, conj(phase)) @ [[c, s], [-s, c]] on (p, q)
            sp = s * phase.conj()
            cp = c * phase.conj()
            col_p, col_q = a[:, p], a[:, q]
            a[:, p] = col_p * c - col_q * sp
            a[:, q] = col_p * s + col_q * cp
            row_p, row_q = a[p, :], a[q, :]
            a[p, :] = c[:, None] * row_p - sp.conj()[:, None] * row_q
            a[q, :] = s[:, None] * row_p + cp.conj()[:, None] * row_q
            a[p, q] = 0.0
            a[q, p] = 0.0
            a[p, p] = a[p, p].real
            a[q, q] = a[q, q].real
            vec_p, vec_q = vecs[:, p], vecs[:, q]
            vecs[:, p] = vec_p * c - vec_q * sp
            vecs[:, q] = vec_p * s + vec_q * cp
    else:
        if _offdiag_norm(a) > threshold:
            raise EigensolverError(
                f"Jacobi iteration did not converge in {max_sweeps} sweeps "
                f"(off-diagonal norm {_offdiag_norm(a):.3e})"
            )

    vals = np.diag(a).real
    order = np.argsort(vals, kind="stable")
    return vals[order], vecs[:, order]


def hermitian_eigenvalues(mat: np.ndarray) -> np.ndarray:
    return hermitian_eigh(mat)[0]


def trace_norm(mat: np.ndarray) -> float:
    return float(np.sum(np.abs(hermitian_eigenvalues(mat))))


def sign_operator(mat: np.ndarray, zero_tol: float = 1e-12) -> np.ndarray:
    """Operator with A's eigenvectors and eigenvalues sign(lambda); zero maps to 0.

    Eigenvalues within ``zero_tol * max|lambda|`` of zero count as zero.
    """
    vals, vecs = hermitian_eigh(mat)
    cutoff = zero_tol * max(1.0, float(np.max(np.abs(vals)))) if vals.size else 0.0
    signs = np.where(np.abs(vals) <= cutoff, 0.0, np.sign(vals))
    return (vecs * signs) @ vecs.conj().T


def trace_product(a: np.ndarray, b: np.ndarray) -> complex:
    """Tr(A @ B) as sum_ij A_ij B_ji, without forming the product."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ConfigError(f"shape mismatch in trace product: {a.shape} vs {b.shape}")
    return complex(np.sum(a * b.T))
