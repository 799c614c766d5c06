"""Independent single-qubit depolarizing noise.

Two realizations of the same channel: a Kraus sum on density matrices, and
the equivalent diagonal contraction lambda(p)**weight on Pauli coefficients.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ConfigError
from .pauli import SINGLE_QUBIT, PauliString, SignalCoefficients

P_MAX_PHYSICAL = 0.75


def check_p(p: float) -> float:
    p = float(p)
    if not (0.0 <= p <= 1.0) or math.isnan(p):
        raise ConfigError(f"depolarizing probability must lie in [0, 1], got {p}")
    return p


def depolarizing_lambda(p: float) -> float:
    """Pauli contraction factor 1 - 4p/3 of the single-qubit channel."""
    return 1.0 - 4.0 * check_p(p) / 3.0


def _conjugate_qubit(rho: np.ndarray, op: np.ndarray, q: int, n: int) -> np.ndarray:
    d_lo, d_hi = 1 << q, 1 << (n - q - 1)
    t = rho.reshape(d_lo, 2, d_hi, d_lo, 2, d_hi)
    t = np.einsum("ab,ibjkcl,dc->iajkdl", op, t, op.conj(), optimize=False)
    return t.reshape(rho.shape)


def depolarize_density(rho: np.ndarray, p: float) -> np.ndarray:
    """Apply D_p to every qubit: (1-p) rho + p/3 sum_a s_a rho s_a."""
    p = check_p(p)
    rho = np.asarray(rho, dtype=complex)
    dim = rho.shape[0]
    n = dim.bit_length() - 1
    if rho.ndim != 2 or (1 << n) != dim:
        raise ConfigError(f"expected a 2**n square density matrix, got shape {rho.shape}")
    if p == 0.0:
        return rho.copy()
    out = rho
    for q in range(n):
        mixed = sum(_conjugate_qubit(out, SINGLE_QUBIT[a], q, n) for a in "XYZ")
        out = (1.0 - p) * out + (p / 3.0) * mixed
    return out


def contract_signal(coeffs: SignalCoefficients, p: float) -> SignalCoefficients:
    """Scale every coefficient by lambda(p)**weight (weight 0 is left alone)."""
    lam = depolarizing_lambda(p)
    return SignalCoefficients(
        coeffs.n, {pauli: value * lam**pauli.weight for pauli, value in coeffs.items()}
    )


def contract_value(value: float, pauli: PauliString, p: float) -> float:
    return value * depolarizing_lambda(p) ** pauli.weight
