"""Class-conditional state preparation for the product and entangling encodings."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NumericalError
from .pauli import MAX_DENSE_QUBITS, MAX_QUBITS, check_hermitian

DEFAULT_THETA = math.pi / 4
KINDS = ("product", "entangling")

H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
Z = np.diag([1, -1]).astype(complex)


def rz(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


@dataclass(frozen=True)
class EncodingSpec:
    kind: str
    n: int
    theta: float = DEFAULT_THETA

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown encoding kind {self.kind!r}; expected one of {KINDS}")
        if not isinstance(self.n, int) or not 1 <= self.n <= MAX_QUBITS:
            raise ConfigError(f"n must be an integer in [1, {MAX_QUBITS}], got {self.n!r}")
        if self.kind == "entangling" and self.n < 2:
            raise ConfigError("entangling encoding needs n >= 2 for the CNOT ring")
        if not math.isfinite(self.theta):
            raise ConfigError("theta must be finite")


def num_qubits(state: np.ndarray) -> int:
    dim = state.shape[0]
    n = dim.bit_length() - 1
    if (1 << n) != dim or n < 1:
        raise ConfigError(f"state dimension {dim} is not a power of two")
    return n


def _apply_1q(state: np.ndarray, gate: np.ndarray, q: int, n: int) -> np.ndarray:
    """Left-multiply axis 0 of ``state`` by ``gate`` acting on qubit q."""
    rest = state.shape[1:]
    t = state.reshape((1 << q, 2, 1 << (n - q - 1)) + rest)
    t = np.einsum("ab,ibj...->iaj...", gate, t)
    return t.reshape(state.shape)


def _cnot_permutation(control: int, target: int, n: int) -> np.ndarray:
    idx = np.arange(1 << n)
    cbit = 1 << (n - 1 - control)
    tbit = 1 << (n - 1 - target)
    return np.where(idx & cbit, idx ^ tbit, idx)


def apply_gate(state: np.ndarray, gate: str, qubits, theta: float | None = None) -> np.ndarray:
    """Apply H, RZ, Z or CNOT to a statevector (left action) or density matrix (conjugation).

    ``qubits`` is an int for single-qubit gates and a ``(control, target)``
    pair for CNOT.
    """
    state = np.asarray(state, dtype=complex)
    n = num_qubits(state)
    is_density = state.ndim == 2

    if gate == "CNOT":
        control, target = qubits
        for q in (control, target):
            if not 0 <= q < n:
                raise ConfigError(f"qubit index {q} out of range for n={n}")
        if control == target:
            raise ConfigError("CNOT control and target must differ")
        perm = _cnot_permutation(control, target, n)
        # perm is an involution, so it is its own inverse
        return state[np.ix_(perm, perm)] if is_density else state[perm]

    q = int(qubits)
    if not 0 <= q < n:
        raise ConfigError(f"qubit index {q} out of range for n={n}")
    if gate == "H":
        u = H
    elif gate == "Z":
        u = Z
    elif gate == "RZ":
        if theta is None:
            raise ConfigError("RZ needs an angle")
        u = rz(theta)
    else:
        raise ConfigError(f"unsupported gate {gate!r}")

    out = _apply_1q(state, u, q, n)
    if is_density:
        out = _apply_1q(out.T, u.conj(), q, n).T
    return out


def _basis_zero(n: int) -> np.ndarray:
    psi = np.zeros(1 << n, dtype=complex)
    psi[0] = 1.0
    return psi


def product_statevectors(n: int) -> tuple[np.ndarray, np.ndarray]:
    """|+>^n and |->^n."""
    plus = np.array([1, 1], dtype=complex) / math.sqrt(2)
    minus = np.array([1, -1], dtype=complex) / math.sqrt(2)
    psi_p = np.ones(1, dtype=complex)
    psi_m = np.ones(1, dtype=complex)
    for _ in range(n):
        psi_p = np.kron(psi_p, plus)
        psi_m = np.kron(psi_m, minus)
    return psi_p, psi_m


def entangling_statevectors(n: int, theta: float) -> tuple[np.ndarray, np.ndarray]:
    """CNOT-ring . RZ(theta)^n . H^n |0...0>, and the same with Z on qubit 0."""
    if n < 2:
        raise ConfigError("entangling encoding needs n >= 2 for the CNOT ring")
    psi = _basis_zero(n)
    for q in range(n):
        psi = apply_gate(psi, "H", q)
    for q in range(n):
        psi = apply_gate(psi, "RZ", q, theta)
    for q in range(n):
        psi = apply_gate(psi, "CNOT", (q, (q + 1) % n))
    return psi, apply_gate(psi, "Z", 0)


def statevectors(spec: EncodingSpec) -> tuple[np.ndarray, np.ndarray]:
    if spec.kind == "product":
        return product_statevectors(spec.n)
    return entangling_statevectors(spec.n, spec.theta)


def density(psi: np.ndarray) -> np.ndarray:
    n = num_qubits(psi)
    if n > MAX_DENSE_QUBITS:
        raise ConfigError(f"density matrices limited to n <= {MAX_DENSE_QUBITS}, got n={n}")
    return np.outer(psi, psi.conj())


def prepare_product_pair(n: int) -> tuple[np.ndarray, np.ndarray]:
    psi_p, psi_m = product_statevectors(n)
    return density(psi_p), density(psi_m)


def prepare_entangling_pair(spec: EncodingSpec) -> tuple[np.ndarray, np.ndarray]:
    if spec.kind != "entangling":
        raise ConfigError(f"expected an entangling spec, got kind={spec.kind!r}")
    psi_p, psi_m = entangling_statevectors(spec.n, spec.theta)
    return density(psi_p), density(psi_m)


def prepare_pair(spec: EncodingSpec) -> tuple[np.ndarray, np.ndarray]:
    if spec.kind == "product":
        return prepare_product_pair(spec.n)
    return prepare_entangling_pair(spec)


def validate_density(rho: np.ndarray, tol: float = 1e-10) -> None:
    check_hermitian(rho, tol)
    tr = np.trace(rho)
    if abs(tr - 1.0) > tol:
        raise NumericalError(f"density matrix trace {tr.real:.12g} != 1")
    min_eig = float(np.min(np.linalg.eigvalsh(rho)))
    if min_eig < -1e-9:
        raise NumericalError(f"density matrix has negative eigenvalue {min_eig:.3e}")


def signal_operator(rho_plus: np.ndarray, rho_minus: np.ndarray) -> np.ndarray:
    """Delta rho = rho_plus - rho_minus."""
    if rho_plus.shape != rho_minus.shape:
        raise ConfigError(f"shape mismatch: {rho_plus.shape} vs {rho_minus.shape}")
    delta = rho_plus - rho_minus
    check_hermitian(delta, 1e-10)
    if abs(np.trace(delta)) > 1e-10:
        raise NumericalError("signal operator is not traceless")
    return delta
