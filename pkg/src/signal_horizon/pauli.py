"""n-qubit Pauli strings in (x-mask, z-mask) form.

Qubit 0 is the leftmost letter of the text form and the most significant bit
of both masks, which matches the computational-basis index of a state built
as ``kron(q0, q1, ..., q_{n-1})``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConfigError, InfeasibleError, NumericalError

MAX_QUBITS = 12
# full 4**n coefficient sweeps
MAX_FULL_SWEEP_QUBITS = 6
# k-local enumeration beyond the full-sweep limit
MAX_LARGE_N_LOCALITY = 3
# realized 2**n x 2**n operators
MAX_DENSE_QUBITS = 10

HERMITIAN_TOL = 1e-9
IMAG_TOL = 1e-10

_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
_BITS_LETTER = {bits: letter for letter, bits in _LETTER_BITS.items()}

SINGLE_QUBIT = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-qubit Paulis, stored as two n-bit masks."""

    n: int
    x: int
    z: int

    def __post_init__(self):
        if not 1 <= self.n <= MAX_QUBITS:
            raise ConfigError(f"qubit count must be in [1, {MAX_QUBITS}], got {self.n}")
        full = (1 << self.n) - 1
        if not (0 <= self.x <= full and 0 <= self.z <= full):
            raise ConfigError(f"masks out of range for n={self.n}")

    @classmethod
    def from_label(cls, label: str) -> PauliString:
        label = label.strip().upper()
        x = z = 0
        for letter in label:
            if letter not in _LETTER_BITS:
                raise ConfigError(f"invalid Pauli letter {letter!r} in {label!r}")
            xb, zb = _LETTER_BITS[letter]
            x = (x << 1) | xb
            z = (z << 1) | zb
        return cls(len(label), x, z)

    @classmethod
    def identity(cls, n: int) -> PauliString:
        return cls(n, 0, 0)

    @property
    def label(self) -> str:
        out = []
        for q in range(self.n):
            bit = self.n - 1 - q
            out.append(_BITS_LETTER[((self.x >> bit) & 1, (self.z >> bit) & 1)])
        return "".join(out)

    @property
    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    def letter(self, qubit: int) -> str:
        bit = self.n - 1 - qubit
        return _BITS_LETTER[((self.x >> bit) & 1, (self.z >> bit) & 1)]

    def sort_key(self) -> tuple[int, int, int]:
        return (self.weight, self.x, self.z)

    def __str__(self) -> str:
        return self.label


def weight(pauli: PauliString) -> int:
    return pauli.weight


def check_enumeration(n: int, k: int) -> None:
    """Raise if the k-local enumeration on n qubits is outside the supported limits."""
    if not 1 <= n <= MAX_QUBITS:
        raise InfeasibleError(f"n={n} outside supported range [1, {MAX_QUBITS}]")
    if not 1 <= k <= n:
        raise ConfigError(f"locality k must satisfy 1 <= k <= n, got k={k}, n={n}")
    if n > MAX_FULL_SWEEP_QUBITS and k > MAX_LARGE_N_LOCALITY:
        raise InfeasibleError(
            f"k-local enumeration for n={n} > {MAX_FULL_SWEEP_QUBITS} is limited to "
            f"k <= {MAX_LARGE_N_LOCALITY}, got k={k}"
        )


@lru_cache(maxsize=64)
def enumerate_k_local(n: int, k: int) -> tuple[PauliString, ...]:
    """All Pauli strings with ``1 <= weight <= k``, ascending weight then (x, z) masks.

    The identity is never included: its overlap with a traceless signal is
    identically zero.
    """
    check_enumeration(n, k)
    out = []
    for w in range(1, k + 1):
        for support in itertools.combinations(range(n), w):
            for letters in itertools.product("XYZ", repeat=w):
                x = z = 0
                for q, letter in zip(support, letters):
                    xb, zb = _LETTER_BITS[letter]
                    bit = n - 1 - q
                    x |= xb << bit
                    z |= zb << bit
                out.append(PauliString(n, x, z))
    out.sort(key=PauliString.sort_key)
    return tuple(out)


@lru_cache(maxsize=16)
def enumerate_all(n: int) -> tuple[PauliString, ...]:
    """All 4**n strings including the identity, in canonical order."""
    if not 1 <= n <= MAX_FULL_SWEEP_QUBITS:
        raise InfeasibleError(
            f"full 4**n sweep limited to n <= {MAX_FULL_SWEEP_QUBITS}, got n={n}"
        )
    return (PauliString.identity(n),) + enumerate_k_local(n, n)


def realize_matrix(pauli: PauliString) -> np.ndarray:
    if pauli.n > MAX_DENSE_QUBITS:
        raise InfeasibleError(
            f"dense matrices limited to n <= {MAX_DENSE_QUBITS}, got n={pauli.n}"
        )
    mat = np.ones((1, 1), dtype=complex)
    for letter in pauli.label:
        mat = np.kron(mat, SINGLE_QUBIT[letter])
    return mat


def _num_qubits(dim: int) -> int:
    n = dim.bit_length() - 1
    if dim < 2 or (1 << n) != dim:
        raise ConfigError(f"dimension {dim} is not a power of two >= 2")
    return n


def _phases(pauli: PauliString) -> tuple[np.ndarray, np.ndarray]:
    """Column index c and phase such that P|c> = phase[c] |c ^ x>."""
    idx = np.arange(1 << pauli.n, dtype=np.int64)
    sign = 1 - 2 * (np.bitwise_count(idx & pauli.z) & 1).astype(np.int64)
    y_phase = 1j ** ((pauli.x & pauli.z).bit_count() % 4)
    return idx, y_phase * sign


def pauli_trace(pauli: PauliString, mat: np.ndarray) -> complex:
    """Tr(P @ mat) in O(2**n) without realizing P."""
    mat = np.asarray(mat)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or _num_qubits(mat.shape[0]) != pauli.n:
        raise ConfigError(f"matrix shape {mat.shape} does not match n={pauli.n}")
    idx, phase = _phases(pauli)
    return complex(np.sum(phase * mat[idx, idx ^ pauli.x]))


def expectation(pauli: PauliString, state: np.ndarray) -> float:
    """<P> for a statevector (1-d) or density matrix (2-d)."""
    state = np.asarray(state)
    if state.ndim == 1:
        if _num_qubits(state.shape[0]) != pauli.n:
            raise ConfigError(f"statevector length {state.shape[0]} does not match n={pauli.n}")
        idx, phase = _phases(pauli)
        val = np.vdot(state[idx ^ pauli.x], phase * state[idx])
    else:
        val = pauli_trace(pauli, state)
    if abs(val.imag) > IMAG_TOL * max(1.0, abs(val.real)):
        raise NumericalError(f"expectation of {pauli} has imaginary part {val.imag:.3e}")
    return float(val.real)


def check_hermitian(mat: np.ndarray, tol: float = HERMITIAN_TOL) -> None:
    dev = float(np.max(np.abs(mat - mat.conj().T))) if mat.size else 0.0
    if dev > tol:
        raise NumericalError(f"matrix is not Hermitian (max deviation {dev:.3e})")


def pauli_coefficient(pauli: PauliString, mat: np.ndarray) -> float:
    """Normalized coefficient ``2**-n Tr(P A)`` of a Hermitian operator."""
    mat = np.asarray(mat, dtype=complex)
    check_hermitian(mat)
    val = pauli_trace(pauli, mat) / (1 << pauli.n)
    if abs(val.imag) > IMAG_TOL:
        raise NumericalError(f"coefficient of {pauli} has imaginary part {val.imag:.3e}")
    return float(val.real)


def weight_spectrum(mat: np.ndarray) -> np.ndarray:
    """W_l = sum over weight-l strings of |2**-n Tr(P A)|, for l = 0..n."""
    mat = np.asarray(mat, dtype=complex)
    n = _num_qubits(mat.shape[0])
    check_hermitian(mat)
    spectrum = np.zeros(n + 1)
    for pauli in enumerate_all(n):
        spectrum[pauli.weight] += abs(pauli_coefficient(pauli, mat))
    return spectrum


@dataclass(frozen=True)
class SignalCoefficients:
    """Unnormalized overlaps Tr(P Delta rho) keyed by Pauli string.

    This is the convention used everywhere a bias is needed; the normalized
    ``2**-n`` form only appears inside :func:`weight_spectrum`.
    """

    n: int
    entries: dict

    def __post_init__(self):
        for pauli, value in self.entries.items():
            if pauli.n != self.n:
                raise ConfigError(f"{pauli} does not act on n={self.n} qubits")
            if pauli.weight == 0 and abs(value) > 1e-10:
                raise NumericalError("identity overlap of a traceless signal must vanish")
            if abs(value) > 2.0 + 1e-9:
                raise NumericalError(f"|Tr({pauli} Delta rho)| = {abs(value):.6g} exceeds 2")

    def __getitem__(self, pauli: PauliString) -> float:
        return self.entries[pauli]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def items(self):
        return self.entries.items()

    def ordered(self) -> list[tuple[PauliString, float]]:
        return sorted(self.entries.items(), key=lambda kv: kv[0].sort_key())
