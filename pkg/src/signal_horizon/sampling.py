"""Finite-shot estimation of Pauli expectations and class biases.

A +-1 Pauli measurement is fully described by its +1 probability, so shots
are drawn as a single binomial count instead of simulating basis rotations.
Randomness comes from Philox, a counter-based generator: the 128-bit key is
(stream_id, master_seed), so a stream depends only on the coordinates of the
task that owns it and never on execution order.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, HorizonError
from .pauli import PauliString, expectation

_MASK64 = (1 << 64) - 1


def stream_id_for(*coords) -> int:
    """Stable 64-bit id from task coordinates (not Python's salted hash)."""
    text = "/".join(str(c) for c in coords).encode()
    return int.from_bytes(hashlib.blake2b(text, digest_size=8).digest(), "little")


@dataclass
class RngStream:
    master_seed: int
    stream_id: int
    _gen: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self.master_seed = int(self.master_seed) & _MASK64
        self.stream_id = int(self.stream_id) & _MASK64
        key = (self.stream_id << 64) | self.master_seed
        self._gen = np.random.Generator(np.random.Philox(key=key))

    @classmethod
    def for_task(cls, master_seed: int, *coords) -> RngStream:
        return cls(master_seed, stream_id_for(*coords))

    def binomial(self, trials: int, prob: float) -> int:
        return int(self._gen.binomial(trials, prob))


@dataclass(frozen=True)
class ShotBudget:
    """Shots per Pauli string *per state* in each phase of the split protocol."""

    n_search: int = 20_000
    n_eval: int = 20_000

    def __post_init__(self):
        for name in ("n_search", "n_eval"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise ConfigError(f"{name} must be a positive integer, got {value!r}")


def probability_from_expectation(expval: float) -> float:
    """P(+1) = (1 + <P>)/2, clamped against round-off just outside [0, 1]."""
    return min(1.0, max(0.0, 0.5 * (1.0 + expval)))


def outcome_probability(pauli: PauliString, rho: np.ndarray) -> float:
    return probability_from_expectation(expectation(pauli, rho))


def _check_shots(shots: int) -> None:
    if not isinstance(shots, (int, np.integer)) or shots < 1:
        raise ConfigError(f"shot count must be a positive integer, got {shots!r}")


def sample_plus_count(expval: float, shots: int, rng: RngStream) -> int:
    """Number of +1 outcomes in ``shots`` measurements of an observable with mean ``expval``."""
    _check_shots(shots)
    return rng.binomial(shots, probability_from_expectation(expval))


def mean_from_count(plus_count: int, shots: int) -> float:
    return (2 * plus_count - shots) / shots


def sample_expectation(pauli: PauliString, rho: np.ndarray, shots: int, rng: RngStream) -> float:
    """Sample mean of ``shots`` +-1 outcomes of P on rho."""
    return mean_from_count(sample_plus_count(expectation(pauli, rho), shots, rng), shots)


def estimate_mu(
    pauli: PauliString,
    rho_plus: np.ndarray,
    rho_minus: np.ndarray,
    shots: int,
    rng: RngStream,
) -> float:
    """<P>_+ - <P>_- with ``shots`` measurements on each state."""
    return sample_expectation(pauli, rho_plus, shots, rng) - sample_expectation(
        pauli, rho_minus, shots, rng
    )


def _check_delta(delta: float) -> None:
    if not 0.0 < delta < 1.0:
        raise ConfigError(f"confidence parameter delta must lie in (0, 1), got {delta}")


def hoeffding_epsilon(shots: int, delta: float) -> float:
    """sqrt(log(2/delta) / (2N))."""
    _check_shots(shots)
    _check_delta(delta)
    return math.sqrt(math.log(2.0 / delta) / (2.0 * shots))


def required_shots(amplitude: float, delta: float) -> int:
    """ceil(log(2/delta) / (2 A**2)); raises HorizonError once the amplitude has vanished."""
    _check_delta(delta)
    if not amplitude > 0.0:
        raise HorizonError(f"amplitude {amplitude} is not positive: no finite budget resolves it")
    return math.ceil(math.log(2.0 / delta) / (2.0 * amplitude * amplitude))


def operational_epsilon(n_eval: int) -> float:
    """Resolution scale 1/sqrt(N_eval) used for thresholds."""
    _check_shots(n_eval)
    return 1.0 / math.sqrt(n_eval)
