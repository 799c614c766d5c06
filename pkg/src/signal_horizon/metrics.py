"""Exact (infinite-shot) discrimination quantities.

Biases use the unnormalized overlap Tr(P Delta rho) throughout, so an
amplitude A lives in [0, 2] and maps to accuracy 1/2 + A/4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DegenerateOutcomeError
from .linalg import trace_norm
from .noise import P_MAX_PHYSICAL, depolarizing_lambda
from .pauli import (
    PauliString,
    SignalCoefficients,
    check_enumeration,
    enumerate_k_local,
    expectation,
    pauli_trace,
)

# values closer than this count as tied; the earlier string in canonical order wins
TIE_TOL = 1e-12
THRESHOLD_TOL = 1e-9


@dataclass(frozen=True)
class AkResult:
    value: float
    argmax_string: PauliString
    argmax_weight: int


def signal_coefficients(delta: np.ndarray, k: int) -> SignalCoefficients:
    """Tr(P Delta rho) for every string of weight 1..k, from a dense signal operator."""
    dim = delta.shape[0]
    n = dim.bit_length() - 1
    check_enumeration(n, k)
    entries = {}
    for pauli in enumerate_k_local(n, k):
        entries[pauli] = pauli_trace(pauli, delta).real
    return SignalCoefficients(n, entries)


def signal_coefficients_from_states(
    plus: np.ndarray, minus: np.ndarray, k: int
) -> SignalCoefficients:
    """Same as :func:`signal_coefficients` but from statevectors or density matrices."""
    n = plus.shape[0].bit_length() - 1
    check_enumeration(n, k)
    entries = {p: expectation(p, plus) - expectation(p, minus) for p in enumerate_k_local(n, k)}
    return SignalCoefficients(n, entries)


def argmax_canonical(candidates, values) -> int:
    """Index of the largest value; near-ties resolved toward the earliest candidate."""
    best = 0
    for i in range(1, len(values)):
        if values[i] > values[best] + TIE_TOL:
            best = i
    return best


def exact_Ak(coeffs: SignalCoefficients, p: float, k: int) -> AkResult:
    """max over 1 <= w(P) <= k of |Tr(P Delta rho)| * lambda(p)**w(P)."""
    check_enumeration(coeffs.n, k)
    lam = depolarizing_lambda(p)
    candidates = enumerate_k_local(coeffs.n, k)
    missing = [c for c in candidates if c not in coeffs.entries]
    if missing:
        raise ConfigError(f"coefficient table lacks {len(missing)} strings of weight <= {k}")
    values = [abs(coeffs[c] * lam**c.weight) for c in candidates]
    i = argmax_canonical(candidates, values)
    return AkResult(values[i], candidates[i], candidates[i].weight)


def accuracy_from_bias(amplitude: float) -> float:
    if not 0.0 <= amplitude <= 2.0 + 1e-12:
        raise ConfigError(f"bias amplitude must lie in [0, 2], got {amplitude}")
    return 0.5 + 0.25 * amplitude


def helstrom_accuracy(delta_noisy: np.ndarray) -> float:
    return 0.5 + 0.25 * trace_norm(delta_noisy)


def accessible_fraction_and_gap(ak: AkResult | float, tn: float) -> tuple[float, float]:
    """(A_k / ||Delta||_1, ||Delta||_1 - A_k), with 0/0 read as fully accessible."""
    value = ak.value if isinstance(ak, AkResult) else float(ak)
    if tn < 0:
        raise ConfigError(f"trace norm must be non-negative, got {tn}")
    if tn < 1e-12:
        fraction = 1.0 if value < 1e-12 else math.inf
    else:
        fraction = value / tn
    return fraction, tn - value


def ak_upper_bound(spectrum, p: float, k: int, n: int) -> float:
    """2**n * max_{1<=l<=k} |lambda(p)|**l * W_l."""
    if not 1 <= k <= n or len(spectrum) != n + 1:
        raise ConfigError(f"need 1 <= k <= n and a spectrum of length n+1 (k={k}, n={n})")
    lam = abs(depolarizing_lambda(p))
    return (1 << n) * max(lam**ell * spectrum[ell] for ell in range(1, k + 1))


def breakdown_threshold(coeffs: SignalCoefficients, k: int, eps: float) -> float | None:
    """Smallest p in [0, 0.75] with A_k(p) = eps, by bisection.

    Returns ``None`` when A_k(0) < eps: the signal is never resolvable.
    """
    if not eps > 0:
        raise ConfigError(f"resolution scale must be positive, got {eps}")

    def amp(p):
        return exact_Ak(coeffs, p, k).value

    if amp(0.0) < eps:
        return None
    lo, hi = 0.0, P_MAX_PHYSICAL
    if amp(hi) >= eps:
        return hi
    # invariant: amp(lo) >= eps > amp(hi)
    while hi - lo > 1e-15:
        mid = 0.5 * (lo + hi)
        a = amp(mid)
        if abs(a - eps) <= THRESHOLD_TOL * 1e-3:
            return mid
        if a >= eps:
            lo = mid
        else:
            hi = mid
    return lo if abs(amp(lo) - eps) <= abs(amp(hi) - eps) else hi


def product_threshold_closed_form(eps: float) -> float:
    """Inversion of 2 lambda(p) = eps for the product encoding."""
    return 0.75 * (1.0 - eps / 2.0)


def fisher_information(mu: float, mean_bias: float) -> float:
    """Two-outcome Fisher information at theta=0 of rho_theta = mean + theta/2 Delta.

    p_plus = (1 + mean_bias)/2 and dp_plus/dtheta = mu/4.
    """
    p_plus = 0.5 * (1.0 + mean_bias)
    if not 0.0 < p_plus < 1.0:
        raise DegenerateOutcomeError(f"outcome probability {p_plus} is degenerate")
    return (mu / 4.0) ** 2 / (p_plus * (1.0 - p_plus))

