"""Locally accessible class signal in noisy n-qubit encodings.

Compares the global trace-norm distinguishability of two class states with
the bias reachable by single Pauli measurements of weight at most k, under
independent depolarizing noise, both exactly and with finite shots.
"""

__version__ = "0.1.0"

from .encodings import EncodingSpec
from .harness import ExperimentConfig, ResultRecord, run_sweep, threshold_report
from .metrics import exact_Ak
from .pauli import PauliString, SignalCoefficients, enumerate_k_local
from .sampling import RngStream, ShotBudget

__all__ = [
    "EncodingSpec",
    "ExperimentConfig",
    "PauliString",
    "ResultRecord",
    "RngStream",
    "ShotBudget",
    "SignalCoefficients",
    "enumerate_k_local",
    "exact_Ak",
    "run_sweep",
    "threshold_report",
]
