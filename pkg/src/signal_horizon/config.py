"""JSON experiment configuration and built-in presets."""

from __future__ import annotations

import copy
import json
import math
from pathlib import Path

from .encodings import DEFAULT_THETA, EncodingSpec
from .errors import ConfigError
from .harness import ExperimentConfig
from .sampling import ShotBudget

_TOP_KEYS = {"encoding", "k_values", "p_grid", "shots", "seed", "compute_trace_norm"}

PRESETS = {
    "fig1": {
        "encoding": {"kind": "product", "n": 4, "theta": DEFAULT_THETA},
        "k_values": [1, 2, 3],
        "p_grid": {"start": 0.0, "stop": 0.75, "points": 16},
        "shots": {"search": 20000, "eval": 20000},
        "seed": 20240601,
        "compute_trace_norm": True,
    },
    "fig2": {
        "encoding": {"kind": "entangling", "n": 4, "theta": DEFAULT_THETA},
        "k_values": [1, 2, 3],
        "p_grid": {"start": 0.0, "stop": 0.75, "points": 16},
        "shots": {"search": 20000, "eval": 20000},
        "seed": 20240601,
        "compute_trace_norm": True,
    },
}


def preset(name: str) -> dict:
    try:
        return copy.deepcopy(PRESETS[name])
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


def _require(mapping, key, where):
    if not isinstance(mapping, dict):
        raise ConfigError(f"{where} must be an object")
    if key not in mapping:
        raise ConfigError(f"missing key {where}.{key}")
    return mapping[key]


def _int(value, where) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where} must be an integer, got {value!r}")
    return value


def _float(value, where) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"{where} must be a finite number, got {value!r}")
    return float(value)


def config_from_dict(doc: dict, allow_extended_p: bool = False) -> ExperimentConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    enc = _require(doc, "encoding", "config")
    kind = _require(enc, "kind", "encoding")
    n = _int(_require(enc, "n", "encoding"), "encoding.n")
    theta = _float(enc.get("theta", DEFAULT_THETA), "encoding.theta")
    spec = EncodingSpec(kind, n, theta)

    ks = _require(doc, "k_values", "config")
    if not isinstance(ks, list) or not ks:
        raise ConfigError("k_values must be a non-empty list")
    ks = tuple(_int(k, "k_values[]") for k in ks)

    grid = _require(doc, "p_grid", "config")
    start = _float(_require(grid, "start", "p_grid"), "p_grid.start")
    stop = _float(_require(grid, "stop", "p_grid"), "p_grid.stop")
    points = _int(_require(grid, "points", "p_grid"), "p_grid.points")

    shots = _require(doc, "shots", "config")
    budget = ShotBudget(
        _int(_require(shots, "search", "shots"), "shots.search"),
        _int(_require(shots, "eval", "shots"), "shots.eval"),
    )
    seed = _int(_require(doc, "seed", "config"), "seed")
    tn = doc.get("compute_trace_norm")
    if tn is not None and not isinstance(tn, bool):
        raise ConfigError("compute_trace_norm must be a boolean")

    return ExperimentConfig(
        encoding=spec,
        k_values=ks,
        p_start=start,
        p_stop=stop,
        p_points=points,
        budget=budget,
        master_seed=seed,
        compute_trace_norm=tn,
        allow_extended_p=allow_extended_p,
    )


def config_to_dict(config: ExperimentConfig) -> dict:
    spec = config.encoding
    return {
        "encoding": {"kind": spec.kind, "n": spec.n, "theta": spec.theta},
        "k_values": list(config.k_values),
        "p_grid": {"start": config.p_start, "stop": config.p_stop, "points": config.p_points},
        "shots": {"search": config.budget.n_search, "eval": config.budget.n_eval},
        "seed": config.master_seed,
        "compute_trace_norm": config.compute_trace_norm,
    }


def load_config(path, allow_extended_p: bool = False) -> ExperimentConfig:
    """Read a JSON config. I/O problems surface as OSError, content problems as ConfigError."""
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}") from None
    return config_from_dict(doc, allow_extended_p=allow_extended_p)
