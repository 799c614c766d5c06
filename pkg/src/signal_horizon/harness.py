"""Split-sample protocol and the (p, k) sweep.

Each grid point is an independent task keyed by its p index; every random
draw inside it comes from a stream derived from (encoding, p index, k,
string index, phase), so the output does not depend on how tasks are
scheduled across workers.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from functools import partial

import numpy as np

from . import encodings
from .encodings import EncodingSpec
from .errors import ConfigError, DegenerateOutcomeError, SignalHorizonError
from .linalg import trace_norm
from .metrics import (
    AkResult,
    accessible_fraction_and_gap,
    accuracy_from_bias,
    ak_upper_bound,
    argmax_canonical,
    breakdown_threshold,
    exact_Ak,
    fisher_information,
    product_threshold_closed_form,
    signal_coefficients,
    signal_coefficients_from_states,
)
from .noise import P_MAX_PHYSICAL, depolarize_density, depolarizing_lambda
from .pauli import (
    MAX_FULL_SWEEP_QUBITS,
    PauliString,
    check_enumeration,
    enumerate_k_local,
    expectation,
    weight_spectrum,
)
from .sampling import (
    RngStream,
    ShotBudget,
    mean_from_count,
    operational_epsilon,
    sample_plus_count,
)

log = logging.getLogger(__name__)

# density-matrix (Kraus) path and trace norm up to 2**8 = 256 dimensions
DENSE_SWEEP_QUBITS = 8
SHOT_ACCOUNTING = "per_state"


@dataclass(frozen=True)
class ExperimentConfig:
    encoding: EncodingSpec
    k_values: tuple[int, ...] = (1, 2, 3)
    p_start: float = 0.0
    p_stop: float = P_MAX_PHYSICAL
    p_points: int = 16
    budget: ShotBudget = field(default_factory=ShotBudget)
    master_seed: int = 0
    compute_trace_norm: bool | None = None
    allow_extended_p: bool = False

    def __post_init__(self):
        n = self.encoding.n
        ks = tuple(sorted(set(int(k) for k in self.k_values)))
        if not ks:
            raise ConfigError("k_values must be non-empty")
        object.__setattr__(self, "k_values", ks)
        for k in ks:
            check_enumeration(n, k)
        if not isinstance(self.p_points, int) or self.p_points < 1:
            raise ConfigError(f"p grid needs at least one point, got {self.p_points!r}")
        if self.p_points > 1 and not self.p_stop > self.p_start:
            raise ConfigError("p grid must be strictly ascending (stop > start)")
        upper = 1.0 if self.allow_extended_p else P_MAX_PHYSICAL
        if not (0.0 <= self.p_start and self.p_stop <= upper and self.p_start <= self.p_stop):
            raise ConfigError(
                f"p grid [{self.p_start}, {self.p_stop}] outside [0, {upper}]"
                + ("" if self.allow_extended_p else " (use --allow-extended-p to go beyond 0.75)")
            )
        if not isinstance(self.master_seed, int) or not 0 <= self.master_seed < 1 << 64:
            raise ConfigError("master seed must be an unsigned 64-bit integer")
        if self.compute_trace_norm is None:
            object.__setattr__(self, "compute_trace_norm", n <= DENSE_SWEEP_QUBITS)
        elif self.compute_trace_norm and n > DENSE_SWEEP_QUBITS:
            raise ConfigError(
                f"trace norm needs the dense path, limited to n <= {DENSE_SWEEP_QUBITS}"
            )

    @property
    def p_grid(self) -> tuple[float, ...]:
        if self.p_points == 1:
            return (float(self.p_start),)
        return tuple(float(p) for p in np.linspace(self.p_start, self.p_stop, self.p_points))

    @property
    def epsilon(self) -> float:
        return operational_epsilon(self.budget.n_eval)


@dataclass
class ResultRecord:
    encoding: str
    n: int
    theta: float
    p_index: int
    p: float
    k: int
    trace_norm: float | None
    helstrom_accuracy: float | None
    A_k_exact: float
    A_k_upper: float | None
    A_k_hat: float
    mu_search: float
    P_star: str
    w_star: int
    P_star_exact: str
    w_star_exact: int
    acc_empirical: float
    acc_predicted_exact: float
    acc_predicted_hat: float
    accessible_fraction: float | None
    gap: float | None
    fisher_exact: float | None
    epsilon: float
    n_search: int
    n_eval: int
    shot_accounting: str
    master_seed: int
    status: str = "ok"


RECORD_FIELDS = tuple(f.name for f in fields(ResultRecord))


@dataclass(frozen=True)
class ThresholdReport:
    encoding: str
    n: int
    theta: float
    k: int
    epsilon: float
    A_k_zero: float
    p_star: float | None
    p_star_closed_form: float | None
    sampled_crossing_p: float | None


# -- split-sample protocol on precomputed expectations ----------------------


def _select(candidates, ev_plus, ev_minus, n_search, master_seed, coords):
    mus = []
    for i, (a, b) in enumerate(zip(ev_plus, ev_minus)):
        rng = RngStream.for_task(master_seed, *coords, i, "search")
        c_plus = sample_plus_count(a, n_search, rng)
        c_minus = sample_plus_count(b, n_search, rng)
        mus.append(mean_from_count(c_plus, n_search) - mean_from_count(c_minus, n_search))
    if not mus:
        raise ConfigError("empty candidate set")
    best = argmax_canonical(candidates, [abs(m) for m in mus])
    return best, mus[best]


def _evaluate(ev_plus, ev_minus, n_eval, rng, mu_search):
    c_plus = sample_plus_count(ev_plus, n_eval, rng)
    c_minus = sample_plus_count(ev_minus, n_eval, rng)
    mu_eval = mean_from_count(c_plus, n_eval) - mean_from_count(c_minus, n_eval)
    # orientation comes from the search phase only
    if mu_search >= 0:
        acc = 0.5 * (c_plus / n_eval + (n_eval - c_minus) / n_eval)
    else:
        acc = 0.5 * ((n_eval - c_plus) / n_eval + c_minus / n_eval)
    return abs(mu_eval), acc


def split_sample_select(
    rho_plus: np.ndarray,
    rho_minus: np.ndarray,
    k: int,
    budget: ShotBudget,
    master_seed: int,
    coords: tuple = (),
) -> tuple[PauliString, float]:
    """Pick argmax |mu_search| over weight <= k strings, n_search shots per state each.

    Every candidate owns the stream ``(*coords, index, "search")``.
    """
    n = encodings.num_qubits(rho_plus)
    candidates = enumerate_k_local(n, k)
    ev_plus = [expectation(c, rho_plus) for c in candidates]
    ev_minus = [expectation(c, rho_minus) for c in candidates]
    best, mu = _select(candidates, ev_plus, ev_minus, budget.n_search, master_seed, coords)
    return candidates[best], mu


def split_sample_evaluate(
    p_star: PauliString,
    rho_plus: np.ndarray,
    rho_minus: np.ndarray,
    budget: ShotBudget,
    rng: RngStream,
    mu_search: float = 1.0,
) -> tuple[float, float]:
    """(|mu_eval|, empirical accuracy) from n_eval fresh shots per state.

    ``rng`` must be a different stream from any used during selection. The
    decision rule maps +1 to class + when ``mu_search >= 0`` and flips otherwise.
    """
    return _evaluate(
        expectation(p_star, rho_plus),
        expectation(p_star, rho_minus),
        budget.n_eval,
        rng,
        mu_search,
    )


# -- sweep -------------------------------------------------------------------


@dataclass
class _SweepContext:
    config: ExperimentConfig
    dense: bool
    plus0: np.ndarray
    minus0: np.ndarray
    coeffs: object
    spectrum: np.ndarray | None
    candidates: tuple


def _prepare(config: ExperimentConfig) -> _SweepContext:
    spec = config.encoding
    kmax = max(config.k_values)
    dense = spec.n <= DENSE_SWEEP_QUBITS
    if dense:
        plus0, minus0 = encodings.prepare_pair(spec)
        delta = encodings.signal_operator(plus0, minus0)
        coeffs = signal_coefficients(delta, kmax)
        spectrum = weight_spectrum(delta) if spec.n <= MAX_FULL_SWEEP_QUBITS else None
    else:
        plus0, minus0 = encodings.statevectors(spec)
        coeffs = signal_coefficients_from_states(plus0, minus0, kmax)
        spectrum = None
    return _SweepContext(
        config, dense, plus0, minus0, coeffs, spectrum, enumerate_k_local(spec.n, kmax)
    )


def _failed_record(config: ExperimentConfig, p_index: int, p: float, k: int, msg: str):
    nan = math.nan
    spec = config.encoding
    return ResultRecord(
        spec.kind, spec.n, spec.theta, p_index, p, k, None, None, nan, None, nan, nan,
        "", -1, "", -1, nan, nan, nan, None, None, None, config.epsilon,
        config.budget.n_search, config.budget.n_eval, SHOT_ACCOUNTING, config.master_seed,
        f"failed: {msg}",
    )  # fmt: skip


def _evaluate_point(ctx: _SweepContext, p_index: int) -> list[ResultRecord]:
    config = ctx.config
    spec = config.encoding
    p = config.p_grid[p_index]
    try:
        return _evaluate_point_unchecked(ctx, p_index, p)
    except (SignalHorizonError, ArithmeticError, np.linalg.LinAlgError) as exc:
        log.warning("sweep point p=%g failed: %s", p, exc)
        return [_failed_record(config, p_index, p, k, str(exc)) for k in config.k_values]


def _evaluate_point_unchecked(ctx: _SweepContext, p_index: int, p: float) -> list[ResultRecord]:
    config = ctx.config
    spec = config.encoding
    budget = config.budget
    candidates = ctx.candidates

    tn = None
    if ctx.dense:
        rho_plus = depolarize_density(ctx.plus0, p)
        rho_minus = depolarize_density(ctx.minus0, p)
        ev_plus = np.array([expectation(c, rho_plus) for c in candidates])
        ev_minus = np.array([expectation(c, rho_minus) for c in candidates])
        if config.compute_trace_norm:
            tn = trace_norm(encodings.signal_operator(rho_plus, rho_minus))
    else:
        # weight contraction applied to noiseless expectations, equivalent to Kraus
        lam = depolarizing_lambda(p)
        scale = np.array([lam**c.weight for c in candidates])
        ev_plus = scale * np.array([expectation(c, ctx.plus0) for c in candidates])
        ev_minus = scale * np.array([expectation(c, ctx.minus0) for c in candidates])

    records = []
    for k in config.k_values:
        ak: AkResult = exact_Ak(ctx.coeffs, p, k)
        size = len(enumerate_k_local(spec.n, k))
        coords = (spec.kind, p_index, k)
        best, mu_search = _select(
            candidates[:size], ev_plus[:size], ev_minus[:size], budget.n_search,
            config.master_seed, coords,
        )  # fmt: skip
        eval_rng = RngStream.for_task(config.master_seed, *coords, "eval")
        a_hat, acc_emp = _evaluate(
            ev_plus[best], ev_minus[best], budget.n_eval, eval_rng, mu_search
        )

        star = candidates.index(ak.argmax_string)
        mu_exact = ev_plus[star] - ev_minus[star]
        try:
            fisher = fisher_information(mu_exact, 0.5 * (ev_plus[star] + ev_minus[star]))
        except DegenerateOutcomeError:
            fisher = None

        upper = ak_upper_bound(ctx.spectrum, p, k, spec.n) if ctx.spectrum is not None else None
        fraction = gap = helstrom = None
        if tn is not None:
            fraction, gap = accessible_fraction_and_gap(ak, tn)
            helstrom = 0.5 + 0.25 * tn

        records.append(
            ResultRecord(
                encoding=spec.kind,
                n=spec.n,
                theta=spec.theta,
                p_index=p_index,
                p=p,
                k=k,
                trace_norm=tn,
                helstrom_accuracy=helstrom,
                A_k_exact=ak.value,
                A_k_upper=upper,
                A_k_hat=a_hat,
                mu_search=mu_search,
                P_star=candidates[best].label,
                w_star=candidates[best].weight,
                P_star_exact=ak.argmax_string.label,
                w_star_exact=ak.argmax_weight,
                acc_empirical=acc_emp,
                acc_predicted_exact=accuracy_from_bias(ak.value),
                acc_predicted_hat=accuracy_from_bias(a_hat),
                accessible_fraction=fraction,
                gap=gap,
                fisher_exact=fisher,
                epsilon=config.epsilon,
                n_search=budget.n_search,
                n_eval=budget.n_eval,
                shot_accounting=SHOT_ACCOUNTING,
                master_seed=config.master_seed,
            )
        )
    return records


def run_sweep(config: ExperimentConfig, workers: int = 1) -> list[ResultRecord]:
    """All (k, p) records, ordered k-major then p-minor."""
    if workers < 1:
        raise ConfigError(f"workers must be >= 1, got {workers}")
    ctx = _prepare(config)
    indices = range(len(config.p_grid))
    task = partial(_evaluate_point, ctx)
    if workers == 1:
        per_point = [task(i) for i in indices]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_point = list(pool.map(task, indices))
    records = [r for batch in per_point for r in batch]
    records.sort(key=lambda r: (r.k, r.p_index))
    failed = sum(r.status != "ok" for r in records)
    if failed:
        log.warning("%d of %d sweep points failed", failed, len(records))
    return records


def exact_coefficients(spec: EncodingSpec, k: int):
    if spec.n <= DENSE_SWEEP_QUBITS:
        plus0, minus0 = encodings.prepare_pair(spec)
        return signal_coefficients(encodings.signal_operator(plus0, minus0), k)
    plus0, minus0 = encodings.statevectors(spec)
    return signal_coefficients_from_states(plus0, minus0, k)


def threshold_report(
    config: ExperimentConfig,
    k: int,
    eps: float | None = None,
    records: list[ResultRecord] | None = None,
) -> ThresholdReport:
    """Exact breakdown threshold at eps (default 1/sqrt(n_eval)) plus the sampled crossing.

    The sampled crossing is the first grid p whose empirical accuracy sits
    less than eps/4 above 1/2; it needs sweep ``records`` and is ``None``
    without them.
    """
    spec = config.encoding
    eps = config.epsilon if eps is None else eps
    coeffs = exact_coefficients(spec, k)
    p_star = breakdown_threshold(coeffs, k, eps)
    closed = product_threshold_closed_form(eps) if spec.kind == "product" and eps <= 2 else None
    crossing = None
    if records is not None:
        for r in sorted((r for r in records if r.k == k and r.status == "ok"), key=lambda r: r.p):
            if r.acc_empirical - 0.5 < eps / 4:
                crossing = r.p
                break
    return ThresholdReport(
        spec.kind, spec.n, spec.theta, k, eps, exact_Ak(coeffs, 0.0, k).value,
        p_star, closed, crossing,
    )  # fmt: skip


def record_dict(record: ResultRecord) -> dict:
    return asdict(record)
