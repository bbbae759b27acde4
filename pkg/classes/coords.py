"""Coordinates on spectral data: τₙ, modified norming constants rₙ, trace identities, b-recovery."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Sequence

import numpy as np

from .boundary import BoundaryCondition, DirichletBoundary, RobinBoundary
from .config import SolverConfig
from .errors import InputValidationError, NumericalError
from .hardy import hat_sequences
from .potential import Potential, integral
from .specfun import Parity, SQRT_PI, central_binomial_ratio, unperturbed_constants
from .spectrum import SpectralData, solve
from .utils import strictly_increasing

logger = logging.getLogger(__name__)

MIN_RECOVERY_MODES = 8


@dataclass(frozen=True)
class TailModel:
    """Leading-order model μₘ ≈ c/√λ⁰ₘ for modes beyond the computed ones."""

    coefficient: float
    parity: Parity
    factor: int = 64

    @classmethod
    def none(cls, parity: Parity, factor: int = 64) -> "TailModel":
        return cls(0.0, parity, factor)

    @classmethod
    def from_potential(cls, q: Potential, boundary: BoundaryCondition, factor: int = 64) -> "TailModel":
        """c = 2∫₊q/π for Dirichlet data, (2∫₊q + 2b)/π for Robin data."""
        mass = 0.0 if q.is_zero else integral(q)
        coefficient = 2.0 * mass / math.pi
        if boundary.parity == "even":
            coefficient += 2.0 * boundary.b / math.pi
        return cls(coefficient, boundary.parity, factor)

    @classmethod
    def fit(cls, mu: Sequence[float], parity: Parity, factor: int = 64) -> "TailModel":
        """Least-squares fit of μₙ√λ⁰ₙ over the last quarter of the computed modes."""
        values = np.asarray(mu, dtype=float)
        count = values.size
        if count < 4:
            raise InputValidationError(f"Tail fit needs at least 4 modes, got {count}.")
        start = count - max(count // 4, 2)
        basis = 1.0 / np.sqrt(_lambda0(np.arange(start, count), parity))
        coefficient = float(np.dot(basis, values[start:]) / np.dot(basis, basis))
        return cls(coefficient, parity, factor)

    def values(self, start: int, stop: int) -> np.ndarray:
        """Modelled μₘ for start ≤ m < stop."""
        if stop <= start or self.coefficient == 0.0:
            return np.zeros(max(stop - start, 0))
        return self.coefficient / np.sqrt(_lambda0(np.arange(start, stop), self.parity))

    def extent(self, count: int) -> int:
        return self.factor * count

    def to_dict(self) -> dict:
        return {"tail_coefficient": self.coefficient, "tail_factor": self.factor}


@dataclass(frozen=True)
class CoordinateSet:
    mu: np.ndarray
    tau: np.ndarray
    r: np.ndarray
    v: float
    q0: float


@dataclass(frozen=True)
class BRecovery:
    b: float
    terms: np.ndarray
    tail: float
    decay_power: float


@dataclass(frozen=True)
class TraceDefects:
    dirichlet_defect: float
    neumann_defect: float
    robin_defect: float

    def as_dict(self) -> Dict[str, float]:
        return {
            "dirichlet_defect": self.dirichlet_defect,
            "neumann_defect": self.neumann_defect,
            "robin_defect": self.robin_defect,
        }


@dataclass(frozen=True)
class DefectTable:
    """Partial-sum trace defects for a sequence of truncations."""

    sizes: np.ndarray
    dirichlet: np.ndarray
    neumann: np.ndarray
    robin: np.ndarray

    def rows(self) -> List[tuple]:
        return list(zip(self.sizes.tolist(), self.dirichlet.tolist(), self.neumann.tolist(), self.robin.tolist()))


@dataclass(frozen=True)
class WeightedProfile:
    partial_sums: np.ndarray
    last_quartile_fraction: float


def _lambda0(indices: np.ndarray, parity: Parity) -> np.ndarray:
    offset = 3.0 if parity == "odd" else 1.0
    return 4.0 * np.asarray(indices, dtype=float) + offset


def _hilbert_sum(mu: np.ndarray, tail: TailModel, shift: int) -> np.ndarray:
    """Σ_{m≥0} μₘ/(2(n−m)+shift) for n < N, with modelled μₘ for N ≤ m < factor·N."""
    count = mu.size
    full = np.concatenate([mu, tail.values(count, tail.extent(count))])
    n = np.arange(count)[:, None]
    m = np.arange(full.size)[None, :]
    # denominators are odd, never zero
    return (1.0 / (2.0 * (n - m) + shift)) @ full


def _constants(count: int, parity: Parity) -> tuple[np.ndarray, np.ndarray]:
    table = [unperturbed_constants(n, parity) for n in range(count)]
    return np.array([c.s0 for c in table]), np.array([c.alpha for c in table])


def _check_lengths(mu: np.ndarray, s: np.ndarray) -> None:
    if mu.size != s.size:
        raise InputValidationError(f"μ and s must have the same length, got {mu.size} and {s.size}.")
    if mu.size == 0:
        raise InputValidationError("At least one mode is required.")


def r_dirichlet(mu: Sequence[float], q0: float, s: Sequence[float], tail: TailModel) -> np.ndarray:
    """r₂ₙ₊₁ = s − s⁰ − αμ − q(0)/(4(2n+1)) − ½Σₘ μ₂ₘ₊₁/(2(n−m)+1)."""
    mu_arr = np.asarray(mu, dtype=float)
    s_arr = np.asarray(s, dtype=float)
    _check_lengths(mu_arr, s_arr)
    s0, alpha = _constants(mu_arr.size, "odd")
    n = np.arange(mu_arr.size)
    return s_arr - s0 - alpha * mu_arr - q0 / (4.0 * (2 * n + 1)) - 0.5 * _hilbert_sum(mu_arr, tail, 1)


def r_robin(mu: Sequence[float], q0_minus_2b2: float, s: Sequence[float], tail: TailModel) -> np.ndarray:
    """r₂ₙ = s − s⁰ − αμ + (q(0) − 2b²)/(4(2n−1)) − ½Σₘ μ₂ₘ/(2(n−m)−1)."""
    mu_arr = np.asarray(mu, dtype=float)
    s_arr = np.asarray(s, dtype=float)
    _check_lengths(mu_arr, s_arr)
    s0, alpha = _constants(mu_arr.size, "even")
    n = np.arange(mu_arr.size)
    return s_arr - s0 - alpha * mu_arr + q0_minus_2b2 / (4.0 * (2 * n - 1)) - 0.5 * _hilbert_sum(mu_arr, tail, -1)


def s_from_r(mu: Sequence[float], q0: float, r: Sequence[float], tail: TailModel, parity: Parity) -> np.ndarray:
    """Norming constants from (μ, q0 datum, r); inverse of r_dirichlet / r_robin."""
    mu_arr = np.asarray(mu, dtype=float)
    r_arr = np.asarray(r, dtype=float)
    _check_lengths(mu_arr, r_arr)
    s0, alpha = _constants(mu_arr.size, parity)
    n = np.arange(mu_arr.size)
    if parity == "odd":
        datum = q0 / (4.0 * (2 * n + 1))
        kernel = _hilbert_sum(mu_arr, tail, 1)
    else:
        datum = -q0 / (4.0 * (2 * n - 1))
        kernel = _hilbert_sum(mu_arr, tail, -1)
    return s0 + alpha * mu_arr + datum + 0.5 * kernel + r_arr


def fill_r(data: SpectralData, tail: TailModel) -> SpectralData:
    """SpectralData with the r column computed from its μ, s and q0 datum."""
    if data.boundary.parity == "odd":
        r = r_dirichlet(data.mus, data.q0_datum, data.s_values, tail)
    else:
        r = r_robin(data.mus, data.q0_datum, data.s_values, tail)
    return data.with_r(r, **tail.to_dict())


def tau(neumann_mu: Sequence[float], dirichlet_mu: Sequence[float]) -> np.ndarray:
    """τₙ = μ₂ₙ − μ₂ₙ₊₁ for matched Neumann and Dirichlet spectra."""
    even = np.asarray(neumann_mu, dtype=float)
    odd = np.asarray(dirichlet_mu, dtype=float)
    count = min(even.size, odd.size)
    return even[:count] - odd[:count]


def q0_from_tau(tau_values: Sequence[float], neumann_tail: TailModel, dirichlet_tail: TailModel | None = None) -> float:
    """q(0) ≈ 2(Σ_{n<N} τₙ + Σ_{n≥N} (modelled μ₂ₙ − modelled μ₂ₙ₊₁))."""
    values = np.asarray(tau_values, dtype=float)
    count = values.size
    dirichlet_tail = dirichlet_tail or TailModel(neumann_tail.coefficient, "odd", neumann_tail.factor)
    stop = neumann_tail.extent(count)
    tail_sum = float(np.sum(neumann_tail.values(count, stop) - dirichlet_tail.values(count, stop)))
    return 2.0 * (float(np.sum(values)) + tail_sum)


def coordinate_set(dirichlet: SpectralData, neumann: SpectralData | None, tail: TailModel) -> CoordinateSet:
    """μ, τ, r of a Dirichlet dataset with its Neumann partner when available."""
    if np.all(np.isnan(dirichlet.r_values)):
        dirichlet = fill_r(dirichlet, tail)
    tau_values = tau(neumann.mus, dirichlet.mus) if neumann is not None else np.zeros(0)
    return CoordinateSet(
        mu=dirichlet.mus,
        tau=tau_values,
        r=dirichlet.r_values,
        v=tail.coefficient / 2.0,
        q0=dirichlet.q0_datum,
    )


def _power_law_tail(terms: np.ndarray, stop: int) -> tuple[float, float]:
    """Fit c·n^{−p} to the last quarter of the terms and sum it from N to stop."""
    count = terms.size
    start = count - max(count // 4, 2)
    window = terms[start:]
    if np.all(window == 0.0) or not (np.all(window > 0) or np.all(window < 0)):
        return 0.0, math.nan
    n = np.arange(start, count, dtype=float) + 1.0
    slope, intercept = np.polyfit(np.log(n), np.log(np.abs(window)), 1)
    power = -float(slope)
    if power <= 1.0:
        logger.warning("b-recovery terms decay like n^-%.3f; the tail estimate is unreliable", power)
    remaining = np.arange(count, stop, dtype=float) + 1.0
    tail = math.copysign(float(np.sum(np.exp(intercept) * remaining ** (-power))), window[-1])
    return tail, power


def recovery_terms(spectral: SpectralData) -> np.ndarray:
    """(−1)ⁿe^{−s₂ₙ}/ẇ_N(λ₂ₙ) − 2π^{−1/2}Eₙ for each computed mode."""
    n = np.arange(spectral.size)
    signs = np.where(n % 2 == 0, 1.0, -1.0)
    return signs * np.exp(-spectral.s_values) / spectral.ws_dots - 2.0 * central_binomial_ratio(n) / SQRT_PI


def recover_b(spectral: SpectralData, tail_factor: int = 64) -> BRecovery:
    """The Robin constant from eigenvalues, norming constants and ẇ_N."""
    if spectral.boundary.parity != "even":
        raise InputValidationError("b-recovery needs a Robin dataset.")
    if spectral.size < MIN_RECOVERY_MODES:
        raise InputValidationError(
            f"b-recovery needs at least {MIN_RECOVERY_MODES} modes, got {spectral.size}."
        )
    terms = recovery_terms(spectral)
    if not np.all(np.isfinite(terms)):
        raise NumericalError("Non-finite b-recovery terms; ẇ_N is missing or zero.")
    tail, power = _power_law_tail(terms, tail_factor * spectral.size)
    b = -(float(np.sum(terms)) + tail)
    logger.info("Recovered b=%.8f (tail %.3e, decay power %.3f)", b, tail, power)
    return BRecovery(b=b, terms=terms, tail=tail, decay_power=power)


def trace_partial_sums(
    dirichlet: SpectralData,
    neumann: SpectralData,
    robin: SpectralData,
    q_hat: Sequence[float],
) -> DefectTable:
    """Cumulative trace defects at every truncation 1..N; q_hat is the full-index sequence."""
    q_hat_arr = np.asarray(q_hat, dtype=float)
    count = min(dirichlet.size, neumann.size, robin.size)
    if q_hat_arr.size < 2 * count:
        raise InputValidationError(f"q̂ must have at least {2 * count} entries, got {q_hat_arr.size}.")
    b = robin.boundary.b
    n = np.arange(count)
    d_terms = dirichlet.mus[:count] - 2.0 * q_hat_arr[1 : 2 * count : 2]
    n_terms = neumann.mus[:count] - 2.0 * q_hat_arr[0 : 2 * count : 2]
    r_terms = robin.mus[:count] - 2.0 * q_hat_arr[0 : 2 * count : 2] - 2.0 * central_binomial_ratio(n) * b / SQRT_PI
    return DefectTable(
        sizes=n + 1,
        dirichlet=np.cumsum(d_terms),
        neumann=np.cumsum(n_terms),
        robin=np.cumsum(r_terms) + 0.5 * b * b,
    )


def trace_defect_sweep(
    q: Potential,
    b: float,
    N: int,
    config: SolverConfig | None = None,
) -> DefectTable:
    """Solve the three problems once at N modes and tabulate the partial-sum defects."""
    config = config or SolverConfig()
    dirichlet = solve(q, DirichletBoundary(), N, config)
    neumann = solve(q, RobinBoundary(0.0), N, config)
    robin = neumann if b == 0.0 else solve(q, RobinBoundary(b), N, config)
    hats = hat_sequences(q, 2 * N, config)
    return trace_partial_sums(dirichlet, neumann, robin, hats.q_hat)


def trace_defects(q: Potential, b: float, N: int, config: SolverConfig | None = None) -> TraceDefects:
    table = trace_defect_sweep(q, b, N, config)
    return TraceDefects(
        dirichlet_defect=float(table.dirichlet[-1]),
        neumann_defect=float(table.neumann[-1]),
        robin_defect=float(table.robin[-1]),
    )


def check_monotone(mu: Sequence[float], parity: Parity) -> bool:
    """λ⁰ₙ + μₙ strictly increasing (membership test for 𝒮_D / 𝒮_N)."""
    values = np.asarray(mu, dtype=float)
    return strictly_increasing(_lambda0(np.arange(values.size), parity) + values)


def weighted_l2_profile(r: Sequence[float]) -> WeightedProfile:
    """Partial sums of (1+n)^{3/2}rₙ² and the share contributed by the last quarter."""
    values = np.asarray(r, dtype=float)
    weights = (1.0 + np.arange(values.size)) ** 1.5
    partial = np.cumsum(weights * values * values)
    total = float(partial[-1]) if partial.size else 0.0
    if total == 0.0:
        return WeightedProfile(partial, 0.0)
    start = values.size - max(values.size // 4, 1)
    before = float(partial[start - 1]) if start > 0 else 0.0
    return WeightedProfile(partial, (total - before) / total)


@dataclass(frozen=True)
class FirstOrderResiduals:
    mu: np.ndarray
    s: np.ndarray


def first_order_residuals(data: SpectralData, q_hat: Sequence[float], q_check: Sequence[float]) -> FirstOrderResiduals:
    """μₙ − 2q̂ₙ⁺ and (s − s⁰) − q̌ₙ⁺, with the Robin b-terms removed; full-index q̂, q̌."""
    count = data.size
    n = np.arange(count)
    index = 2 * n + 1 if data.boundary.parity == "odd" else 2 * n
    q_hat_arr = np.asarray(q_hat, dtype=float)[index]
    q_check_arr = np.asarray(q_check, dtype=float)[index]
    s0 = np.array([unperturbed_constants(k, data.boundary.parity).s0 for k in range(count)])
    mu_residual = data.mus - 2.0 * q_hat_arr
    s_residual = data.s_values - s0 - q_check_arr
    if data.boundary.parity == "even":
        e_n = central_binomial_ratio(n)
        b = data.boundary.b
        mu_residual = mu_residual - 2.0 * e_n * b / SQRT_PI
        s_residual = s_residual - math.pi * e_n * e_n * b * b / 8.0
    return FirstOrderResiduals(mu=mu_residual, s=s_residual)

