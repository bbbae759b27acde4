"""Eigenvalues, norming constants, eigenfunctions and gradients for T_D and T_b."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Dict, List, Sequence

import numpy as np
from scipy.optimize import brentq
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from .boundary import BoundaryCondition, RobinBoundary
from .config import SolverConfig
from .errors import BracketingError, InputValidationError, NumericalError, OscillationCountError
from .potential import Potential
from .quadrature import HalfLineRule
from .solutions import (
    BoundaryTrace,
    ShootingSolution,
    integrate_initial,
    integrate_psi_plus,
    match_to_psi_plus,
    shoot,
)
from .specfun import hermite_table, weber_at_zero

logger = logging.getLogger(__name__)


@dataclass
class SpectralDatum:
    """One eigenvalue record of the Dirichlet or Robin problem."""

    n: int
    lam: float
    mu: float
    s: float
    r: float = math.nan
    ws_dot: float = math.nan
    norm_sq_psi_plus: float = math.nan
    norm_sq_phi: float = math.nan


@dataclass
class SpectralData:
    """Spectral dataset of one boundary problem, truncated at N modes."""

    boundary: BoundaryCondition
    entries: List[SpectralDatum]
    q0_datum: float
    truncation: Dict[str, float] = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.entries)

    @property
    def lambdas(self) -> np.ndarray:
        return np.array([entry.lam for entry in self.entries])

    @property
    def mus(self) -> np.ndarray:
        return np.array([entry.mu for entry in self.entries])

    @property
    def s_values(self) -> np.ndarray:
        return np.array([entry.s for entry in self.entries])

    @property
    def r_values(self) -> np.ndarray:
        return np.array([entry.r for entry in self.entries])

    @property
    def ws_dots(self) -> np.ndarray:
        return np.array([entry.ws_dot for entry in self.entries])

    def with_r(self, r: Sequence[float], **truncation) -> "SpectralData":
        if len(r) != self.size:
            raise InputValidationError(f"Expected {self.size} r-values, got {len(r)}.")
        entries = [replace(entry, r=float(value)) for entry, value in zip(self.entries, r)]
        return SpectralData(self.boundary, entries, self.q0_datum, {**self.truncation, **truncation})


@dataclass(frozen=True, eq=False)
class Eigenmode:
    """A solved eigenpair with the λ-neighbour traces used for derivatives."""

    n: int
    boundary: BoundaryCondition
    shooting: ShootingSolution
    trace_minus: BoundaryTrace
    trace_plus: BoundaryTrace
    step: float

    @property
    def lam(self) -> float:
        return self.shooting.lam

    @property
    def trace(self) -> BoundaryTrace:
        return self.shooting.trace

    @cached_property
    def sign(self) -> float:
        return self.boundary.eigenfunction_sign(self.trace.psi0, self.trace.dpsi0)

    def psi(self, x) -> tuple[np.ndarray, np.ndarray]:
        """Normalised eigenfunction ψₙ and ψₙ′ on the half-line."""
        value, slope, _ = self.shooting.normalized(x)
        return self.sign * value, self.sign * slope

    def tail_fraction(self, x) -> np.ndarray:
        """∫ₓ^∞ψₙ² for the normalised eigenfunction."""
        return self.shooting.normalized(x)[2]

    def at_zero(self) -> tuple[float, float]:
        value, slope = self.psi(0.0)
        return float(value), float(slope)

    def _scaled_difference(self, component: str) -> float:
        """Central λ-difference of a boundary trace of ψ₊, in mantissa units of this trace."""
        base = self.trace.log_scale
        plus = getattr(self.trace_plus, component) * math.exp(self.trace_plus.log_scale - base)
        minus = getattr(self.trace_minus, component) * math.exp(self.trace_minus.log_scale - base)
        return (plus - minus) / (2.0 * self.step)

    @property
    def ws_dot(self) -> float:
        """∂λ of the Wronskian at the eigenvalue."""
        base = self.trace.log_scale
        plus = self.boundary.wronskian(self.trace_plus.psi0, self.trace_plus.dpsi0) * math.exp(
            self.trace_plus.log_scale - base
        )
        minus = self.boundary.wronskian(self.trace_minus.psi0, self.trace_minus.dpsi0) * math.exp(
            self.trace_minus.log_scale - base
        )
        return (plus - minus) / (2.0 * self.step) * math.exp(base)

    def log_derivative_of_trace(self) -> float:
        """∂λ log|ψ₊′(0, λ)| (Dirichlet) or ∂λ log|ψ₊(0, λ)| (Robin)."""
        component = "dpsi0" if self.boundary.parity == "odd" else "psi0"
        return self._scaled_difference(component) / getattr(self.trace, component)

    @property
    def norming_constant(self) -> float:
        return norming_constant(self.trace, self.boundary)


def norming_constant(trace: BoundaryTrace, boundary: BoundaryCondition) -> float:
    """−log|ψ₊′(0)| (Dirichlet) or −log|ψ₊(0)| (Robin) from the de-scaled trace."""
    return -(math.log(abs(boundary.boundary_trace(trace.psi0, trace.dpsi0))) + trace.log_scale)


@dataclass(frozen=True, eq=False)
class CompanionSolution:
    """χₙ with {χₙ, ψₙ} = 1, assembled from θ or φ and ψₙ."""

    mode: Eigenmode
    forward: object
    forward_weight: float
    psi_weight: float

    def evaluate(self, x) -> tuple[np.ndarray, np.ndarray]:
        y, dy, _ = self.forward.evaluate(x)
        psi, dpsi = self.mode.psi(x)
        return self.forward_weight * y + self.psi_weight * psi, self.forward_weight * dy + self.psi_weight * dpsi


@dataclass(frozen=True)
class GradientComparison:
    analytic: float
    finite_diff: float

    @property
    def error(self) -> float:
        return abs(self.analytic - self.finite_diff)

    @property
    def relative_error(self) -> float:
        scale = max(abs(self.analytic), abs(self.finite_diff))
        return self.error / scale if scale > 0 else 0.0


@dataclass(frozen=True)
class GradientProducts:
    """Pairings ((gₙ)′, gₘ)₊ of λ- and s-gradients with their predicted values."""

    lam_lam: np.ndarray
    s_lam: np.ndarray
    lam_s: np.ndarray
    s_s: np.ndarray
    expected: Dict[str, np.ndarray]

    def max_defect(self) -> float:
        observed = {"lam_lam": self.lam_lam, "s_lam": self.s_lam, "lam_s": self.lam_s, "s_s": self.s_s}
        return max(float(np.max(np.abs(observed[key] - self.expected[key]))) for key in observed)


@dataclass(frozen=True)
class MergedSpectrum:
    values: np.ndarray
    interlaced: bool


class EigenvalueSolver:
    """Root search for the Wronskian of one (q, boundary) pair, mode by mode."""

    def __init__(self, q: Potential, boundary: BoundaryCondition, config: SolverConfig | None = None) -> None:
        self.q = q
        self.boundary = boundary
        self.config = config or SolverConfig()

    @cached_property
    def _seed_rule(self) -> HalfLineRule:
        return self.q.quadrature_rule(self.config.quad_panel, self.config.quad_order)

    def q_hat(self, n: int) -> float:
        """(q, (ψ⁰ⱼ)²)₊ for the full-line index j of mode n."""
        if self.q.is_zero:
            return 0.0
        index = self.boundary.full_index(n)
        rule = self._seed_rule
        table, _ = hermite_table(index, rule.nodes)
        return rule.integrate(np.asarray(self.q.evaluate(rule.nodes)) * table[index] ** 2)

    def seed(self, n: int) -> float:
        return self.boundary.unperturbed_eigenvalue(n) + self.boundary.first_order_shift(n, self.q_hat(n))

    def _scaled_wronskian(self, lam: float, reference_log: float) -> float:
        trace = integrate_psi_plus(self.q, lam, config=self.config)
        return self.boundary.wronskian(trace.psi0, trace.dpsi0) * math.exp(trace.log_scale - reference_log)

    def _root(self, low: float, high: float, reference_log: float) -> float:
        tol = self.config.root_tol * max(1.0, abs(high))
        return brentq(self._scaled_wronskian, low, high, args=(reference_log,), xtol=tol, rtol=4 * np.finfo(float).eps)

    def _accept(self, n: int, lam: float) -> ShootingSolution | None:
        shooting = shoot(self.q, lam, self.config)
        if shooting.trace.zeros == n:
            return shooting
        logger.warning(
            "Root λ=%.10f of %s mode %d has %d zeros; widening the search",
            lam,
            self.boundary.name,
            n,
            shooting.trace.zeros,
        )
        return None

    def _quick(self, n: int) -> ShootingSolution | None:
        lam0 = self.boundary.unperturbed_eigenvalue(n)
        seed = self.seed(n)
        eps = self.config.bracket_eps
        window = (lam0 - 2.0 + eps, lam0 + 2.0 - eps)
        reference_log = integrate_psi_plus(self.q, seed, config=self.config).log_scale
        half = max(0.05, 2.0 * abs(seed - lam0))
        brackets = [(max(seed - half, window[0]), min(seed + half, window[1])), window]
        for low, high in brackets:
            if low >= high:
                continue
            f_low = self._scaled_wronskian(low, reference_log)
            f_high = self._scaled_wronskian(high, reference_log)
            if f_low * f_high < 0:
                return self._accept(n, self._root(low, high, reference_log))
        return None

    def _scan(self, n: int, half_width: float, points: int) -> ShootingSolution:
        lam0 = self.boundary.unperturbed_eigenvalue(n)
        eps = self.config.bracket_eps
        grid = np.linspace(lam0 - half_width + eps, lam0 + half_width - eps, points)
        reference_log = integrate_psi_plus(self.q, lam0, config=self.config).log_scale
        values = [self._scaled_wronskian(lam, reference_log) for lam in grid]
        scan = list(zip(grid.tolist(), values))
        candidates = []
        for (low, f_low), (high, f_high) in zip(scan[:-1], scan[1:]):
            if f_low * f_high < 0:
                candidates.append(self._root(low, high, reference_log))
        for lam in candidates:
            accepted = self._accept(n, lam)
            if accepted is not None:
                return accepted
        if candidates:
            found = shoot(self.q, candidates[0], self.config).trace.zeros
            raise OscillationCountError(n, n, found, candidates[0])
        raise BracketingError(
            f"No sign change of the {self.boundary.name} Wronskian for mode {n} in "
            f"[{grid[0]:.6f}, {grid[-1]:.6f}].",
            scan=scan,
        )

    def solve_mode(self, n: int) -> ShootingSolution:
        """ψ₊ at the n-th eigenvalue, verified by its zero count."""
        quick = self._quick(n)
        if quick is not None:
            return quick
        for attempt in Retrying(
            stop=stop_after_attempt(self.config.bracket_widenings + 1),
            retry=retry_if_exception_type(BracketingError),
            reraise=True,
        ):
            with attempt:
                number = attempt.retry_state.attempt_number
                return self._scan(n, 2.0 * 2 ** (number - 1), 16 * number + 1)
        raise NumericalError(f"Eigenvalue search for mode {n} ended without a result.")

    def eigenmode(self, n: int, x_extent: float = 0.0) -> Eigenmode:
        shooting = self.solve_mode(n)
        lam = shooting.lam
        if x_extent > shooting.x_far:
            shooting = shoot(self.q, lam, self.config, x_extent=x_extent)
        step = self.config.lambda_step
        return Eigenmode(
            n=n,
            boundary=self.boundary,
            shooting=shooting,
            trace_minus=integrate_psi_plus(self.q, lam - step, config=self.config),
            trace_plus=integrate_psi_plus(self.q, lam + step, config=self.config),
            step=step,
        )

    def eigenmodes(self, count: int) -> List[Eigenmode]:
        if self.config.max_workers > 1:
            with ThreadPoolExecutor(max_workers=self.config.max_workers) as pool:
                return list(pool.map(self.eigenmode, range(count)))
        return [self.eigenmode(n) for n in range(count)]

    def solve_modes(self, count: int) -> List[ShootingSolution]:
        if self.config.max_workers > 1:
            with ThreadPoolExecutor(max_workers=self.config.max_workers) as pool:
                return list(pool.map(self.solve_mode, range(count)))
        return [self.solve_mode(n) for n in range(count)]


def eigenvalues(
    q: Potential,
    boundary: BoundaryCondition,
    N: int,
    config: SolverConfig | None = None,
) -> np.ndarray:
    """First N eigenvalues, strictly increasing."""
    if N < 1:
        raise InputValidationError(f"N must be at least 1, got {N}.")
    solver = EigenvalueSolver(q, boundary, config)
    values = np.array([mode.lam for mode in solver.solve_modes(N)])
    if np.any(np.diff(values) <= 0):
        raise NumericalError(f"Computed {boundary.name} eigenvalues are not strictly increasing: {values}.")
    return values


def spectral_pairs(
    q: Potential,
    boundary: BoundaryCondition,
    N: int,
    config: SolverConfig | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and norming constants only, without ẇ or the norms."""
    solver = EigenvalueSolver(q, boundary, config)
    traces = [mode.trace for mode in solver.solve_modes(N)]
    return np.array([trace.lam for trace in traces]), np.array([norming_constant(t, boundary) for t in traces])


def phi_norm_sq(mode: Eigenmode, q: Potential, config: SolverConfig) -> float:
    """‖φ‖²₊ (Dirichlet) or ‖θ + bφ‖²₊ (Robin) at an eigenvalue."""
    initial = (0.0, 1.0) if mode.boundary.parity == "odd" else (1.0, mode.boundary.b)
    x_match = math.sqrt(max(mode.lam, 1.0)) + 1.0
    forward = integrate_initial(q, mode.lam, "boundary", x_match, config, initial=initial)
    coefficient = match_to_psi_plus(mode.shooting, forward, x_match)
    _, _, head = forward.evaluate(x_match)
    _, _, tail = mode.shooting.evaluate(x_match)
    return float(head + coefficient * coefficient * tail)


def norming_constants(
    q: Potential,
    boundary: BoundaryCondition,
    N: int,
    config: SolverConfig | None = None,
) -> List[SpectralDatum]:
    """Eigenvalue records with s, ẇ and both norms filled in."""
    config = config or SolverConfig()
    solver = EigenvalueSolver(q, boundary, config)
    records = []
    for mode in solver.eigenmodes(N):
        lam0 = boundary.unperturbed_eigenvalue(mode.n)
        records.append(
            SpectralDatum(
                n=mode.n,
                lam=mode.lam,
                mu=mode.lam - lam0,
                s=mode.norming_constant,
                ws_dot=mode.ws_dot,
                norm_sq_psi_plus=mode.trace.norm_sq,
                norm_sq_phi=phi_norm_sq(mode, q, config),
            )
        )
        logger.info("%s mode %d: λ=%.12f s=%.12f", boundary.name, mode.n, mode.lam, records[-1].s)
    return records


def q0_datum(q: Potential, boundary: BoundaryCondition) -> float:
    """q(0) for Dirichlet data, q(0) − 2b² for Robin data."""
    if boundary.parity == "odd":
        return q.q_at_zero()
    return q.q_at_zero() - 2.0 * boundary.b**2


def solve(
    q: Potential,
    boundary: BoundaryCondition,
    N: int,
    config: SolverConfig | None = None,
) -> SpectralData:
    """Eigenvalues and norming constants of the first N modes; r is filled by coords."""
    if N < 1:
        raise InputValidationError(f"N must be at least 1, got {N}.")
    entries = norming_constants(q, boundary, N, config)
    lambdas = np.array([entry.lam for entry in entries])
    if np.any(np.diff(lambdas) <= 0):
        raise NumericalError(f"Computed {boundary.name} eigenvalues are not strictly increasing.")
    return SpectralData(boundary=boundary, entries=entries, q0_datum=q0_datum(q, boundary), truncation={"N": N})


def eigenmode(
    q: Potential,
    boundary: BoundaryCondition,
    n: int,
    config: SolverConfig | None = None,
    x_extent: float = 0.0,
) -> Eigenmode:
    return EigenvalueSolver(q, boundary, config).eigenmode(n, x_extent)


def normalized_eigenfunction(
    q: Potential,
    boundary: BoundaryCondition,
    n: int,
    config: SolverConfig | None = None,
    step: float = 0.01,
    x_end: float | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(x, ψₙ, ψₙ′) on a uniform grid; unit L²(ℝ₊) norm, positive boundary trace."""
    config = config or SolverConfig()
    mode = eigenmode(q, boundary, n, config)
    x_end = x_end if x_end is not None else config.x_max_for(mode.lam)
    grid = np.linspace(0.0, x_end, int(round(x_end / step)) + 1)
    psi, dpsi = mode.psi(grid)
    return grid, psi, dpsi


def companion(mode: Eigenmode, q: Potential, config: SolverConfig, x_end: float | None = None) -> CompanionSolution:
    """χₙ for a solved eigenmode."""
    x_end = x_end if x_end is not None else config.companion_x_max
    psi0, dpsi0 = mode.at_zero()
    log_derivative = mode.log_derivative_of_trace()
    if mode.boundary.parity == "odd":
        forward = integrate_initial(q, mode.lam, "theta", x_end, config)
        return CompanionSolution(mode, forward, 1.0 / dpsi0, -log_derivative)
    forward = integrate_initial(q, mode.lam, "phi", x_end, config)
    return CompanionSolution(mode, forward, -1.0 / psi0, -log_derivative)


def chi_companion(
    q: Potential,
    boundary: BoundaryCondition,
    n: int,
    config: SolverConfig | None = None,
    step: float = 0.01,
    x_end: float | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(x, χₙ, χₙ′) on a uniform grid over [0, x_end]."""
    config = config or SolverConfig()
    x_end = x_end if x_end is not None else config.companion_x_max
    mode = eigenmode(q, boundary, n, config, x_extent=x_end)
    chi = companion(mode, q, config, x_end)
    grid = np.linspace(0.0, x_end, int(round(x_end / step)) + 1)
    values, slopes = chi.evaluate(grid)
    return grid, values, slopes


@dataclass(frozen=True, eq=False)
class GradientTables:
    """ψₙ², ψₙχₙ and their x-derivatives for a set of modes on a quadrature rule."""

    rule: HalfLineRule
    modes: List[Eigenmode]
    psi_sq: np.ndarray
    psi_chi: np.ndarray
    psi_sq_prime: np.ndarray
    psi_chi_prime: np.ndarray
    psi_at_zero: np.ndarray
    psi_chi_at_zero: np.ndarray
    psi_chi_far: np.ndarray

    @classmethod
    def build(
        cls,
        q: Potential,
        boundary: BoundaryCondition,
        count: int,
        config: SolverConfig,
    ) -> "GradientTables":
        x_end = config.companion_x_max
        rule = HalfLineRule.build(x_end, config.quad_panel, config.quad_order)
        solver = EigenvalueSolver(q, boundary, config)
        modes, psi_sq, psi_chi, psi_sq_prime, psi_chi_prime = [], [], [], [], []
        psi_at_zero, psi_chi_at_zero, psi_chi_far = [], [], []
        for n in range(count):
            mode = solver.eigenmode(n, x_extent=x_end)
            chi = companion(mode, q, config, x_end)
            psi, dpsi = mode.psi(rule.nodes)
            chi_values, chi_slopes = chi.evaluate(rule.nodes)
            modes.append(mode)
            psi_sq.append(psi * psi)
            psi_chi.append(psi * chi_values)
            psi_sq_prime.append(2.0 * psi * dpsi)
            psi_chi_prime.append(dpsi * chi_values + psi * chi_slopes)
            p0, _ = mode.at_zero()
            c0, _ = chi.evaluate(0.0)
            psi_at_zero.append(p0)
            psi_chi_at_zero.append(p0 * float(c0))
            far_psi, _ = mode.psi(x_end)
            far_chi, _ = chi.evaluate(x_end)
            psi_chi_far.append(float(far_psi) * float(far_chi))
        return cls(
            rule=rule,
            modes=modes,
            psi_sq=np.array(psi_sq),
            psi_chi=np.array(psi_chi),
            psi_sq_prime=np.array(psi_sq_prime),
            psi_chi_prime=np.array(psi_chi_prime),
            psi_at_zero=np.array(psi_at_zero),
            psi_chi_at_zero=np.array(psi_chi_at_zero),
            psi_chi_far=np.array(psi_chi_far),
        )

    def lambda_gradient(self, v: Potential) -> np.ndarray:
        """(v, ψₙ²)₊ for every tabulated mode."""
        weights = self.rule.weights * np.asarray(v.evaluate(self.rule.nodes))
        return self.psi_sq @ weights

    def s_gradient(self, v: Potential) -> np.ndarray:
        """(v, ψₙχₙ)₊ for every tabulated mode."""
        weights = self.rule.weights * np.asarray(v.evaluate(self.rule.nodes))
        return self.psi_chi @ weights


def gradient_check(
    q: Potential,
    boundary: BoundaryCondition,
    n: int,
    v: Potential,
    config: SolverConfig | None = None,
    eps: float = 1e-4,
) -> Dict[str, GradientComparison]:
    """Analytic gradients of λₙ and sₙ in direction v against central differences."""
    config = config or SolverConfig()
    tables = GradientTables.build(q, boundary, n + 1, config)
    analytic_lam = float(tables.lambda_gradient(v)[n])
    analytic_s = float(tables.s_gradient(v)[n])

    def spectral_pair(potential: Potential, condition: BoundaryCondition) -> tuple[float, float]:
        mode = EigenvalueSolver(potential, condition, config).eigenmode(n)
        return mode.lam, mode.norming_constant

    if v.is_zero:
        result = {"lambda": GradientComparison(analytic_lam, 0.0), "s": GradientComparison(analytic_s, 0.0)}
    else:
        lam_plus, s_plus = spectral_pair(q.plus(v, eps), boundary)
        lam_minus, s_minus = spectral_pair(q.plus(v, -eps), boundary)
        result = {
            "lambda": GradientComparison(analytic_lam, (lam_plus - lam_minus) / (2 * eps)),
            "s": GradientComparison(analytic_s, (s_plus - s_minus) / (2 * eps)),
        }
    if isinstance(boundary, RobinBoundary):
        lam_plus, s_plus = spectral_pair(q, boundary.with_b(boundary.b + eps))
        lam_minus, s_minus = spectral_pair(q, boundary.with_b(boundary.b - eps))
        result["lambda_b"] = GradientComparison(
            float(tables.psi_at_zero[n] ** 2), (lam_plus - lam_minus) / (2 * eps)
        )
        result["s_b"] = GradientComparison(float(tables.psi_chi_at_zero[n]), (s_plus - s_minus) / (2 * eps))
    return result


def gradient_products(
    q: Potential,
    boundary: BoundaryCondition,
    n_max: int,
    config: SolverConfig | None = None,
) -> GradientProducts:
    """((ψₙ²)′, ψₘ²)₊, ((ψₙχₙ)′, ψₘ²)₊, ((ψₙ²)′, ψₘχₘ)₊, ((ψₙχₙ)′, ψₘχₘ)₊ for n, m ≤ n_max."""
    config = config or SolverConfig()
    tables = GradientTables.build(q, boundary, n_max + 1, config)
    gram = lambda rows, columns: tables.rule.gram(rows, columns)  # noqa: E731
    lam_lam = gram(tables.psi_sq_prime, tables.psi_sq)
    s_lam = gram(tables.psi_chi_prime, tables.psi_sq)
    lam_s = gram(tables.psi_sq_prime, tables.psi_chi)
    # (ψχ)(x) ~ −1/x: add ∫_X^∞ of the leading-order tail
    s_s = gram(tables.psi_chi_prime, tables.psi_chi) - 0.5 * np.outer(tables.psi_chi_far, tables.psi_chi_far)

    identity = np.eye(n_max + 1)
    if boundary.parity == "odd":
        zeros = np.zeros_like(identity)
        expected = {"lam_lam": zeros, "s_lam": -0.5 * identity, "lam_s": 0.5 * identity, "s_s": zeros}
    else:
        psi0_sq = tables.psi_at_zero**2
        boundary_term = np.outer(psi0_sq, tables.psi_chi_at_zero)
        # by parts, s_lam[n, m] = −(ψχ)ₙ(0)ψₘ(0)² − lam_s[m, n]
        expected = {
            "lam_lam": -0.5 * np.outer(psi0_sq, psi0_sq),
            "s_lam": 0.5 * (-identity - boundary_term.T),
            "lam_s": 0.5 * (identity - boundary_term),
            "s_s": -0.5 * np.outer(tables.psi_chi_at_zero, tables.psi_chi_at_zero),
        }
    return GradientProducts(lam_lam=lam_lam, s_lam=s_lam, lam_s=lam_s, s_s=s_s, expected=expected)


def hadamard_wronskian(
    lambdas: Sequence[float],
    boundary: BoundaryCondition,
    lam_star: float,
    tail_coefficient: float = 0.0,
    tail_factor: int = 64,
) -> float:
    """Product representation of w_D or w_N at a non-eigenvalue λ*, with the leading-order tail."""
    values = np.asarray(lambdas, dtype=float)
    count = values.size
    lam0 = np.array([boundary.unperturbed_eigenvalue(n) for n in range(count)])
    value0, derivative0 = weber_at_zero(lam_star)
    reference = -value0 if boundary.parity == "odd" else derivative0
    ratios = (lam_star - values) / (lam_star - lam0)
    sign = float(np.prod(np.sign(ratios)))
    log_product = float(np.sum(np.log(np.abs(ratios))))
    if tail_coefficient != 0.0:
        tail_lam0 = np.array([boundary.unperturbed_eigenvalue(n) for n in range(count, tail_factor * count)])
        tail_mu = tail_coefficient / np.sqrt(tail_lam0)
        log_product += float(np.sum(np.log1p(-tail_mu / (lam_star - tail_lam0))))
    return float(sign * reference * math.exp(log_product))


def merged_spectrum(dirichlet: Sequence[float], neumann: Sequence[float]) -> MergedSpectrum:
    """σ(T) of the even extension: Neumann and Dirichlet eigenvalues interleaved."""
    d_values = np.asarray(dirichlet, dtype=float)
    n_values = np.asarray(neumann, dtype=float)
    merged = np.sort(np.concatenate([d_values, n_values]))
    count = min(d_values.size, n_values.size)
    alternating = np.empty(2 * count)
    alternating[0::2] = n_values[:count]
    alternating[1::2] = d_values[:count]
    interlaced = bool(np.all(np.diff(alternating) > 0))
    return MergedSpectrum(values=merged, interlaced=interlaced)
