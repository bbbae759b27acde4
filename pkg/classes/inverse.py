"""Reconstruction of q (and b) from truncated spectral data.

Three stages: invert the linearisation at q = 0, run damped Gauss–Newton on the weighted
residual in the Hermite-coefficient basis, then place the r-coordinates exactly with
single-mode flows, which leave the eigenvalues and the q(0) datum untouched.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import List

import numpy as np

from .boundary import BoundaryCondition, RobinBoundary
from .config import SolverConfig
from .coords import TailModel, check_monotone, fill_r, r_dirichlet, r_robin
from .darboux import isospectral_family
from .errors import InputValidationError
from .potential import Potential
from .quadrature import HalfLineRule
from .specfun import hermite_basis_table, hermite_table, second_solution, unperturbed_constants
from .spectrum import GradientTables, SpectralData, solve, spectral_pairs

logger = logging.getLogger(__name__)

ARMIJO_C1 = 1e-4
STEP_DECREASE = 0.5
MIN_STEP = 1e-6


@dataclass(frozen=True)
class ForwardJacobian:
    """Derivatives of (μ, q0 datum, r) with respect to the unknowns (c₀..c_{K−1} [, b])."""

    d_mu: np.ndarray
    d_datum: np.ndarray
    d_r: np.ndarray


@dataclass(frozen=True)
class _Kernels:
    """Constant parts of the r-map for N modes of one boundary type."""

    alpha: np.ndarray
    datum: np.ndarray
    hilbert: np.ndarray
    tail: np.ndarray

    @classmethod
    def build(cls, boundary: BoundaryCondition, N: int, factor: int) -> "_Kernels":
        parity = boundary.parity
        shift = 1 if parity == "odd" else -1
        n = np.arange(N)
        alpha = np.array([unperturbed_constants(k, parity).alpha for k in range(N)])
        datum = -1.0 / (4.0 * (2 * n + 1)) if parity == "odd" else 1.0 / (4.0 * (2 * n - 1))
        m = np.arange(factor * N)
        kernel = 1.0 / (2.0 * (n[:, None] - m[None, :]) + shift)
        tail_basis = np.zeros(factor * N)
        tail_basis[N:] = TailModel(1.0, parity, factor).values(N, factor * N)
        return cls(alpha=alpha, datum=datum, hilbert=kernel[:, :N], tail=kernel @ tail_basis)

    def d_r(self, d_s: np.ndarray, d_mu: np.ndarray, d_datum: np.ndarray, d_tail: np.ndarray) -> np.ndarray:
        return (
            d_s
            - self.alpha[:, None] * d_mu
            + self.datum[:, None] * d_datum[None, :]
            - 0.5 * self.hilbert @ d_mu
            - 0.5 * self.tail[:, None] * d_tail[None, :]
        )


def _basis(K: int, rule: HalfLineRule) -> np.ndarray:
    """ψ̃⁰₂ₖ, k < K, tabulated on the rule nodes."""
    table, _ = hermite_basis_table(2 * K - 2, rule.nodes)
    return table[0::2]


def _basis_datum_and_tail(K: int, rule: HalfLineRule) -> tuple[np.ndarray, np.ndarray]:
    at_zero, _ = hermite_basis_table(2 * K - 2, 0.0)
    integrals = _basis(K, rule) @ rule.weights
    return np.asarray(at_zero)[0::2], 2.0 * integrals / math.pi


def forward_map(
    q: Potential,
    boundary: BoundaryCondition,
    N: int,
    config: SolverConfig | None = None,
) -> SpectralData:
    """(μ, q0 datum, r) of the first N modes."""
    config = config or SolverConfig()
    data = solve(q, boundary, N, config)
    return fill_r(data, TailModel.from_potential(q, boundary, config.tail_factor))


def jacobian(
    q: Potential,
    boundary: BoundaryCondition,
    K: int,
    N: int,
    config: SolverConfig | None = None,
) -> ForwardJacobian:
    """Analytic Jacobian from the gradients (v, ψₙ²)₊, (v, ψₙχₙ)₊ and, for Robin, ψₙ²(0), (ψₙχₙ)(0)."""
    config = config or SolverConfig()
    tables = GradientTables.build(q, boundary, N, config)
    basis = _basis(K, tables.rule) * tables.rule.weights[None, :]
    d_mu = tables.psi_sq @ basis.T
    d_s = tables.psi_chi @ basis.T
    d_datum, d_tail = _basis_datum_and_tail(K, tables.rule)
    if boundary.parity == "even":
        d_mu = np.column_stack([d_mu, tables.psi_at_zero**2])
        d_s = np.column_stack([d_s, tables.psi_chi_at_zero])
        d_datum = np.append(d_datum, -4.0 * boundary.b)
        d_tail = np.append(d_tail, 2.0 / math.pi)
    kernels = _Kernels.build(boundary, N, config.tail_factor)
    return ForwardJacobian(d_mu=d_mu, d_datum=d_datum, d_r=kernels.d_r(d_s, d_mu, d_datum, d_tail))


def _unperturbed_jacobian(boundary: BoundaryCondition, K: int, N: int, config: SolverConfig) -> ForwardJacobian:
    """Jacobian at q = 0, b = 0 from Hermite functions: ψₙ = √2ψⱼ⁰ and ψₙχₙ = ψⱼ⁰χⱼ⁰."""
    x_end = config.companion_x_max
    rule = HalfLineRule.build(x_end, config.quad_panel, config.quad_order)
    indices = [boundary.full_index(n) for n in range(N)]
    psi, _ = hermite_table(max(indices), rule.nodes)
    psi_sq = 2.0 * psi[indices] ** 2
    psi_chi = np.array(
        [psi[j] * second_solution(j, rule.nodes, x_max=x_end, rtol=config.ode_rtol, atol=config.ode_atol)[0] for j in indices]
    )
    basis = _basis(K, rule) * rule.weights[None, :]
    d_mu = psi_sq @ basis.T
    d_s = psi_chi @ basis.T
    d_datum, d_tail = _basis_datum_and_tail(K, rule)
    if boundary.parity == "even":
        at_zero, _ = hermite_table(max(indices), 0.0)
        d_mu = np.column_stack([d_mu, 2.0 * np.asarray(at_zero)[indices] ** 2])
        # χⱼ⁰(0) = 0 for even j
        d_s = np.column_stack([d_s, np.zeros(N)])
        d_datum = np.append(d_datum, 0.0)
        d_tail = np.append(d_tail, 2.0 / math.pi)
    kernels = _Kernels.build(boundary, N, config.tail_factor)
    return ForwardJacobian(d_mu=d_mu, d_datum=d_datum, d_r=kernels.d_r(d_s, d_mu, d_datum, d_tail))


@dataclass
class InverseProblem:
    """Target data plus the discretisation and iteration settings of a reconstruction."""

    target: SpectralData
    K: int | None = None
    max_iter: int = 25
    tol: float = 1e-7
    polish: bool = True
    continuation_steps: int = 0
    config: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self) -> None:
        N = self.target.size
        if N < 1:
            raise InputValidationError("Target spectral data is empty.")
        if self.K is None:
            self.K = N + math.ceil(N / 2)
        if self.K < 1 or self.max_iter < 0 or not self.tol > 0:
            raise InputValidationError("K, max_iter and tol must be positive.")
        if np.any(np.isnan(self.target.r_values)):
            raise InputValidationError("Target data lacks r-coordinates; run it through the forward map first.")
        if not check_monotone(self.target.mus, self.target.boundary.parity):
            raise InputValidationError("Target eigenvalues are not strictly increasing; data is not admissible.")

    @property
    def N(self) -> int:
        return self.target.size

    @property
    def is_robin(self) -> bool:
        return self.target.boundary.parity == "even"

    @property
    def weights(self) -> np.ndarray:
        return (1.0 + np.arange(self.N)) ** 0.75

    @property
    def tail_factor(self) -> int:
        return int(self.target.truncation.get("tail_factor", self.config.tail_factor))

    def target_vector(self, fraction: float = 1.0) -> np.ndarray:
        w = self.weights
        return fraction * np.concatenate(
            [w * self.target.mus, [self.target.q0_datum], w * self.target.r_values]
        )

    def unpack(self, x: np.ndarray) -> tuple[Potential, BoundaryCondition]:
        coeffs = x[: self.K]
        q = Potential.from_coeffs(coeffs, metadata="reconstruction")
        boundary = RobinBoundary(float(x[self.K])) if self.is_robin else self.target.boundary
        return q, boundary

    def observe(self, x: np.ndarray) -> np.ndarray:
        """Weighted (μ, q0 datum, r) of the iterate."""
        q, boundary = self.unpack(x)
        config = self.config.with_overrides(tail_factor=self.tail_factor)
        lambdas, s = spectral_pairs(q, boundary, self.N, config)
        mu = lambdas - np.array([boundary.unperturbed_eigenvalue(n) for n in range(self.N)])
        tail = TailModel.from_potential(q, boundary, self.tail_factor)
        if self.is_robin:
            datum = q.q_at_zero() - 2.0 * boundary.b**2
            r = r_robin(mu, datum, s, tail)
        else:
            datum = q.q_at_zero()
            r = r_dirichlet(mu, datum, s, tail)
        w = self.weights
        return np.concatenate([w * mu, [datum], w * r])

    def weighted_jacobian(self, x: np.ndarray) -> np.ndarray:
        q, boundary = self.unpack(x)
        config = self.config.with_overrides(tail_factor=self.tail_factor)
        return _stack(jacobian(q, boundary, self.K, self.N, config), self.weights)


def _stack(jac: ForwardJacobian, weights: np.ndarray) -> np.ndarray:
    return np.vstack([weights[:, None] * jac.d_mu, jac.d_datum[None, :], weights[:, None] * jac.d_r])


@dataclass
class ReconstructionResult:
    q: Potential
    b: float | None
    residual_history: List[float]
    converged: bool
    coefficients: np.ndarray

    @property
    def iterations(self) -> int:
        return max(len(self.residual_history) - 1, 0)


def linearized_guess(problem: InverseProblem, fraction: float = 1.0) -> np.ndarray:
    """Least-squares inverse of the linearisation at q = 0, b = 0."""
    jac = _unperturbed_jacobian(problem.target.boundary, problem.K, problem.N, problem.config.with_overrides(tail_factor=problem.tail_factor))
    matrix = _stack(jac, problem.weights)
    solution, *_ = np.linalg.lstsq(matrix, problem.target_vector(fraction), rcond=None)
    return solution


def _gauss_newton(
    problem: InverseProblem,
    x: np.ndarray,
    target: np.ndarray,
    history: List[float],
) -> tuple[np.ndarray, bool]:
    """Damped Gauss–Newton with an Armijo backtracking line search."""
    residual = problem.observe(x) - target
    value = float(residual @ residual)
    history.append(math.sqrt(value))
    for iteration in range(problem.max_iter):
        if math.sqrt(value) < problem.tol:
            return x, True
        matrix = problem.weighted_jacobian(x)
        step, *_ = np.linalg.lstsq(matrix, -residual, rcond=None)
        slope = 2.0 * float(residual @ (matrix @ step))
        alpha = 1.0
        while True:
            trial = x + alpha * step
            trial_residual = problem.observe(trial) - target
            trial_value = float(trial_residual @ trial_residual)
            if trial_value <= value + ARMIJO_C1 * alpha * slope:
                break
            alpha *= STEP_DECREASE
            if alpha < MIN_STEP:
                logger.warning("Line search stalled at iteration %d (residual %.3e)", iteration, math.sqrt(value))
                return x, False
        x, residual, value = trial, trial_residual, trial_value
        history.append(math.sqrt(value))
        logger.info("Gauss-Newton iteration %d: residual %.3e (step %.3g)", iteration + 1, math.sqrt(value), alpha)
    return x, math.sqrt(value) < problem.tol


def _polish(problem: InverseProblem, x: np.ndarray) -> tuple[Potential, BoundaryCondition]:
    """Flow each mode by t = r*ₙ − rₙ."""
    q, boundary = problem.unpack(x)
    observed = problem.observe(x)
    r = observed[problem.N + 1 :] / problem.weights
    shifts = {n: float(t) for n, t in enumerate(problem.target.r_values - r) if t != 0.0}
    results = isospectral_family(q, boundary, shifts, problem.config)
    if results:
        q = results[-1].q_new
        boundary = results[-1].boundary
    logger.info("Flow polish applied to %d modes (max |t| = %.3e)", len(shifts), max(map(abs, shifts.values()), default=0.0))
    return q, boundary


def _final_residual(problem: InverseProblem, q: Potential, boundary: BoundaryCondition) -> float:
    data = forward_map(q, boundary, problem.N, problem.config.with_overrides(tail_factor=problem.tail_factor))
    w = problem.weights
    observed = np.concatenate([w * data.mus, [data.q0_datum], w * data.r_values])
    return float(np.linalg.norm(observed - problem.target_vector()))


def reconstruct(problem: InverseProblem) -> ReconstructionResult:
    """Linearised guess, then Gauss–Newton (optionally along an amplitude homotopy), then flow polish."""
    history: List[float] = []
    steps = max(problem.continuation_steps, 0) + 1
    x = linearized_guess(problem, 1.0 / steps)
    converged = False
    for step in range(1, steps + 1):
        fraction = step / steps
        x, converged = _gauss_newton(problem, x, problem.target_vector(fraction), history)
        logger.info("Continuation step %d/%d finished (converged=%s)", step, steps, converged)
    q, boundary = problem.unpack(x)
    if problem.polish and converged:
        polished_q, polished_boundary = _polish(problem, x)
        polished = _final_residual(problem, polished_q, polished_boundary)
        if polished <= history[-1]:
            q, boundary = polished_q, polished_boundary
            history.append(polished)
        else:
            logger.warning("Flow polish raised the residual to %.3e; keeping the Gauss-Newton iterate", polished)
    return ReconstructionResult(
        q=q,
        b=boundary.b if problem.is_robin else None,
        residual_history=history,
        converged=converged,
        coefficients=x[: problem.K].copy(),
    )
