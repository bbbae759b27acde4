"""Isospectral flows that shift a single norming constant."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import List, Mapping

import numpy as np

from .boundary import BoundaryCondition, DirichletBoundary, RobinBoundary
from .config import SolverConfig
from .errors import InputValidationError, NumericalError
from .potential import Potential
from .spectrum import Eigenmode, eigenmode

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FlowResult:
    q_new: Potential
    b_new: float | None
    n: int
    t: float
    eta_min: float
    eta_max: float

    @property
    def boundary(self) -> BoundaryCondition:
        return DirichletBoundary() if self.b_new is None else RobinBoundary(self.b_new)


def _flow_grid(q: Potential, mode: Eigenmode, config: SolverConfig) -> tuple[np.ndarray, float]:
    if q.kind == "grid":
        return q.h * np.arange(q.samples.size), q.h
    step = config.grid_step
    x_end = max(q.x_max, math.sqrt(mode.lam) + 8.0)
    count = int(math.ceil(x_end / step))
    return step * np.arange(count + 1), step


def _transform(q: Potential, mode: Eigenmode, t: float, config: SolverConfig) -> tuple[Potential, float, float]:
    """q − 2(log η)″ with η = 1 + (eᵗ − 1)∫ₓ^∞ψₙ², sampled on q's grid."""
    grid, step = _flow_grid(q, mode, config)
    psi, dpsi = mode.psi(grid)
    growth = math.expm1(t)
    eta = 1.0 + growth * mode.tail_fraction(grid)
    eta_prime = -growth * psi * psi
    eta_second = -2.0 * growth * psi * dpsi
    log_second = eta_second / eta - (eta_prime / eta) ** 2
    samples = np.asarray(q.evaluate(grid), dtype=float) - 2.0 * log_second
    eta_min, eta_max = float(eta.min()), float(eta.max())
    if eta_min <= 0.0:
        raise NumericalError(f"η vanished in the flow of mode {mode.n} (min {eta_min:.3e}).")
    metadata = f"flow n={mode.n} t={t!r} of {q.metadata or q.kind}"
    try:
        q_new = Potential.from_samples(samples, step, metadata, q.decay_tol)
    except InputValidationError as exc:
        raise NumericalError(f"Flowed potential does not decay on [0, {grid[-1]:.2f}]: {exc}") from exc
    return q_new, eta_min, eta_max


def dirichlet_flow(q: Potential, n: int, t: float, config: SolverConfig | None = None) -> FlowResult:
    """Shift s₂ₙ₊₁ by t keeping the Dirichlet spectrum and q(0)."""
    config = config or SolverConfig()
    if t == 0.0:
        return FlowResult(q_new=q, b_new=None, n=n, t=0.0, eta_min=1.0, eta_max=1.0)
    mode = eigenmode(q, DirichletBoundary(), n, config)
    q_new, eta_min, eta_max = _transform(q, mode, t, config)
    logger.info("Dirichlet flow n=%d t=%.6g: η ∈ [%.6f, %.6f]", n, t, eta_min, eta_max)
    return FlowResult(q_new=q_new, b_new=None, n=n, t=t, eta_min=eta_min, eta_max=eta_max)


def robin_flow(q: Potential, b: float, n: int, t: float, config: SolverConfig | None = None) -> FlowResult:
    """Shift s₂ₙ by t keeping the Robin spectrum and q(0) − 2b²."""
    config = config or SolverConfig()
    if t == 0.0:
        return FlowResult(q_new=q, b_new=float(b), n=n, t=0.0, eta_min=1.0, eta_max=1.0)
    mode = eigenmode(q, RobinBoundary(b), n, config)
    q_new, eta_min, eta_max = _transform(q, mode, t, config)
    psi0, _ = mode.at_zero()
    b_new = b - math.expm1(-t) * psi0 * psi0
    logger.info("Robin flow n=%d t=%.6g: b %.8f -> %.8f", n, t, b, b_new)
    return FlowResult(q_new=q_new, b_new=b_new, n=n, t=t, eta_min=eta_min, eta_max=eta_max)


def flow(
    q: Potential,
    boundary: BoundaryCondition,
    n: int,
    t: float,
    config: SolverConfig | None = None,
) -> FlowResult:
    if boundary.parity == "odd":
        return dirichlet_flow(q, n, t, config)
    return robin_flow(q, boundary.b, n, t, config)


def isospectral_family(
    q: Potential,
    boundary: BoundaryCondition,
    shifts: Mapping[int, float],
    config: SolverConfig | None = None,
) -> List[FlowResult]:
    """Apply single-mode flows one after another, in increasing mode order."""
    results: List[FlowResult] = []
    current_q, current_boundary = q, boundary
    for n in sorted(shifts):
        result = flow(current_q, current_boundary, n, float(shifts[n]), config)
        results.append(result)
        current_q = result.q_new
        current_boundary = current_boundary if result.b_new is None else current_boundary.with_b(result.b_new)
    return results
