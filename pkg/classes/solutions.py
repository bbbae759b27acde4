"""Fundamental solutions ψ₊, θ, φ of −y″ + (x² + q)y = λy and their Wronskians.

ψ₊ is normalised by its Weber asymptotics at infinity and integrated inward as a
(ψ, ψ′) pair. The pair is rescaled to unit size whenever |ψ| + |ψ′| leaves
[renorm_low, renorm_high] and the accumulated log-scale is kept separately, so values
stay representable for every mode the toolkit handles.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Literal, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from .boundary import BoundaryCondition
from .config import SolverConfig
from .errors import InputValidationError, IntegrationRangeError
from .potential import Potential
from .quadrature import HalfLineRule
from .specfun import weber_asymptotic

logger = logging.getLogger(__name__)

InitialKind = Literal["theta", "phi"]
ZERO_EXCLUSION = 1e-6
_LOG_FLOAT_MAX = 709.0


@dataclass(frozen=True)
class ScaledValue:
    """A real number stored as mantissa·e^{log_scale}."""

    mantissa: float
    log_scale: float

    @property
    def value(self) -> float:
        if self.mantissa == 0.0:
            return 0.0
        magnitude = math.log(abs(self.mantissa)) + self.log_scale
        if magnitude > _LOG_FLOAT_MAX:
            return math.copysign(math.inf, self.mantissa)
        return self.mantissa * math.exp(self.log_scale)


@dataclass(frozen=True)
class BoundaryTrace:
    """Traces of ψ₊(·, λ, q) at the origin; true value = mantissa·e^{log_scale}."""

    lam: float
    psi0: float
    dpsi0: float
    log_scale: float
    norm_sq_mantissa: float
    zeros: int

    @property
    def psi0_value(self) -> float:
        return ScaledValue(self.psi0, self.log_scale).value

    @property
    def dpsi0_value(self) -> float:
        return ScaledValue(self.dpsi0, self.log_scale).value

    @property
    def norm_sq(self) -> float:
        """‖ψ₊‖²₊."""
        return ScaledValue(self.norm_sq_mantissa, 2.0 * self.log_scale).value


@dataclass(frozen=True, eq=False)
class _Segment:
    x_low: float
    x_high: float
    sol: object
    log_scale: float


@dataclass(frozen=True, eq=False)
class ShootingSolution:
    """Dense inward solution ψ₊ on [0, x_far] with the cumulative tail ∫ₓ^∞ψ₊²."""

    trace: BoundaryTrace
    x_far: float
    segments: Tuple[_Segment, ...]

    @property
    def lam(self) -> float:
        return self.trace.lam

    def evaluate(self, x) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Mantissas of ψ₊, ψ₊′ and ∫ₓ^∞ψ₊² in units of e^{trace.log_scale} (squared for the tail)."""
        x_arr = np.atleast_1d(np.asarray(x, dtype=float))
        psi = np.zeros_like(x_arr)
        dpsi = np.zeros_like(x_arr)
        tail = np.zeros_like(x_arr)
        final_log = self.trace.log_scale
        assigned = np.zeros(x_arr.shape, dtype=bool)
        for segment in self.segments:
            mask = (~assigned) & (x_arr >= segment.x_low) & (x_arr <= segment.x_high)
            if not np.any(mask):
                continue
            values = segment.sol(x_arr[mask])
            factor = math.exp(max(segment.log_scale - final_log, -_LOG_FLOAT_MAX))
            psi[mask] = values[0] * factor
            dpsi[mask] = values[1] * factor
            tail[mask] = values[2] * factor * factor
            assigned |= mask
        beyond = x_arr > self.x_far
        if np.any(beyond):
            for index in np.flatnonzero(beyond):
                log_s, value, derivative = weber_asymptotic(self.lam, float(x_arr[index]))
                factor = math.exp(max(log_s - final_log, -_LOG_FLOAT_MAX))
                psi[index] = value * factor
                dpsi[index] = derivative * factor
                tail[index] = psi[index] ** 2 / (2.0 * x_arr[index])
        if np.ndim(x) == 0:
            return psi[0], dpsi[0], tail[0]
        return psi, dpsi, tail

    def normalized(self, x) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """ψ₊/‖ψ₊‖₊, its derivative and ∫ₓ^∞ψ₊² / ‖ψ₊‖²₊."""
        psi, dpsi, tail = self.evaluate(x)
        norm = math.sqrt(self.trace.norm_sq_mantissa)
        return psi / norm, dpsi / norm, tail / self.trace.norm_sq_mantissa


@dataclass(frozen=True, eq=False)
class InitialValueSolution:
    """Forward solution from x = 0 with ∫₀ˣy² carried as a third component."""

    lam: float
    kind: str
    x_end: float
    sol: object

    def evaluate(self, x) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        x_arr = np.asarray(x, dtype=float)
        if np.any(x_arr > self.x_end * (1 + 1e-12)) or np.any(x_arr < 0):
            raise IntegrationRangeError(
                f"{self.kind} solution requested outside [0, {self.x_end}].", x_reached=self.x_end
            )
        values = self.sol(x_arr)
        return values[0], values[1], values[2]

    def table(self, step: float = 0.01) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(x, y, y′) on a uniform grid over [0, x_end]."""
        count = max(int(math.ceil(self.x_end / step)), 1)
        grid = np.linspace(0.0, self.x_end, count + 1)
        y, dy, _ = self.evaluate(grid)
        return grid, y, dy


def series_start(lam: float) -> float:
    """Smallest x where the Weber asymptotic series is accurate to double precision."""
    nu = abs(lam - 1.0) / 2.0
    return 1.5 * nu + 6.0


def _potential_rhs(q: Potential):
    qf = q.pointwise
    if q.is_zero:
        return lambda x: 0.0
    return qf


def shoot(
    q: Potential,
    lam: float,
    config: SolverConfig | None = None,
    x_start: float | None = None,
    x_extent: float = 0.0,
) -> ShootingSolution:
    """Integrate ψ₊(·, λ, q) inward from its asymptotic normalisation down to 0."""
    config = config or SolverConfig()
    x_start = config.x_max_for(lam) if x_start is None else float(x_start)
    turning = math.sqrt(max(lam, 1.0))
    if x_start < turning + 2.0:
        raise InputValidationError(
            f"x_start={x_start} lies inside the turning region of λ={lam} (turning point {turning:.3f})."
        )
    qf = _potential_rhs(q)
    x_far = max(x_start, series_start(lam), x_extent)

    log_scale, value, derivative = weber_asymptotic(lam, x_far)
    tail_ratio = (1.0 + (lam - 2.0) / (2.0 * x_far * x_far)) / (2.0 * x_far)
    size = abs(value) + abs(derivative)
    y = np.array([value / size, derivative / size, tail_ratio * (value / size) ** 2])
    log_scale += math.log(size)
    segments: list[_Segment] = []

    def pair(x, state):
        return (state[1], (x * x + qf(x) - lam) * state[0], -state[0] * state[0])

    def too_large(x, state):
        return config.renorm_high - (abs(state[0]) + abs(state[1]))

    def too_small(x, state):
        return abs(state[0]) + abs(state[1]) - config.renorm_low

    def crossing(x, state):
        return state[0]

    too_large.terminal = True
    too_small.terminal = True

    zeros = 0
    renormalisations = 0
    x = x_far
    first_step = None
    while True:
        solution = solve_ivp(
            pair,
            (x, 0.0),
            y,
            method="DOP853",
            rtol=config.ode_rtol,
            atol=config.ode_atol,
            dense_output=True,
            events=(too_large, too_small, crossing),
            first_step=min(first_step, x) if first_step else None,
        )
        if solution.status == -1:
            raise IntegrationRangeError(
                f"Inward integration for λ={lam} failed: {solution.message}", x_reached=float(solution.t[-1])
            )
        segments.append(_Segment(float(solution.t[-1]), x, solution.sol, log_scale))
        zeros += int(np.sum(solution.t_events[2] > ZERO_EXCLUSION))
        y = solution.y[:, -1].copy()
        if solution.t.size > 1:
            first_step = abs(float(solution.t[-1] - solution.t[-2]))
        x = float(solution.t[-1])
        if solution.status == 0:
            break
        factor = 1.0 / (abs(y[0]) + abs(y[1]))
        y[:2] *= factor
        y[2] *= factor * factor
        log_scale -= math.log(factor)
        renormalisations += 1
        if x <= 0.0:
            break

    logger.debug("ψ₊ for λ=%.6f: %d renormalisations, log-scale %.3f", lam, renormalisations, log_scale)
    trace = BoundaryTrace(
        lam=float(lam),
        psi0=float(y[0]),
        dpsi0=float(y[1]),
        log_scale=float(log_scale),
        norm_sq_mantissa=float(y[2]),
        zeros=zeros,
    )
    return ShootingSolution(trace=trace, x_far=x_far, segments=tuple(reversed(segments)))


def integrate_psi_plus(
    q: Potential,
    lam: float,
    x_start: float | None = None,
    config: SolverConfig | None = None,
) -> BoundaryTrace:
    """Boundary traces, norm and zero count of ψ₊(·, λ, q)."""
    return shoot(q, lam, config, x_start).trace


def x_start_drift(q: Potential, lam: float, config: SolverConfig | None = None) -> float:
    """Relative change of the boundary traces of ψ₊ when x_start is doubled."""
    config = config or SolverConfig()
    x_start = config.x_max_for(lam)
    base = shoot(q, lam, config, x_start, x_extent=x_start).trace
    doubled = shoot(q, lam, config, 2.0 * x_start, x_extent=2.0 * x_start).trace
    scale = math.exp(doubled.log_scale - base.log_scale)
    reference = max(abs(base.psi0), abs(base.dpsi0))
    drift = max(abs(doubled.psi0 * scale - base.psi0), abs(doubled.dpsi0 * scale - base.dpsi0)) / reference
    if drift > 1e-8:
        logger.warning("ψ₊(0, %.6f) moves by %.2e when x_start doubles from %.2f", lam, drift, x_start)
    return drift


def integrate_initial(
    q: Potential,
    lam: float,
    kind: InitialKind | str,
    x_end: float,
    config: SolverConfig | None = None,
    initial: tuple[float, float] | None = None,
) -> InitialValueSolution:
    """Forward solution θ (y(0)=1, y′(0)=0), φ (y(0)=0, y′(0)=1) or custom initial data."""
    config = config or SolverConfig()
    if initial is None:
        if kind == "theta":
            initial = (1.0, 0.0)
        elif kind == "phi":
            initial = (0.0, 1.0)
        else:
            raise InputValidationError(f"Unsupported initial-value solution '{kind}'.")
    if x_end <= 0:
        raise InputValidationError(f"x_end must be positive, got {x_end!r}.")
    qf = _potential_rhs(q)
    cap = config.growth_cap

    def rhs(x, state):
        return (state[1], (x * x + qf(x) - lam) * state[0], state[0] * state[0])

    def overflow(x, state):
        return cap - abs(state[0]) - abs(state[1])

    overflow.terminal = True

    solution = solve_ivp(
        rhs,
        (0.0, float(x_end)),
        (initial[0], initial[1], 0.0),
        method="DOP853",
        rtol=config.ode_rtol,
        atol=config.ode_atol,
        dense_output=True,
        events=(overflow,),
    )
    if solution.status != 0:
        raise IntegrationRangeError(
            f"{kind} solution at λ={lam} exceeded the magnitude cap {cap:.1e} near x={solution.t[-1]:.4f}.",
            x_reached=float(solution.t[-1]),
        )
    return InitialValueSolution(lam=float(lam), kind=str(kind), x_end=float(x_end), sol=solution.sol)


def wronskian_scaled(
    q: Potential,
    lam: float,
    boundary: BoundaryCondition,
    config: SolverConfig | None = None,
) -> ScaledValue:
    trace = integrate_psi_plus(q, lam, config=config)
    return ScaledValue(boundary.wronskian(trace.psi0, trace.dpsi0), trace.log_scale)


def wronskian(
    q: Potential,
    lam: float,
    boundary: BoundaryCondition,
    config: SolverConfig | None = None,
) -> float:
    """w_D = −ψ₊(0, λ, q) or w_N = ψ₊′(0, λ, q) − bψ₊(0, λ, q)."""
    return wronskian_scaled(q, lam, boundary, config).value


def born_first_term(
    q: Potential,
    lam: float,
    config: SolverConfig | None = None,
) -> tuple[float, float]:
    """First-order corrections (ψ₊⁽¹⁾(0), (ψ₊⁽¹⁾)′(0)) in q."""
    config = config or SolverConfig()
    if q.is_zero:
        return 0.0, 0.0
    zero = Potential.zero(q.x_max)
    x_end = min(q.x_max, config.companion_x_max)
    rule = HalfLineRule.build(x_end, config.quad_panel, config.quad_order)
    unperturbed = shoot(zero, lam, config, x_extent=x_end)
    psi, _, _ = unperturbed.evaluate(rule.nodes)
    scale = math.exp(unperturbed.trace.log_scale)
    theta, _, _ = integrate_initial(zero, lam, "theta", x_end, config).evaluate(rule.nodes)
    phi, _, _ = integrate_initial(zero, lam, "phi", x_end, config).evaluate(rule.nodes)
    weight = np.asarray(q.evaluate(rule.nodes)) * psi * scale
    return rule.inner(weight, phi), -rule.inner(weight, theta)


def match_to_psi_plus(
    shooting: ShootingSolution,
    forward: InitialValueSolution,
    x_match: float,
) -> float:
    """Mantissa-scale constant c with forward ≈ c·ψ₊ near x_match (exact at eigenvalues)."""
    y, dy, _ = forward.evaluate(x_match)
    psi, dpsi, _ = shooting.evaluate(x_match)
    return float((y * psi + dy * dpsi) / (psi * psi + dpsi * dpsi))
