"""Potentials on the half-line: grid samples, Hermite-even expansions and closed forms."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Literal, Tuple

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import InputValidationError
from .quadrature import HalfLineRule, adaptive_integral
from .specfun import hermite_basis, hermite_basis_table

logger = logging.getLogger(__name__)

PotentialKind = Literal["grid", "hermite", "closed_form"]
SUPPORTED_KINDS = ("grid", "hermite", "closed_form")
# Closed-form term names: ("gaussian", amplitude, width) is a·e^{−w x²},
# ("hermite", amplitude, k) is a·ψ̃⁰₂ₖ.
SUPPORTED_TERMS = ("gaussian", "hermite")
DEFAULT_ANALYTIC_X_MAX = 12.0
DEFAULT_DECAY_TOL = 1e-10
BASIS_NORM_SQ = 0.5

Term = Tuple[str, float, float]


@dataclass(frozen=True, eq=False)
class Potential:
    """Immutable real potential q on [0, ∞).

    Grid potentials vanish beyond ``x_max``; Hermite and closed-form potentials keep their
    analytic tail and use ``x_max`` only as the quadrature cutoff.
    """

    kind: PotentialKind
    x_max: float
    samples: np.ndarray | None = None
    h: float | None = None
    coeffs: np.ndarray | None = None
    terms: Tuple[Term, ...] = ()
    metadata: str = ""
    decay_tol: float = field(default=DEFAULT_DECAY_TOL, repr=False)

    def __post_init__(self) -> None:
        if self.kind not in SUPPORTED_KINDS:
            raise InputValidationError(f"Unsupported potential kind '{self.kind}'.")
        if not (self.x_max > 0 and math.isfinite(self.x_max)):
            raise InputValidationError(f"x_max must be positive, got {self.x_max!r}.")
        if self.kind == "grid":
            self._validate_grid()
        elif self.kind == "hermite":
            if self.coeffs is None or self.coeffs.size == 0 or not np.all(np.isfinite(self.coeffs)):
                raise InputValidationError("Hermite potential needs at least one finite coefficient.")
        else:
            for name, amplitude, param in self.terms:
                if name not in SUPPORTED_TERMS:
                    raise InputValidationError(f"Unsupported closed-form term '{name}'.")
                if name == "gaussian" and param <= 0:
                    raise InputValidationError(f"Gaussian width must be positive, got {param!r}.")
                if name == "hermite" and (param < 0 or int(param) != param):
                    raise InputValidationError(f"Hermite term index must be a non-negative integer, got {param!r}.")
                if not math.isfinite(amplitude):
                    raise InputValidationError("Closed-form amplitudes must be finite.")

    def _validate_grid(self) -> None:
        if self.samples is None or self.h is None or self.h <= 0:
            raise InputValidationError("Grid potential needs samples and a positive spacing h.")
        if self.samples.ndim != 1 or self.samples.size < 4:
            raise InputValidationError("Grid potential needs at least 4 samples.")
        if not np.all(np.isfinite(self.samples)):
            raise InputValidationError("Grid samples must be finite.")
        expected = self.h * (self.samples.size - 1)
        if not math.isclose(expected, self.x_max, rel_tol=1e-9, abs_tol=1e-12):
            raise InputValidationError(
                f"Grid spans [0, {expected}] but x_max is {self.x_max}; samples must cover [0, x_max] with spacing h."
            )
        if abs(self.samples[-1]) >= self.decay_tol:
            raise InputValidationError(
                f"Grid potential has |q(x_max)| = {abs(self.samples[-1]):.3e}, above the decay tolerance {self.decay_tol:.1e}."
            )

    # constructors

    @classmethod
    def zero(cls, x_max: float = DEFAULT_ANALYTIC_X_MAX) -> "Potential":
        return cls(kind="closed_form", x_max=x_max, terms=(), metadata="zero")

    @classmethod
    def gaussian(cls, amplitude: float, width: float = 1.0, x_max: float = DEFAULT_ANALYTIC_X_MAX) -> "Potential":
        return cls(
            kind="closed_form",
            x_max=x_max,
            terms=(("gaussian", float(amplitude), float(width)),),
            metadata=f"gaussian({amplitude!r}, {width!r})",
        )

    @classmethod
    def from_samples(cls, samples, h: float, metadata: str = "", decay_tol: float = DEFAULT_DECAY_TOL) -> "Potential":
        array = np.asarray(samples, dtype=float)
        return cls(
            kind="grid",
            x_max=float(h * (array.size - 1)),
            samples=array,
            h=float(h),
            metadata=metadata,
            decay_tol=decay_tol,
        )

    @classmethod
    def from_coeffs(cls, coeffs, x_max: float | None = None, metadata: str = "") -> "Potential":
        array = np.asarray(coeffs, dtype=float)
        if x_max is None:
            # past the turning point of the highest basis function
            x_max = max(DEFAULT_ANALYTIC_X_MAX, math.sqrt(2.0 * max(array.size, 1)) + 8.0)
        return cls(kind="hermite", x_max=float(x_max), coeffs=array, metadata=metadata)

    # evaluation

    @cached_property
    def _spline(self) -> CubicSpline:
        grid = np.linspace(0.0, self.x_max, self.samples.size)
        return CubicSpline(grid, self.samples)

    def evaluate(self, x) -> np.ndarray | float:
        value, _ = self.evaluate_with_derivative(x)
        return value

    def derivative(self, x) -> np.ndarray | float:
        _, slope = self.evaluate_with_derivative(x)
        return slope

    def evaluate_with_derivative(self, x):
        """q(x) and q′(x) for x ≥ 0 (scalar or array)."""
        x_arr = np.asarray(x, dtype=float)
        if np.any(x_arr < 0):
            raise InputValidationError("Potentials are evaluated on x ≥ 0 only.")
        if self.kind == "grid":
            inside = x_arr <= self.x_max
            clipped = np.where(inside, x_arr, self.x_max)
            value = np.where(inside, self._spline(clipped), 0.0)
            slope = np.where(inside, self._spline(clipped, 1), 0.0)
        elif self.kind == "hermite":
            table, table_slope = hermite_basis_table(max(2 * self.coeffs.size - 2, 0), x_arr)
            value = np.tensordot(self.coeffs, table[0::2], axes=(0, 0))
            slope = np.tensordot(self.coeffs, table_slope[0::2], axes=(0, 0))
        else:
            value = np.zeros_like(x_arr)
            slope = np.zeros_like(x_arr)
            for name, amplitude, param in self.terms:
                if name == "gaussian":
                    bump = amplitude * np.exp(-param * x_arr * x_arr)
                    value = value + bump
                    slope = slope - 2.0 * param * x_arr * bump
                else:
                    basis, basis_slope = hermite_basis(2 * int(param), x_arr)
                    value = value + amplitude * basis
                    slope = slope + amplitude * basis_slope
        if np.ndim(x) == 0:
            return float(value), float(slope)
        return value, slope

    def q_at_zero(self) -> float:
        return float(self.evaluate(0.0))

    @cached_property
    def pointwise(self):
        """Fast scalar q(x), used inside ODE right-hand sides."""
        if self.kind == "grid":
            spline, x_max = self._spline, self.x_max
            return lambda x: float(spline(x)) if x <= x_max else 0.0
        if self.kind == "hermite":
            # fine spline of the basis sum; the interpolation error stays near 1e−12
            grid = np.linspace(0.0, self.x_max, int(self.x_max / 0.0025) + 1)
            spline, x_max = CubicSpline(grid, self.evaluate(grid)), self.x_max
            return lambda x: float(spline(x)) if x <= x_max else float(self.evaluate(x))
        gaussians = [(a, w) for name, a, w in self.terms if name == "gaussian"]
        others = [term for term in self.terms if term[0] != "gaussian"]
        if not others:
            return lambda x: sum(a * math.exp(-w * x * x) for a, w in gaussians)
        return lambda x: float(self.evaluate(x))

    @property
    def is_zero(self) -> bool:
        if self.kind == "grid":
            return not np.any(self.samples)
        if self.kind == "hermite":
            return not np.any(self.coeffs)
        return all(amplitude == 0.0 for _, amplitude, _ in self.terms)

    # arithmetic

    def scaled(self, factor: float) -> "Potential":
        """factor·q in the same representation."""
        if self.kind == "grid":
            return Potential.from_samples(factor * self.samples, self.h, self.metadata, self.decay_tol)
        if self.kind == "hermite":
            return Potential.from_coeffs(factor * self.coeffs, self.x_max, self.metadata)
        terms = tuple((name, factor * amplitude, param) for name, amplitude, param in self.terms)
        return Potential(kind="closed_form", x_max=self.x_max, terms=terms, metadata=self.metadata)

    def plus(self, other: "Potential", eps: float = 1.0) -> "Potential":
        """q + eps·v, keeping an exact representation whenever both sides allow one."""
        if self.kind == "grid":
            grid = np.linspace(0.0, self.x_max, self.samples.size)
            samples = self.samples + eps * np.asarray(other.evaluate(grid))
            samples[-1] = self.samples[-1]
            return Potential.from_samples(samples, self.h, self.metadata, self.decay_tol)
        if other.kind == "grid":
            return other.scaled(eps).plus(self)
        if self.kind == "hermite" and other.kind == "hermite":
            size = max(self.coeffs.size, other.coeffs.size)
            total = np.zeros(size)
            total[: self.coeffs.size] += self.coeffs
            total[: other.coeffs.size] += eps * other.coeffs
            return Potential.from_coeffs(total, max(self.x_max, other.x_max), self.metadata)
        terms = self.as_terms() + other.scaled(eps).as_terms()
        return Potential(kind="closed_form", x_max=max(self.x_max, other.x_max), terms=terms, metadata=self.metadata)

    def as_terms(self) -> Tuple[Term, ...]:
        if self.kind == "closed_form":
            return self.terms
        if self.kind == "hermite":
            return tuple(("hermite", float(c), float(k)) for k, c in enumerate(self.coeffs) if c != 0.0)
        raise InputValidationError("Grid potentials have no closed-form terms.")

    # projections and norms

    def quadrature_rule(self, panel: float = 0.25, order: int = 16) -> HalfLineRule:
        return HalfLineRule.build(self.x_max, panel, order)


def hermite_coefficient(q: Potential, k: int, tol: float = 1e-11) -> float:
    """(q, ψ̃⁰₂ₖ)₊ / ‖ψ̃⁰₂ₖ‖²₊ by adaptive quadrature on [0, x_max]."""
    if k < 0:
        raise InputValidationError(f"Hermite index must be non-negative, got {k}.")
    inner = adaptive_integral(
        lambda x: float(q.evaluate(x)) * float(hermite_basis(2 * k, x)[0]),
        0.0,
        q.x_max,
        tol,
    )
    return inner / BASIS_NORM_SQ


def basis_inner_products(q: Potential, count: int, rule: HalfLineRule | None = None) -> np.ndarray:
    """(q, ψ̃⁰ⱼ)₊ for j < count, all parities, by the composite rule."""
    rule = rule or q.quadrature_rule()
    table, _ = hermite_basis_table(count - 1, rule.nodes)
    values = np.asarray(q.evaluate(rule.nodes))
    return (table * (rule.weights * values)[None, :]).sum(axis=1)


def to_hermite(q: Potential, K: int, rule: HalfLineRule | None = None) -> Potential:
    """Project q onto ψ̃⁰₀..ψ̃⁰₂₍ₖ₋₁₎ (even basis on the half-line)."""
    if K < 1:
        raise InputValidationError(f"Hermite order must be at least 1, got {K}.")
    if q.kind == "hermite" and q.coeffs.size <= K:
        padded = np.zeros(K)
        padded[: q.coeffs.size] = q.coeffs
        return Potential.from_coeffs(padded, q.x_max, q.metadata)
    inner = basis_inner_products(q, 2 * K - 1, rule)[0::2]
    logger.debug("Projected %s potential on %d Hermite functions", q.kind, K)
    return Potential.from_coeffs(inner / BASIS_NORM_SQ, q.x_max, f"hermite projection of {q.metadata or q.kind}")


def to_grid(q: Potential, h: float = 0.01, x_max: float | None = None, decay_tol: float = DEFAULT_DECAY_TOL) -> Potential:
    """Sample q on a uniform grid over [0, x_max]."""
    x_max = x_max if x_max is not None else q.x_max
    count = int(round(x_max / h))
    grid = h * np.arange(count + 1)
    samples = np.asarray(q.evaluate(grid), dtype=float)
    return Potential.from_samples(samples, h, q.metadata, decay_tol)


def integral(q: Potential, rule: HalfLineRule | None = None) -> float:
    """∫₊ q."""
    rule = rule or q.quadrature_rule()
    return rule.integrate(np.asarray(q.evaluate(rule.nodes)))


def h_plus_norm(q: Potential, rule: HalfLineRule | None = None) -> float:
    """(∫ |q|² + |q′|² + x²|q|²)^{1/2} on the half-line."""
    rule = rule or q.quadrature_rule()
    value, slope = q.evaluate_with_derivative(rule.nodes)
    x = rule.nodes
    return math.sqrt(rule.integrate(value * value + slope * slope + x * x * value * value))


def l2_distance(left: Potential, right: Potential, a: float = 0.0, b: float = 6.0) -> float:
    """‖left − right‖ in L²[a, b]."""
    rule = HalfLineRule.build(b)
    mask = rule.nodes >= a
    diff = np.asarray(left.evaluate(rule.nodes)) - np.asarray(right.evaluate(rule.nodes))
    return math.sqrt(float(np.dot(rule.weights[mask], diff[mask] ** 2)))
