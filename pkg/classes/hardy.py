"""Power-series machinery on the unit disc.

Truncated Taylor series with Cauchy products, the weighted Hardy norms, the Toeplitz
operator with symbol 1/√(−ζ) and its inverse, the generating functions F⁺q and G⁺q of a
potential, their parity splits, and the linearised coordinates ñqₙ⁺.

Two-sided kernels are applied as finite Toeplitz sections. Inputs computed from a
potential carry a guard band of K extra coefficients beyond the K that are returned,
and the slowly decaying G⁺q coefficients are continued by their fitted alternating
asymptote before the one-sided sums over l ≥ 0.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from numbers import Number

import numpy as np
from scipy.linalg import toeplitz

from .config import SolverConfig
from .errors import InputValidationError
from .potential import Potential, basis_inner_products
from .quadrature import HalfLineRule
from .specfun import SQRT_PI, central_binomial_ratio, hermite_table, second_solution
from .utils import binomial_series

logger = logging.getLogger(__name__)

HARDY_WEIGHT = 0.75
MIN_TAIL_FIT = 8
TAIL_EXTENSION = 64


@dataclass(frozen=True, eq=False)
class PowerSeries:
    """Σ fₙzⁿ truncated at degree K − 1."""

    coeffs: np.ndarray

    def __post_init__(self) -> None:
        array = np.array(self.coeffs, dtype=float).ravel()
        if not np.all(np.isfinite(array)):
            raise InputValidationError("Power series coefficients must be finite.")
        object.__setattr__(self, "coeffs", array)

    @classmethod
    def zeros(cls, order: int) -> "PowerSeries":
        return cls(np.zeros(order))

    @classmethod
    def one(cls, order: int = 1) -> "PowerSeries":
        coeffs = np.zeros(max(order, 1))
        coeffs[0] = 1.0
        return cls(coeffs)

    @classmethod
    def binomial(cls, power: float, sign: float, order: int) -> "PowerSeries":
        """(1 + sign·z)^power."""
        return cls(binomial_series(power, sign, order))

    @property
    def order(self) -> int:
        return self.coeffs.size

    def padded(self, order: int) -> "PowerSeries":
        if order <= self.order:
            return PowerSeries(self.coeffs[:order])
        coeffs = np.zeros(order)
        coeffs[: self.order] = self.coeffs
        return PowerSeries(coeffs)

    def __add__(self, other: "PowerSeries") -> "PowerSeries":
        if not isinstance(other, PowerSeries):
            return NotImplemented
        order = max(self.order, other.order)
        return PowerSeries(self.padded(order).coeffs + other.padded(order).coeffs)

    def __sub__(self, other: "PowerSeries") -> "PowerSeries":
        if not isinstance(other, PowerSeries):
            return NotImplemented
        return self + (-other)

    def __neg__(self) -> "PowerSeries":
        return PowerSeries(-self.coeffs)

    def __mul__(self, other):
        if isinstance(other, Number):
            return self.scale(float(other))
        if isinstance(other, PowerSeries):
            return self.cauchy(other)
        return NotImplemented

    __rmul__ = __mul__

    def scale(self, factor: float) -> "PowerSeries":
        return PowerSeries(factor * self.coeffs)

    def cauchy(self, other: "PowerSeries", order: int | None = None) -> "PowerSeries":
        """Product truncated at this series' order unless another is given."""
        order = order or self.order
        product = np.convolve(self.coeffs, other.coeffs)[:order]
        return PowerSeries(product).padded(order)

    def evaluate(self, z: complex | float) -> complex | float:
        return np.polynomial.polynomial.polyval(z, self.coeffs)

    def at_one(self) -> float:
        return float(np.sum(self.coeffs))

    def shift_left(self) -> "PowerSeries":
        """(f(z) − f(0))/z."""
        return PowerSeries(np.append(self.coeffs[1:], 0.0))

    def even(self) -> "PowerSeries":
        """g with g(z²) the even part of f."""
        return PowerSeries(self.coeffs[0::2])

    def odd(self) -> "PowerSeries":
        """g with z·g(z²) the odd part of f."""
        return PowerSeries(self.coeffs[1::2])

    def dilate(self, order: int | None = None) -> "PowerSeries":
        """f(z²)."""
        coeffs = np.zeros(2 * self.order)
        coeffs[0::2] = self.coeffs
        return PowerSeries(coeffs).padded(order or 2 * self.order)

    def to_dict(self) -> dict:
        return {"coeffs": self.coeffs.tolist()}


@dataclass(frozen=True)
class CalHNorm:
    norm: float
    f: PowerSeries
    f_at_1: float


@dataclass(frozen=True)
class EvenOddSplit:
    h_n: PowerSeries
    h_d: PowerSeries
    delta_h: PowerSeries
    f_n: PowerSeries
    f_d: PowerSeries

    def reconstruct_f(self, order: int) -> PowerSeries:
        """f_D(z²)√(1+z) + Δh(z²)√(1−z)."""
        first = self.f_d.dilate(order).cauchy(PowerSeries.binomial(0.5, 1.0, order))
        second = self.delta_h.dilate(order).cauchy(PowerSeries.binomial(0.5, -1.0, order))
        return first + second


@dataclass(frozen=True)
class HatSequences:
    """q̂ₙ⁺ = (q, (ψₙ⁰)²)₊ and q̌ₙ⁺ = (q, ψₙ⁰χₙ⁰)₊ by full-line index n."""

    q_hat: np.ndarray
    q_check: np.ndarray

    def delta(self) -> PowerSeries:
        """ΔHq: Neumann minus Dirichlet halves of Σq̂ₙ⁺zⁿ."""
        count = self.q_hat.size // 2
        return PowerSeries(self.q_hat[0 : 2 * count : 2] - self.q_hat[1 : 2 * count : 2])


@dataclass(frozen=True)
class ParitySeries:
    f_n: PowerSeries
    f_d: PowerSeries
    g_n: PowerSeries
    g_d: PowerSeries


@dataclass(frozen=True)
class TildeQ:
    """ñqₙ⁺ for n ≥ 0 and the extra coordinate ñq⁺₋₁."""

    minus_one: float
    values: np.ndarray

    def as_array(self) -> np.ndarray:
        """Entries for n = −1, 0, 1, …"""
        return np.concatenate([[self.minus_one], self.values])


def h2r_norm(f: PowerSeries, r: float = HARDY_WEIGHT) -> float:
    """(Σ(1+n)^{2r}fₙ²)^{1/2}."""
    if r < 0:
        raise InputValidationError(f"Weight exponent must be non-negative, got {r}.")
    weights = (1.0 + np.arange(f.order)) ** (2.0 * r)
    return math.sqrt(float(np.sum(weights * f.coeffs * f.coeffs)))


def cal_h_norm(h: PowerSeries) -> CalHNorm:
    """‖h‖ in the space of spectral data: ‖√(1−z)h‖ in H²_{3/4}, with the value f(1)."""
    f = h.cauchy(PowerSeries.binomial(0.5, -1.0, h.order))
    return CalHNorm(norm=h2r_norm(f, HARDY_WEIGHT), f=f, f_at_1=f.at_one())


def _two_sided_kernel(kernel, rows: int, columns: int) -> np.ndarray:
    """Toeplitz section T[n, k] = kernel(n − k) for n < rows, k < columns."""
    return toeplitz(kernel(np.arange(rows, dtype=float)), kernel(-np.arange(columns, dtype=float)))


def _a_kernel(l: np.ndarray) -> np.ndarray:
    return (2.0 / math.pi) / (2.0 * l + 1.0)


def _a_inverse_kernel(l: np.ndarray) -> np.ndarray:
    return -(2.0 / math.pi) / (2.0 * l - 1.0)


def operator_A(f: PowerSeries, order: int | None = None) -> PowerSeries:
    """P₊[f(ζ)/√(−ζ)]: (𝒜f)ₙ = Σₖ aₙ₋ₖfₖ with aₗ = (2/π)/(2l+1).

    Every input coefficient enters; pass ``order`` below ``f.order`` to keep a guard band.
    """
    order = order or f.order
    return PowerSeries(_two_sided_kernel(_a_kernel, order, f.order) @ f.coeffs)


def operator_A_inverse(g: PowerSeries, order: int | None = None) -> PowerSeries:
    """P₊[g(ζ)√(−ζ)] with kernel −(2/π)/(2l−1)."""
    order = order or g.order
    return PowerSeries(_two_sided_kernel(_a_inverse_kernel, order, g.order) @ g.coeffs)


def guarded_order(order: int) -> int:
    """Input length for ``order`` output coefficients: K extra terms."""
    return 2 * order


def alternating_tail(g: PowerSeries, length: int | None = None) -> PowerSeries:
    """g continued to ``length`` by (−1)ᵏ(a/(2k+1) + c/(2k+1)²) fitted on its second half.

    G⁺q is a Toeplitz image of rapidly decaying data under (−1)ˡ/(2l+1), so its
    coefficients follow this form once k is past the support of that data.
    """
    length = length if length is not None else TAIL_EXTENSION * g.order
    if length <= g.order or g.order < MIN_TAIL_FIT:
        return g
    start = g.order // 2
    fitted = np.arange(start, g.order)
    design = _alternating_basis(fitted)
    coefficients, *_ = np.linalg.lstsq(design, g.coeffs[start:], rcond=None)
    tail = _alternating_basis(np.arange(g.order, length)) @ coefficients
    if not np.all(np.isfinite(tail)):
        logger.warning("Alternating tail fit failed; continuing with the truncated series")
        return g
    return PowerSeries(np.concatenate([g.coeffs, tail]))


def _alternating_basis(k: np.ndarray) -> np.ndarray:
    x = 1.0 / (2.0 * k + 1.0)
    sign = np.where(k % 2 == 0, 1.0, -1.0)
    return np.column_stack([sign * x, sign * x * x])


def basis_products(q: Potential, K: int, rule: HalfLineRule | None = None) -> np.ndarray:
    """(q, ψ̃⁰ⱼ)₊ for j ≤ 2K."""
    return basis_inner_products(q, 2 * K + 1, rule)


def f_plus(q: Potential, K: int, rule: HalfLineRule | None = None) -> PowerSeries:
    """(F⁺q)ₖ = (2π)^{−1/4}√Eₖ(q, ψ̃⁰₂ₖ)₊."""
    if q.is_zero:
        return PowerSeries.zeros(K)
    inner = basis_products(q, K, rule)[0 : 2 * K : 2]
    e_k = central_binomial_ratio(np.arange(K))
    return PowerSeries((2.0 * math.pi) ** -0.25 * np.sqrt(e_k) * inner)


def g_plus(q: Potential, K: int, rule: HalfLineRule | None = None) -> PowerSeries:
    """(G⁺q)ₖ = −((2π)^{1/4}/2)(q, ψ̃⁰₂ₖ₊₁)₊/√((2k+1)Eₖ)."""
    if q.is_zero:
        return PowerSeries.zeros(K)
    inner = basis_products(q, K, rule)[1 : 2 * K : 2]
    k = np.arange(K)
    e_k = central_binomial_ratio(k)
    return PowerSeries(-0.5 * (2.0 * math.pi) ** 0.25 * inner / np.sqrt((2 * k + 1) * e_k))


def g_from_f(f: PowerSeries) -> PowerSeries:
    """−(π/2)P₊[F(ζ)/√ζ]: Gₙ = −Σₖ Fₖ(−1)^{n−k}/(2(n−k)+1)."""
    kernel = lambda l: (-1.0) ** np.abs(l) / (2.0 * l + 1.0)  # noqa: E731
    matrix = _two_sided_kernel(kernel, f.order, f.order)
    return PowerSeries(-(matrix @ f.coeffs))


def hat_sequences(q: Potential, N: int, config: SolverConfig | None = None) -> HatSequences:
    """q̂ₙ⁺ and q̌ₙ⁺ for full-line indices n < N by composite quadrature."""
    config = config or SolverConfig()
    if N < 1:
        raise InputValidationError(f"N must be at least 1, got {N}.")
    if q.is_zero:
        return HatSequences(np.zeros(N), np.zeros(N))
    x_end = min(q.x_max, config.companion_x_max)
    rule = HalfLineRule.build(x_end, config.quad_panel, config.quad_order)
    weights = rule.weights * np.asarray(q.evaluate(rule.nodes))
    psi, _ = hermite_table(N - 1, rule.nodes)
    q_hat = (psi * psi) @ weights
    q_check = np.empty(N)
    for n in range(N):
        chi, _ = second_solution(n, rule.nodes, x_max=x_end, rtol=config.ode_rtol, atol=config.ode_atol)
        q_check[n] = np.dot(weights, psi[n] * chi)
    logger.debug("Hat sequences for %d full-line modes on [0, %.2f]", N, x_end)
    return HatSequences(q_hat=q_hat, q_check=q_check)


def hat_from_generating(f: PowerSeries) -> np.ndarray:
    """Coefficients of F(z)/√(1−z), i.e. Σ_{k≤n}E_{n−k}Fₖ."""
    return f.cauchy(PowerSeries(central_binomial_ratio(np.arange(f.order)))).coeffs


def check_from_generating(g: PowerSeries, order: int | None = None) -> np.ndarray:
    """P₊[G(ζ)/√(1−ζ̄)]: Σ_{l≥0}E_l G_{n+l}, with G continued by its alternating tail."""
    order = order or g.order
    extended = alternating_tail(g)
    e_l = central_binomial_ratio(np.arange(extended.order))
    return np.array([np.dot(e_l[: extended.order - n], extended.coeffs[n:]) for n in range(order)])


def parity_generating_functions(q: Potential, K: int, rule: HalfLineRule | None = None) -> ParitySeries:
    """F_N, F_D from F⁺q·√(1+z) and G_N, G_D from the matching G⁺q combinations."""
    f = f_plus(q, K, rule)
    g = g_plus(q, guarded_order(K), rule)
    return ParitySeries(*_split_f(f), *_split_g(g, K // 2))


def _split_f(f: PowerSeries) -> tuple[PowerSeries, PowerSeries]:
    product = f.cauchy(PowerSeries.binomial(0.5, 1.0, f.order))
    return product.even(), product.odd()


def _split_g(g: PowerSeries, half: int) -> tuple[PowerSeries, PowerSeries]:
    """Even and odd parts of P₊[G(ζ)√(1+ζ̄)] for the first ``half`` coefficients."""
    g = alternating_tail(g)
    weights = binomial_series(0.5, 1.0, g.order)

    def combine(offset: int) -> np.ndarray:
        out = np.empty(half)
        for m in range(half):
            tail = g.coeffs[2 * m + offset :]
            out[m] = np.dot(weights[: tail.size], tail)
        return out

    return PowerSeries(combine(0)), PowerSeries(combine(1))


def even_odd_split(h: PowerSeries) -> EvenOddSplit:
    """h_N, h_D, Δh = h_N − h_D and f_N, f_D of f = √(1−z)h."""
    if h.order % 2:
        raise InputValidationError(f"Parity split needs an even order, got {h.order}.")
    f = cal_h_norm(h).f
    f_n, f_d = _split_f(f)
    h_n, h_d = h.even(), h.odd()
    return EvenOddSplit(h_n=h_n, h_d=h_d, delta_h=h_n - h_d, f_n=f_n, f_d=f_d)


def tilde_q(
    q: Potential,
    K: int,
    b: float = 0.0,
    config: SolverConfig | None = None,
    hats: HatSequences | None = None,
) -> TildeQ:
    """ñqₙ⁺ = (π/2)·𝒜(ΔHq − ΔHq(1))ₙ and ñq⁺₋₁ = −ΣE_{k+1}ñqₖ⁺ − √π·b/2."""
    if K < 1:
        raise InputValidationError(f"K must be at least 1, got {K}.")
    if q.is_zero and b == 0.0:
        return TildeQ(0.0, np.zeros(K))
    hats = hats or hat_sequences(q, 2 * guarded_order(K), config)
    delta = hats.delta()
    delta = delta.padded(max(delta.order, K))
    # ΔHq(1) = q(0)/4 exactly
    centred = delta - PowerSeries.one(delta.order).scale(q.q_at_zero() / 4.0)
    values = 0.5 * math.pi * operator_A(centred, order=K).coeffs
    e_next = central_binomial_ratio(np.arange(1, K + 1))
    minus_one = -float(np.dot(e_next, values)) - SQRT_PI * b / 2.0
    return TildeQ(minus_one=minus_one, values=values)


def split_leading_term(h: PowerSeries) -> tuple[float, PowerSeries]:
    """hₙ = v/√(2n+1) + hₙ⁽⁰⁾ with v = (π/2)^{−1/2}·f(1), f = √(1−z)h."""
    v = cal_h_norm(h).f_at_1 / math.sqrt(0.5 * math.pi)
    leading = v / np.sqrt(2.0 * np.arange(h.order) + 1.0)
    return v, PowerSeries(h.coeffs - leading)
