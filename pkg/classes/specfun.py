"""Special functions of the unperturbed half-line oscillator.

Weber (parabolic cylinder) values at the origin, their large-x asymptotic series,
normalised Hermite functions, the second solutions χₙ⁰ and the constants sₙ⁰, αₙ, Eₙ, κ.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.integrate import solve_ivp
from scipy.special import cosdg, digamma, gammaln, rgamma, sindg

from .errors import IntegrationRangeError, WeberRangeError

logger = logging.getLogger(__name__)

Parity = Literal["even", "odd"]

LOG2 = math.log(2.0)
LOG_PI = math.log(math.pi)
SQRT_PI = math.sqrt(math.pi)
# exp() overflows just above this.
_LOG_FLOAT_MAX = 709.0
DEFAULT_CHI_X_MAX = 25.0


@dataclass(frozen=True)
class UnperturbedConstants:
    """Constants of one unperturbed mode, Dirichlet (odd) or Neumann (even)."""

    n: int
    parity: Parity
    lambda0: float
    s0: float
    alpha: float
    e_n: float
    kappa: float
    kappa_prime: float
    kappa_dot: float
    kappa_dot_prime: float


def central_binomial_ratio(n: int | np.ndarray) -> np.ndarray | float:
    """Eₙ = (2n)! / (2^{2n}(n!)²), the Taylor coefficients of 1/√(1−z)."""
    n_arr = np.asarray(n, dtype=float)
    value = np.exp(gammaln(2 * n_arr + 1) - 2 * n_arr * LOG2 - 2 * gammaln(n_arr + 1))
    return float(value) if np.ndim(value) == 0 else value


def weber_at_zero(lam: float | complex) -> tuple[float | complex, float | complex]:
    """Return (ψ⁰₊(0,λ), (ψ⁰₊)′(0,λ)) for ψ⁰₊(x,λ) = D_{(λ−1)/2}(√2 x).

    Real λ uses the trigonometric form with log-Gamma of positive arguments, so the zeros at
    λ = 4n+3 (value) and λ = 4n+1 (derivative) are exact. Complex λ uses the reciprocal
    Gamma form, which is entire.
    """
    if isinstance(lam, complex) or np.iscomplexobj(lam):
        lam_c = complex(lam)
        value = 2 ** ((lam_c - 1) / 4) * SQRT_PI * rgamma((3 - lam_c) / 4)
        derivative = -(2 ** ((lam_c + 3) / 4)) * SQRT_PI * rgamma((1 - lam_c) / 4)
        return complex(value), complex(derivative)

    lam = float(lam)
    if lam > -1.0:
        log_value = (lam - 1) / 4 * LOG2 + gammaln((lam + 1) / 4) - 0.5 * LOG_PI
        log_derivative = (lam + 3) / 4 * LOG2 + gammaln((lam + 3) / 4) - 0.5 * LOG_PI
        _check_range(lam, max(log_value, log_derivative))
        value = float(cosdg(45.0 * (lam - 1))) * math.exp(log_value)
        derivative = float(sindg(45.0 * (lam - 1))) * math.exp(log_derivative)
        return value, derivative

    # Gamma arguments (3−λ)/4 and (1−λ)/4 are positive here.
    _check_range(lam, (lam + 3) / 4 * LOG2 + 0.5 * LOG_PI - gammaln((1 - lam) / 4))
    value = 2 ** ((lam - 1) / 4) * SQRT_PI * float(rgamma((3 - lam) / 4))
    derivative = -(2 ** ((lam + 3) / 4)) * SQRT_PI * float(rgamma((1 - lam) / 4))
    return value, derivative


def _check_range(lam: float, log_magnitude: float) -> None:
    if log_magnitude > _LOG_FLOAT_MAX:
        raise WeberRangeError(f"Weber value at λ={lam!r} overflows (log-magnitude {log_magnitude:.1f}).")


def weber_asymptotic(lam: float, x: float, max_terms: int = 60) -> tuple[float, float, float]:
    """Large-x expansion of ψ⁰₊ as (log_scale, value mantissa, derivative mantissa).

    ψ⁰₊(x) = e^{log_scale}·value and (ψ⁰₊)′(x) = e^{log_scale}·derivative, using
    D_ν(z) ~ z^ν e^{−z²/4} Σ (−1)^k (ν)(ν−1)…(ν−2k+1) / (k! (2z²)^k) with z = √2 x.
    Summation stops at the smallest term.
    """
    nu = (lam - 1.0) / 2.0
    z = math.sqrt(2.0) * x
    z2 = z * z
    term = 1.0
    series = 1.0
    series_dz = 0.0
    for k in range(1, max_terms):
        ratio = -(nu - 2 * k + 2) * (nu - 2 * k + 1) / (2.0 * k * z2)
        new_term = term * ratio
        if abs(new_term) > abs(term):
            break
        term = new_term
        series += term
        series_dz += -2.0 * k * term / z
        if abs(term) < 1e-17 * abs(series):
            break
    log_scale = nu * math.log(z) - z2 / 4.0
    # d/dx = √2 d/dz applied to z^ν e^{−z²/4} S(z)
    derivative = math.sqrt(2.0) * ((nu / z - z / 2.0) * series + series_dz)
    return log_scale, series, derivative


def unperturbed_eigenvalue(n: int, parity: Parity) -> float:
    return float(4 * n + 3) if parity == "odd" else float(4 * n + 1)


def _kappa_dots(lam0: float) -> tuple[float, float]:
    h = 1e-4 * max(1.0, abs(lam0))
    plus_value, plus_derivative = weber_at_zero(lam0 + h)
    minus_value, minus_derivative = weber_at_zero(lam0 - h)
    return (plus_value - minus_value) / (2 * h), (plus_derivative - minus_derivative) / (2 * h)


def unperturbed_constants(n: int, parity: Parity) -> UnperturbedConstants:
    """Closed-form sₙ⁰, αₙ, Eₙ and κ-values for the Dirichlet (odd) or Neumann (even) mode n."""
    if n < 0:
        raise ValueError(f"Mode index must be non-negative, got {n}.")
    lam0 = unperturbed_eigenvalue(n, parity)
    if parity == "odd":
        s0 = 0.5 * LOG_PI - (n + 1.5) * LOG2 - float(gammaln(n + 1.5))
        alpha = -LOG2 / 4 - float(digamma(n + 1.5)) / 4
    elif parity == "even":
        s0 = 0.5 * LOG_PI - n * LOG2 - float(gammaln(n + 0.5))
        alpha = -LOG2 / 4 - float(digamma(n + 0.5)) / 4
    else:
        raise ValueError(f"Unsupported parity '{parity}'.")
    kappa, kappa_prime = weber_at_zero(lam0)
    kappa_dot, kappa_dot_prime = _kappa_dots(lam0)
    return UnperturbedConstants(
        n=n,
        parity=parity,
        lambda0=lam0,
        s0=s0,
        alpha=alpha,
        e_n=central_binomial_ratio(n),
        kappa=kappa,
        kappa_prime=kappa_prime,
        kappa_dot=kappa_dot,
        kappa_dot_prime=kappa_dot_prime,
    )


def f0_residue(n: int) -> float:
    """Residue of ψ⁰₊(0,λ)/(ψ⁰₊)′(0,λ) at λ⁰₂ₙ = 4n+1, from the closed form."""
    lam0 = unperturbed_eigenvalue(n, "even")
    value, _ = weber_at_zero(lam0)
    _, derivative_dot = _kappa_dots(lam0)
    # simple pole: value / (d/dλ derivative)
    return value / derivative_dot


def hermite_eigenfunction(n: int, x: float | np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Normalised Hermite function ψₙ⁰ and its derivative by the three-term recurrence."""
    table_value, table_derivative = hermite_table(n, x)
    return table_value[n], table_derivative[n]


def hermite_table(n_max: int, x: float | np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Rows 0..n_max of ψₖ⁰(x) and (ψₖ⁰)′(x)."""
    x_arr = np.asarray(x, dtype=float)
    values = np.empty((n_max + 1,) + x_arr.shape)
    values[0] = math.pi ** -0.25 * np.exp(-0.5 * x_arr * x_arr)
    if n_max >= 1:
        values[1] = math.sqrt(2.0) * x_arr * values[0]
    for k in range(1, n_max):
        values[k + 1] = math.sqrt(2.0 / (k + 1)) * x_arr * values[k] - math.sqrt(k / (k + 1)) * values[k - 1]
    derivatives = np.empty_like(values)
    derivatives[0] = -x_arr * values[0]
    for k in range(1, n_max + 1):
        derivatives[k] = -x_arr * values[k] + math.sqrt(2.0 * k) * values[k - 1]
    return values, derivatives


def hermite_basis(n: int, x: float | np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """ψ̃ₙ⁰(x) = 2^{1/4}ψₙ⁰(√2x) and its derivative."""
    scaled = math.sqrt(2.0) * np.asarray(x, dtype=float)
    value, derivative = hermite_eigenfunction(n, scaled)
    return 2 ** 0.25 * value, 2 ** 0.25 * math.sqrt(2.0) * derivative


def hermite_basis_table(n_max: int, x: float | np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Rows 0..n_max of ψ̃ₖ⁰(x) and their derivatives."""
    scaled = math.sqrt(2.0) * np.asarray(x, dtype=float)
    values, derivatives = hermite_table(n_max, scaled)
    return 2 ** 0.25 * values, 2 ** 0.25 * math.sqrt(2.0) * derivatives


def second_solution_initial(n: int) -> tuple[float, float]:
    """Initial data (χ(0), χ′(0)) fixed by {χₙ⁰, ψₙ⁰} = 1 and oddness of ψₙ⁰χₙ⁰."""
    value, derivative = hermite_eigenfunction(n, 0.0)
    if n % 2 == 0:
        return 0.0, -1.0 / float(value)
    return 1.0 / float(derivative), 0.0


def second_solution(
    n: int,
    x: float | np.ndarray,
    x_max: float = DEFAULT_CHI_X_MAX,
    rtol: float = 1e-11,
    atol: float = 1e-12,
) -> tuple[np.ndarray, np.ndarray]:
    """χₙ⁰ and its derivative at x ≥ 0 by forward integration from the origin."""
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x_arr < 0):
        raise ValueError("second_solution is defined for x ≥ 0.")
    x_end = float(x_arr.max()) if x_arr.size else 0.0
    if x_end > x_max:
        raise IntegrationRangeError(
            f"χ_{n}⁰ requested at x={x_end} beyond the configured maximum {x_max}.", x_reached=x_max
        )
    lam0 = 2.0 * n + 1.0
    y0 = second_solution_initial(n)
    if x_end == 0.0:
        values = np.full_like(x_arr, y0[0])
        derivatives = np.full_like(x_arr, y0[1])
    else:
        solution = solve_ivp(
            lambda t, y: (y[1], (t * t - lam0) * y[0]),
            (0.0, x_end),
            y0,
            method="DOP853",
            rtol=rtol,
            atol=atol,
            dense_output=True,
        )
        if not solution.success:
            raise IntegrationRangeError(f"χ_{n}⁰ integration failed: {solution.message}", x_reached=solution.t[-1])
        logger.debug("χ_%d⁰ integrated to x=%.2f in %d steps", n, x_end, solution.t.size)
        values, derivatives = solution.sol(x_arr)
    if np.ndim(x) == 0:
        return values[0], derivatives[0]
    return values, derivatives
