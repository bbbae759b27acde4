import math

import numpy as np
import pytest

from classes.errors import IntegrationRangeError, WeberRangeError
from classes.quadrature import HalfLineRule
from classes.specfun import (
    central_binomial_ratio,
    f0_residue,
    hermite_basis,
    hermite_eigenfunction,
    hermite_table,
    second_solution,
    unperturbed_constants,
    weber_asymptotic,
    weber_at_zero,
)


def test_weber_zeros_at_unperturbed_eigenvalues():
    """ψ⁰₊(0) vanishes at 4n+3 and its derivative at 4n+1."""
    for n in range(4):
        value, _ = weber_at_zero(4 * n + 3)
        _, derivative = weber_at_zero(4 * n + 1)
        assert value == pytest.approx(0.0, abs=1e-12)
        assert derivative == pytest.approx(0.0, abs=1e-12)


def test_weber_values_at_five():
    value, derivative = weber_at_zero(5.0)
    assert value == pytest.approx(-1.0, abs=1e-12)
    assert derivative == pytest.approx(0.0, abs=1e-12)


def test_weber_ground_state_is_gaussian():
    # ψ⁰₊(x, 1) = e^{−x²/2}
    value, derivative = weber_at_zero(1.0)
    assert value == pytest.approx(1.0, rel=1e-13)
    assert derivative == pytest.approx(0.0, abs=1e-15)


def test_complex_weber_matches_real_branch():
    lam = 2.3
    real_value, real_derivative = weber_at_zero(lam)
    complex_value, complex_derivative = weber_at_zero(complex(lam, 0.0))
    assert complex_value.real == pytest.approx(real_value, rel=1e-12)
    assert complex_derivative.real == pytest.approx(real_derivative, rel=1e-12)
    assert abs(complex_value.imag) < 1e-14


def test_weber_below_minus_one_uses_reciprocal_gamma():
    value, derivative = weber_at_zero(-3.0)
    expected = 2 ** (-1.0) * math.sqrt(math.pi) / math.gamma(1.5)
    assert value == pytest.approx(expected, rel=1e-12)
    assert derivative < 0


def test_weber_overflow_raises():
    with pytest.raises(WeberRangeError):
        weber_at_zero(1e4)


def test_weber_asymptotic_matches_gaussian():
    log_scale, value, derivative = weber_asymptotic(1.0, 6.0)
    assert math.exp(log_scale) * value == pytest.approx(math.exp(-18.0), rel=1e-12)
    assert math.exp(log_scale) * derivative == pytest.approx(-6.0 * math.exp(-18.0), rel=1e-12)


def test_central_binomial_ratios():
    values = central_binomial_ratio(np.arange(4))
    assert values == pytest.approx([1.0, 0.5, 0.375, 0.3125])
    assert central_binomial_ratio(2) == pytest.approx(3.0 / 8.0)


def test_unperturbed_dirichlet_ground_constants():
    constants = unperturbed_constants(0, "odd")
    assert constants.lambda0 == 3.0
    assert constants.s0 == pytest.approx(-0.346574, abs=1e-6)
    assert constants.kappa == pytest.approx(0.0, abs=1e-12)


def test_unperturbed_neumann_ground_constants():
    constants = unperturbed_constants(0, "even")
    assert constants.lambda0 == 1.0
    assert constants.s0 == pytest.approx(0.0, abs=1e-14)
    assert constants.e_n == 1.0


def test_unperturbed_constants_reject_negative_index():
    with pytest.raises(ValueError):
        unperturbed_constants(-1, "odd")


def test_hermite_values_at_origin():
    value, _ = hermite_eigenfunction(0, 0.0)
    basis_value, _ = hermite_basis(0, 0.0)
    assert value == pytest.approx(0.751126, abs=1e-6)
    assert basis_value == pytest.approx(0.893244, abs=1e-6)


def test_hermite_functions_are_orthonormal_on_the_line():
    rule = HalfLineRule.build(14.0)
    table, _ = hermite_table(6, rule.nodes)
    # half-line gram of the full-line orthonormal set is ½·I for matching parities
    gram = rule.gram(table, table)
    for j in range(7):
        assert gram[j, j] == pytest.approx(0.5, abs=1e-12)
    assert gram[0, 2] == pytest.approx(0.0, abs=1e-12)
    assert gram[1, 3] == pytest.approx(0.0, abs=1e-12)


def test_hermite_derivative_table_matches_finite_difference():
    x = np.array([0.3, 1.1, 2.4])
    step = 1e-6
    _, derivatives = hermite_table(5, x)
    upper, _ = hermite_table(5, x + step)
    lower, _ = hermite_table(5, x - step)
    assert derivatives == pytest.approx((upper - lower) / (2 * step), abs=1e-7)


@pytest.mark.parametrize("n", [0, 1, 4])
def test_second_solution_has_unit_wronskian(n):
    x = np.array([0.5, 1.5, 3.0])
    chi, dchi = second_solution(n, x)
    psi, dpsi = hermite_eigenfunction(n, x)
    assert chi * dpsi - dchi * psi == pytest.approx(np.ones(3), abs=1e-8)


def test_second_solution_beyond_range_raises():
    with pytest.raises(IntegrationRangeError):
        second_solution(0, 30.0, x_max=25.0)


@pytest.mark.parametrize("n", [0, 1, 2, 5])
def test_f0_residue_matches_central_binomial(n):
    assert f0_residue(n) == pytest.approx(2.0 * central_binomial_ratio(n) / math.sqrt(math.pi), rel=1e-6)
