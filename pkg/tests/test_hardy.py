import math

import numpy as np
import pytest

from classes.errors import InputValidationError
from classes.hardy import (
    PowerSeries,
    alternating_tail,
    cal_h_norm,
    check_from_generating,
    even_odd_split,
    f_plus,
    g_from_f,
    g_plus,
    h2r_norm,
    hat_from_generating,
    hat_sequences,
    operator_A,
    operator_A_inverse,
    parity_generating_functions,
    split_leading_term,
    tilde_q,
)
from classes.potential import Potential
from classes.specfun import central_binomial_ratio


@pytest.fixture
def narrow() -> Potential:
    """0.3·e^{−2x²}, which has infinitely many nonzero Hermite coefficients."""
    return Potential.gaussian(0.3, 2.0)


def test_binomial_series_products_cancel():
    order = 12
    product = PowerSeries.binomial(0.5, -1.0, order) * PowerSeries.binomial(-0.5, -1.0, order)
    assert product.coeffs == pytest.approx(PowerSeries.one(order).coeffs, abs=1e-15)


def test_series_arithmetic():
    f = PowerSeries([1.0, 2.0, 3.0])
    g = PowerSeries([0.5, -1.0])
    assert (f + g).coeffs == pytest.approx([1.5, 1.0, 3.0])
    assert (f - g).coeffs == pytest.approx([0.5, 3.0, 3.0])
    assert (2.0 * f).coeffs == pytest.approx([2.0, 4.0, 6.0])
    assert f.at_one() == 6.0
    assert f.evaluate(-1.0) == pytest.approx(2.0)
    assert f.shift_left().coeffs == pytest.approx([2.0, 3.0, 0.0])
    assert f.even().coeffs == pytest.approx([1.0, 3.0])
    assert f.odd().coeffs == pytest.approx([2.0])
    assert f.even().dilate(3).coeffs == pytest.approx([1.0, 0.0, 3.0])


def test_series_rejects_non_finite_coefficients():
    with pytest.raises(InputValidationError):
        PowerSeries([1.0, math.nan])


def test_weighted_norm():
    f = PowerSeries([1.0, 1.0])
    assert h2r_norm(f, 0.0) == pytest.approx(math.sqrt(2.0))
    assert h2r_norm(f, 0.5) == pytest.approx(math.sqrt(3.0))
    with pytest.raises(InputValidationError):
        h2r_norm(f, -1.0)


def test_norm_of_inverse_square_root_series():
    """h = 1/√(1−z) has f = √(1−z)h = 1."""
    h = PowerSeries(central_binomial_ratio(np.arange(16)))
    norm = cal_h_norm(h)
    assert norm.f.coeffs == pytest.approx(PowerSeries.one(16).coeffs, abs=1e-14)
    assert norm.norm == pytest.approx(1.0)
    assert norm.f_at_1 == pytest.approx(1.0)


def test_leading_term_split():
    h = PowerSeries(central_binomial_ratio(np.arange(8)))
    v, remainder = split_leading_term(h)
    assert v == pytest.approx(math.sqrt(2.0 / math.pi))
    assert remainder.coeffs[0] == pytest.approx(1.0 - v)


def test_operator_A_on_constant_series():
    image = operator_A(PowerSeries.one(6))
    expected = (2.0 / math.pi) / (2.0 * np.arange(6) + 1.0)
    assert image.coeffs == pytest.approx(expected)


def test_operator_A_inverse_on_constant_series():
    image = operator_A_inverse(PowerSeries.one(4))
    expected = -(2.0 / math.pi) / (2.0 * np.arange(4) - 1.0)
    assert image.coeffs == pytest.approx(expected)


def test_generating_function_of_ground_basis(ground_basis):
    f = f_plus(ground_basis, 8)
    assert f.coeffs[0] == pytest.approx(0.5 * (2.0 * math.pi) ** -0.25, rel=1e-10)
    assert f.coeffs[1:] == pytest.approx(np.zeros(7), abs=1e-12)


def test_generating_functions_of_zero_potential(zero):
    assert f_plus(zero, 5).coeffs == pytest.approx(np.zeros(5))
    assert g_plus(zero, 5).coeffs == pytest.approx(np.zeros(5))
    hats = hat_sequences(zero, 4)
    assert hats.q_hat == pytest.approx(np.zeros(4))
    assert tilde_q(zero, 4).values == pytest.approx(np.zeros(4))


def test_boundary_values_of_F(narrow):
    f = f_plus(narrow, 64)
    mass = 0.3 * math.sqrt(0.5 * math.pi) / 2.0
    assert f.at_one() == pytest.approx(mass / math.sqrt(2.0 * math.pi), abs=1e-6)
    assert f.evaluate(-1.0) == pytest.approx(0.3 / 2.0**1.5, abs=1e-6)


def test_G_from_F(narrow):
    f = f_plus(narrow, 64)
    g = g_plus(narrow, 64)
    assert g_from_f(f).coeffs[:32] == pytest.approx(g.coeffs[:32], abs=1e-6)


def test_parity_identities(narrow):
    parity = parity_generating_functions(narrow, 64)
    assert parity.g_n.coeffs[:16] == pytest.approx(-0.5 * math.pi * parity.f_d.coeffs[:16], abs=1e-6)
    assert parity.g_d.coeffs[:16] == pytest.approx(
        -0.5 * math.pi * parity.f_n.shift_left().coeffs[:16], abs=1e-6
    )


def test_hat_sequences_from_generating_functions(narrow, solver_config):
    K = 32
    hats = hat_sequences(narrow, 2 * K, solver_config)
    assert hat_from_generating(f_plus(narrow, K)) == pytest.approx(hats.q_hat[:K], abs=1e-7)
    assert check_from_generating(g_plus(narrow, 64))[:16] == pytest.approx(hats.q_check[:16], abs=1e-6)


def test_ground_basis_hat_value(ground_basis, solver_config):
    hats = hat_sequences(ground_basis, 2, solver_config)
    assert hats.q_hat[0] == pytest.approx(2**-1.25 * math.pi**-0.25, rel=1e-10)


@pytest.mark.slow
def test_delta_at_one_is_quarter_of_q0(narrow, solver_config):
    hats = hat_sequences(narrow, 128, solver_config)
    assert hats.delta().at_one() == pytest.approx(narrow.q_at_zero() / 4.0, abs=2e-2)


def test_parity_split_reconstructs_f():
    rng = np.random.default_rng(3)
    h = PowerSeries(rng.standard_normal(20) / (1.0 + np.arange(20)))
    split = even_odd_split(h)
    assert split.delta_h.coeffs == pytest.approx(split.h_n.coeffs - split.h_d.coeffs)
    direct = cal_h_norm(h).f
    assert split.reconstruct_f(20).coeffs == pytest.approx(direct.coeffs, abs=1e-12)
    with pytest.raises(InputValidationError):
        even_odd_split(PowerSeries(np.ones(5)))


def test_tilde_q_extra_coordinate_carries_b(zero):
    coordinates = tilde_q(zero, 4, b=1.0)
    assert coordinates.minus_one == pytest.approx(-math.sqrt(math.pi) / 2.0)
    assert coordinates.as_array()[0] == coordinates.minus_one
    assert coordinates.as_array().size == 5


def test_tilde_q_order_must_be_positive(gaussian):
    with pytest.raises(InputValidationError):
        tilde_q(gaussian, 0)


def test_hermite_term_in_generating_function():
    q = Potential(kind="closed_form", x_max=12.0, terms=(("hermite", 1.0, 3.0),))
    f = f_plus(q, 6)
    expected = (2.0 * math.pi) ** -0.25 * math.sqrt(central_binomial_ratio(3)) * 0.5
    assert f.coeffs[3] == pytest.approx(expected, abs=1e-10)


def test_alternating_tail_continues_its_model():
    k = np.arange(200)
    x = 1.0 / (2.0 * k + 1.0)
    model = np.where(k % 2 == 0, 1.0, -1.0) * (0.3 * x - 0.1 * x * x)
    extended = alternating_tail(PowerSeries(model[:32]), 200)
    assert extended.order == 200
    assert extended.coeffs == pytest.approx(model, abs=1e-12)


def test_short_series_get_no_tail():
    g = PowerSeries([1.0, -0.5, 0.25])
    assert alternating_tail(g).coeffs == pytest.approx(g.coeffs)


def test_operator_A_keeps_guard_coefficients():
    f = PowerSeries(0.5 ** np.arange(8))
    guarded = operator_A(f, order=4)
    assert guarded.coeffs == pytest.approx(operator_A(f).coeffs[:4])
    truncated = operator_A(f.padded(4))
    assert not np.allclose(guarded.coeffs, truncated.coeffs)


def test_parity_identities_at_moderate_order(narrow):
    parity = parity_generating_functions(narrow, 32)
    assert parity.g_n.coeffs[:8] == pytest.approx(-0.5 * math.pi * parity.f_d.coeffs[:8], abs=1e-6)
