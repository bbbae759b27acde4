import math

import numpy as np
import pytest

from classes.boundary import DirichletBoundary, RobinBoundary
from classes.errors import InputValidationError, IntegrationRangeError, QuadratureError
from classes.quadrature import HalfLineRule, adaptive_inner, adaptive_integral
from classes.solutions import (
    ScaledValue,
    born_first_term,
    integrate_initial,
    integrate_psi_plus,
    shoot,
    wronskian,
    x_start_drift,
)


def test_half_line_rule_integrates_gaussian():
    rule = HalfLineRule.build(10.0)
    assert rule.integrate(np.exp(-rule.nodes**2)) == pytest.approx(math.sqrt(math.pi) / 2.0, rel=1e-13)


def test_adaptive_inner_product():
    assert adaptive_inner(math.cos, math.sin, 0.0, math.pi / 2, 1e-12) == pytest.approx(0.5, abs=1e-12)


def test_adaptive_integral_reports_failure():
    with pytest.raises(QuadratureError):
        adaptive_integral(lambda x: math.sin(1.0 / x) / x, 1e-12, 1.0, 1e-14, limit=5)


def test_scaled_value_saturates_instead_of_overflowing():
    assert ScaledValue(2.0, 800.0).value == math.inf
    assert ScaledValue(-3.0, 1.0).value == pytest.approx(-3.0 * math.e)
    assert ScaledValue(0.0, 1e6).value == 0.0


def test_unperturbed_traces_match_weber_values(zero, solver_config):
    trace = integrate_psi_plus(zero, 5.0, config=solver_config)
    assert trace.psi0_value == pytest.approx(-1.0, rel=1e-8)
    assert trace.dpsi0_value == pytest.approx(0.0, abs=1e-8)


def test_unperturbed_norm_of_ground_state(zero, solver_config):
    # ψ₊(x, 1) = e^{−x²/2}
    trace = integrate_psi_plus(zero, 1.0, config=solver_config)
    assert trace.norm_sq == pytest.approx(math.sqrt(math.pi) / 2.0, rel=1e-8)
    assert trace.zeros == 0


def test_zero_count_follows_the_mode_index(zero, solver_config):
    assert integrate_psi_plus(zero, 5.0, config=solver_config).zeros == 1
    assert integrate_psi_plus(zero, 13.0, config=solver_config).zeros == 3


def test_wronskians_vanish_at_unperturbed_eigenvalues(zero, solver_config):
    assert wronskian(zero, 3.0, DirichletBoundary(), solver_config) == pytest.approx(0.0, abs=1e-9)
    assert wronskian(zero, 5.0, RobinBoundary(0.0), solver_config) == pytest.approx(0.0, abs=1e-9)
    assert wronskian(zero, 5.0, DirichletBoundary(), solver_config) == pytest.approx(1.0, rel=1e-8)


def test_shooting_start_inside_turning_region_is_rejected(zero):
    with pytest.raises(InputValidationError, match="turning region"):
        shoot(zero, 50.0, x_start=5.0)


def test_shooting_solution_satisfies_the_equation(gaussian, solver_config):
    lam = 4.2
    solution = shoot(gaussian, lam, solver_config)
    x = np.linspace(0.5, 4.0, 8)
    step = 1e-4
    psi, dpsi, _ = solution.evaluate(x)
    _, upper, _ = solution.evaluate(x + step)
    _, lower, _ = solution.evaluate(x - step)
    second = (upper - lower) / (2 * step)
    residual = second - (x**2 + gaussian.evaluate(x) - lam) * psi
    assert np.max(np.abs(residual)) < 1e-5 * np.max(np.abs(psi))
    assert dpsi.shape == x.shape


def test_far_start_does_not_move_the_traces(gaussian, solver_config):
    assert x_start_drift(gaussian, 7.5, solver_config) < 1e-7


def test_initial_value_solution_range(zero, solver_config):
    theta = integrate_initial(zero, 1.0, "theta", 3.0, solver_config)
    value, slope, _ = theta.evaluate(0.0)
    assert (value, slope) == (pytest.approx(1.0), pytest.approx(0.0))
    with pytest.raises(IntegrationRangeError):
        theta.evaluate(3.5)
    with pytest.raises(InputValidationError):
        integrate_initial(zero, 1.0, "chi", 3.0, solver_config)


def test_born_term_vanishes_for_zero_potential(zero):
    assert born_first_term(zero, 3.0) == (0.0, 0.0)


def test_born_term_predicts_small_perturbations(small_gaussian, zero, solver_config):
    lam = 4.0
    base = integrate_psi_plus(zero, lam, config=solver_config)
    perturbed = integrate_psi_plus(small_gaussian, lam, config=solver_config)
    first_value, first_slope = born_first_term(small_gaussian, lam, solver_config)
    value_change = perturbed.psi0_value - base.psi0_value
    slope_change = perturbed.dpsi0_value - base.dpsi0_value
    # second-order remainder is O(0.01²)
    assert value_change == pytest.approx(first_value, abs=5e-4)
    assert slope_change == pytest.approx(first_slope, abs=5e-4)


def test_boundary_mantissas_stay_in_the_renormalisation_window(zero, solver_config):
    solution = shoot(zero, 41.0, solver_config)
    trace = solution.trace
    size = abs(trace.psi0) + abs(trace.dpsi0)
    assert solver_config.renorm_low <= size <= solver_config.renorm_high
    assert len(solution.segments) > 1
    # λ = 41 is an even unperturbed eigenvalue, so ψ₊′(0) vanishes
    assert abs(trace.dpsi0) < 1e-6 * abs(trace.psi0)
