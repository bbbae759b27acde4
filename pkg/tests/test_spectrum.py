import math
from dataclasses import replace

import numpy as np
import pytest
from scipy.integrate import trapezoid

from classes.boundary import DirichletBoundary, RobinBoundary
from classes.errors import InputValidationError
from classes.quadrature import HalfLineRule
from classes.specfun import unperturbed_constants, weber_at_zero
from classes.spectrum import (
    EigenvalueSolver,
    chi_companion,
    eigenvalues,
    gradient_check,
    gradient_products,
    hadamard_wronskian,
    merged_spectrum,
    normalized_eigenfunction,
    norming_constants,
    solve,
    spectral_pairs,
)


def test_unperturbed_dirichlet_eigenvalues(zero, dirichlet, solver_config):
    assert eigenvalues(zero, dirichlet, 4, solver_config) == pytest.approx([3.0, 7.0, 11.0, 15.0], abs=1e-9)


def test_unperturbed_neumann_eigenvalues(zero, neumann, solver_config):
    assert eigenvalues(zero, neumann, 4, solver_config) == pytest.approx([1.0, 5.0, 9.0, 13.0], abs=1e-9)


def test_worker_pool_gives_the_same_eigenvalues(zero, dirichlet, solver_config):
    pooled = replace(solver_config, max_workers=2)
    assert eigenvalues(zero, dirichlet, 3, pooled) == pytest.approx([3.0, 7.0, 11.0], abs=1e-9)
    lams, _ = spectral_pairs(zero, dirichlet, 2, pooled)
    assert lams == pytest.approx([3.0, 7.0], abs=1e-9)


def test_eigenvalue_count_must_be_positive(zero, dirichlet):
    with pytest.raises(InputValidationError):
        eigenvalues(zero, dirichlet, 0)
    with pytest.raises(InputValidationError):
        solve(zero, dirichlet, 0)


@pytest.mark.parametrize("boundary", [DirichletBoundary(), RobinBoundary(0.0)])
def test_unperturbed_norming_constants(zero, boundary, solver_config):
    data = solve(zero, boundary, 3, solver_config)
    expected = [unperturbed_constants(n, boundary.parity).s0 for n in range(3)]
    assert data.s_values == pytest.approx(expected, abs=1e-8)
    assert data.mus == pytest.approx([0.0, 0.0, 0.0], abs=1e-9)
    assert data.q0_datum == 0.0


def test_norming_constant_records_satisfy_norm_identities(zero, dirichlet, solver_config):
    records = norming_constants(zero, dirichlet, 2, solver_config)
    assert [record.n for record in records] == [0, 1]
    for record in records:
        sign = -1.0 if record.n % 2 else 1.0
        assert sign * record.ws_dot * math.exp(-record.s) == pytest.approx(record.norm_sq_psi_plus, rel=1e-5)
        assert sign * record.ws_dot * math.exp(record.s) == pytest.approx(record.norm_sq_phi, rel=1e-5)


def test_first_order_seed_is_accurate_for_small_potentials(small_gaussian, dirichlet, solver_config):
    solver = EigenvalueSolver(small_gaussian, dirichlet, solver_config)
    lambdas = eigenvalues(small_gaussian, dirichlet, 3, solver_config)
    seeds = np.array([solver.seed(n) for n in range(3)])
    assert np.max(np.abs(lambdas - seeds)) < 1e-4
    assert np.all(lambdas > [3.0, 7.0, 11.0])


def test_robin_constant_shifts_the_ground_state(zero, solver_config):
    """∂λ₀/∂b = ψ₀(0)² = 2/√π at q = 0, b = 0."""
    b = 1e-4
    lam_plus = eigenvalues(zero, RobinBoundary(b), 1, solver_config)[0]
    lam_minus = eigenvalues(zero, RobinBoundary(-b), 1, solver_config)[0]
    assert (lam_plus - lam_minus) / (2 * b) == pytest.approx(2.0 / math.sqrt(math.pi), rel=1e-5)


def test_spectral_pairs_agree_with_full_solve(gaussian, neumann, solver_config):
    lambdas, s = spectral_pairs(gaussian, neumann, 3, solver_config)
    data = solve(gaussian, neumann, 3, solver_config)
    assert lambdas == pytest.approx(data.lambdas, abs=1e-12)
    assert s == pytest.approx(data.s_values, abs=1e-12)


def test_norm_identities_hold_for_each_mode(gaussian, dirichlet, solver_config):
    data = solve(gaussian, dirichlet, 3, solver_config)
    for entry in data.entries:
        sign = -1.0 if entry.n % 2 else 1.0
        assert sign * entry.ws_dot * math.exp(-entry.s) == pytest.approx(entry.norm_sq_psi_plus, rel=1e-6)
        assert sign * entry.ws_dot * math.exp(entry.s) == pytest.approx(entry.norm_sq_phi, rel=1e-6)


@pytest.mark.parametrize("boundary", [DirichletBoundary(), RobinBoundary(0.5)])
def test_normalized_eigenfunction_has_unit_norm(gaussian, boundary, solver_config):
    x, psi, dpsi = normalized_eigenfunction(gaussian, boundary, 1, solver_config, step=0.005)
    assert trapezoid(psi * psi, x) == pytest.approx(1.0, abs=1e-4)
    trace = dpsi[0] if boundary.parity == "odd" else psi[0]
    assert trace > 0
    if boundary.parity == "odd":
        assert psi[0] == pytest.approx(0.0, abs=1e-8)
    else:
        assert dpsi[0] == pytest.approx(0.5 * psi[0], abs=1e-6)


def test_dirichlet_ground_state_slope(zero, dirichlet, solver_config):
    _, _, dpsi = normalized_eigenfunction(zero, dirichlet, 0, solver_config)
    assert dpsi[0] == pytest.approx(2.0 * math.pi**-0.25, rel=1e-7)


def test_companion_has_unit_wronskian(gaussian, dirichlet, solver_config):
    x_end = 6.0
    grid, chi, dchi = chi_companion(gaussian, dirichlet, 0, solver_config, step=0.5, x_end=x_end)
    _, psi, dpsi = normalized_eigenfunction(gaussian, dirichlet, 0, solver_config, step=0.5, x_end=x_end)
    assert chi * dpsi - dchi * psi == pytest.approx(np.ones_like(grid), abs=1e-6)


def test_hadamard_product_is_exact_without_perturbation(dirichlet, neumann):
    lam_star = 4.0
    value, derivative = weber_at_zero(lam_star)
    assert hadamard_wronskian([3.0, 7.0, 11.0], dirichlet, lam_star) == pytest.approx(-value)
    assert hadamard_wronskian([1.0, 5.0, 9.0], neumann, lam_star) == pytest.approx(derivative)


def test_hadamard_product_tracks_eigenvalue_sign_changes(dirichlet):
    # λ* between a perturbed eigenvalue and its unperturbed value flips the sign
    value, _ = weber_at_zero(3.05)
    assert hadamard_wronskian([3.1, 7.0], dirichlet, 3.05) * -value < 0


def test_merged_spectrum_interlaces():
    merged = merged_spectrum([3.1, 7.1, 11.05], [1.02, 5.1, 9.0])
    assert merged.interlaced
    assert merged.values == pytest.approx([1.02, 3.1, 5.1, 7.1, 9.0, 11.05])
    assert not merged_spectrum([3.0, 7.0], [3.5, 5.0]).interlaced


def test_quadrature_gram_matches_dot_products():
    rule = HalfLineRule.build(2.0)
    rows = np.vstack([np.ones_like(rule.nodes), rule.nodes])
    gram = rule.gram(rows, rows)
    assert np.asarray(gram) == pytest.approx(np.array([[2.0, 2.0], [2.0, 8.0 / 3.0]]))


@pytest.mark.slow
@pytest.mark.parametrize("boundary", [DirichletBoundary(), RobinBoundary(0.3)])
def test_gradients_match_finite_differences(gaussian, boundary, solver_config):
    v = gaussian.scaled(1.0 / 0.3)
    for n in range(3):
        for key, comparison in gradient_check(gaussian, boundary, n, v, solver_config).items():
            scale = max(abs(comparison.analytic), 1e-3)
            assert comparison.error / scale < 1e-4, key


@pytest.mark.slow
def test_robin_b_gradient_at_zero_potential(zero, neumann, solver_config):
    result = gradient_check(zero, neumann, 0, zero, solver_config)
    assert result["lambda_b"].analytic == pytest.approx(2.0 / math.sqrt(math.pi), rel=1e-8)
    assert result["lambda_b"].relative_error < 1e-5


@pytest.mark.slow
@pytest.mark.parametrize("boundary", [DirichletBoundary(), RobinBoundary(0.5)])
def test_gradient_product_identities(gaussian, boundary, solver_config):
    products = gradient_products(gaussian, boundary, 3, solver_config)
    assert products.max_defect() < 1e-5


@pytest.mark.parametrize("boundary", [DirichletBoundary(), RobinBoundary(0.5)])
def test_gradient_products_at_zero_potential(zero, boundary, solver_config):
    products = gradient_products(zero, boundary, 1, solver_config)
    for key in ("lam_lam", "s_lam", "lam_s", "s_s"):
        observed = getattr(products, key)
        assert np.max(np.abs(observed - products.expected[key])) < 1e-5, key


def test_robin_product_blocks_are_related_by_parts(zero, solver_config):
    """s_lam[n, m] + lam_s[m, n] is the boundary term −(ψχ)ₙ(0)ψₘ(0)²."""
    products = gradient_products(zero, RobinBoundary(0.5), 1, solver_config)
    expected = products.expected
    boundary_sum = expected["s_lam"] + expected["lam_s"].T
    assert abs(np.linalg.det(boundary_sum)) < 1e-12
    assert products.s_lam + products.lam_s.T == pytest.approx(boundary_sum, abs=1e-5)
