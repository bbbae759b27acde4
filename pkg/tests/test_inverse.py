import numpy as np
import pytest

from classes.boundary import DirichletBoundary, RobinBoundary
from classes.coords import TailModel, fill_r
from classes.errors import InputValidationError
from classes.inverse import InverseProblem, forward_map, jacobian, linearized_guess, reconstruct
from classes.potential import Potential, l2_distance
from classes.spectrum import SpectralData, SpectralDatum


def _unperturbed(boundary, N):
    entries = [SpectralDatum(n=n, lam=boundary.unperturbed_eigenvalue(n), mu=0.0, s=0.0) for n in range(N)]
    return SpectralData(boundary=boundary, entries=entries, q0_datum=0.0)


def test_target_without_r_values_is_rejected():
    with pytest.raises(InputValidationError, match="r-coordinates"):
        InverseProblem(_unperturbed(DirichletBoundary(), 3))


def test_non_monotone_target_is_rejected():
    data = _unperturbed(RobinBoundary(0.0), 2)
    data.entries[1].mu = -4.5
    data.entries[1].lam = 0.5
    with pytest.raises(InputValidationError, match="increasing"):
        InverseProblem(fill_r(data, TailModel.none("even")))


def test_default_basis_size():
    data = fill_r(_unperturbed(DirichletBoundary(), 3), TailModel.none("odd"))
    assert InverseProblem(data).K == 5
    assert InverseProblem(data, K=2).K == 2
    with pytest.raises(InputValidationError):
        InverseProblem(data, tol=0.0)


@pytest.mark.parametrize("boundary", [DirichletBoundary(), RobinBoundary(0.0)])
def test_unperturbed_target_linearises_to_zero(boundary, solver_config):
    target = forward_map(Potential.zero(), boundary, 3, solver_config)
    problem = InverseProblem(target, config=solver_config)
    guess = linearized_guess(problem)
    expected_size = problem.K + (1 if boundary.parity == "even" else 0)
    assert guess.shape == (expected_size,)
    assert guess == pytest.approx(np.zeros(expected_size), abs=1e-5)


def test_jacobian_shape_includes_b_column_for_robin(zero, solver_config):
    jac = jacobian(zero, RobinBoundary(0.0), 4, 2, solver_config)
    assert jac.d_mu.shape == (2, 5)
    assert jac.d_r.shape == (2, 5)
    assert jac.d_datum.shape == (5,)


@pytest.mark.slow
def test_round_trip_in_the_hermite_basis(solver_config):
    truth = Potential.from_coeffs([0.05, -0.02, 0.01])
    target = forward_map(truth, DirichletBoundary(), 6, solver_config)
    problem = InverseProblem(target, tol=1e-6, config=solver_config)
    result = reconstruct(problem)
    assert result.converged
    assert result.b is None
    assert result.residual_history[-1] < 1e-6
    assert l2_distance(result.q, truth) < 1e-4


@pytest.mark.slow
def test_robin_round_trip_recovers_b(solver_config):
    truth = Potential.from_coeffs([0.04, 0.01])
    target = forward_map(truth, RobinBoundary(0.2), 6, solver_config)
    result = reconstruct(InverseProblem(target, tol=1e-6, polish=False, config=solver_config))
    assert result.converged
    assert result.b == pytest.approx(0.2, abs=1e-4)
    assert l2_distance(result.q, truth) < 1e-3
