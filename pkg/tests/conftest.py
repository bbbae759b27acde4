"""Shared fixtures: reference potentials, boundaries and a solver configuration."""

from __future__ import annotations

from pathlib import Path

import pytest

from classes.boundary import DirichletBoundary, RobinBoundary
from classes.config import SolverConfig
from classes.potential import Potential

PROJECT_ROOT = Path(__file__).resolve().parent.parent
FIXTURES_DIR = PROJECT_ROOT / "fixtures"


@pytest.fixture
def zero() -> Potential:
    return Potential.zero()


@pytest.fixture
def gaussian() -> Potential:
    """0.3·e^{−x²}, the standard smooth test perturbation."""
    return Potential.gaussian(0.3, 1.0)


@pytest.fixture
def small_gaussian() -> Potential:
    return Potential.gaussian(0.01, 1.0)


@pytest.fixture
def hermite_potential() -> Potential:
    return Potential.from_coeffs([0.1, -0.05, 0.025], x_max=12.0)


@pytest.fixture
def ground_basis() -> Potential:
    """q = ψ̃⁰₀."""
    return Potential.from_coeffs([1.0], x_max=12.0)


@pytest.fixture
def dirichlet() -> DirichletBoundary:
    return DirichletBoundary()


@pytest.fixture
def neumann() -> RobinBoundary:
    return RobinBoundary(0.0)


@pytest.fixture
def solver_config() -> SolverConfig:
    """Looser tolerances than the CLI defaults; enough for the assertions below."""
    return SolverConfig(ode_rtol=1e-10, ode_atol=1e-11, quad_tol=1e-10)


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES_DIR


@pytest.fixture(autouse=True)
def _isolated_environment(monkeypatch: pytest.MonkeyPatch) -> None:
    """Keep OSCISPEC_* settings from the developer's shell out of the tests."""
    import os

    for name in list(os.environ):
        if name.startswith("OSCISPEC_"):
            monkeypatch.delenv(name, raising=False)
