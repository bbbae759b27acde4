import math

import pytest

from classes.boundary import DirichletBoundary
from classes.errors import InputValidationError
from classes.potential import Potential
from classes.spectrum import SpectralData, SpectralDatum, solve
from classes.verification import (
    CheckResult,
    VerificationReport,
    hardy_suite,
    norm_identity_checks,
    run_suite,
    trace_suite,
)


def test_check_result_compares_magnitudes():
    assert CheckResult.at_most("negative", -0.5, 1.0).passed
    assert not CheckResult.at_most("large", 2.0, 1.0).passed
    assert not CheckResult.at_most("nan", math.nan, 1.0).passed
    assert CheckResult.flag("ok", True).value == 0.0
    assert not CheckResult.flag("bad", False).passed


def test_report_collects_failures():
    report = VerificationReport("traces")
    report.extend([CheckResult.at_most("a", 0.0, 1.0), CheckResult.at_most("b", 3.0, 1.0)])
    assert not report.passed
    assert [check.name for check in report.failures] == ["b"]
    assert report.rows()[1] == ("b", 3.0, 1.0, "FAIL")
    assert VerificationReport("empty").passed


def test_norm_identities_on_consistent_data():
    s0, s1 = 0.1, -0.3
    entries = [
        SpectralDatum(n=0, lam=3.0, mu=0.0, s=s0, ws_dot=2.0,
                      norm_sq_psi_plus=2.0 * math.exp(-s0), norm_sq_phi=2.0 * math.exp(s0)),
        SpectralDatum(n=1, lam=7.0, mu=0.0, s=s1, ws_dot=-1.5,
                      norm_sq_psi_plus=1.5 * math.exp(-s1), norm_sq_phi=1.5 * math.exp(s1)),
    ]
    checks = norm_identity_checks(SpectralData(DirichletBoundary(), entries, 0.0))
    assert len(checks) == 4
    assert all(check.passed for check in checks)


def test_norm_identities_flag_missing_norms():
    entries = [SpectralDatum(n=0, lam=3.0, mu=0.0, s=0.0)]
    checks = norm_identity_checks(SpectralData(DirichletBoundary(), entries, 0.0))
    assert not any(check.passed for check in checks)


def test_unknown_suite_is_rejected(zero):
    with pytest.raises(InputValidationError, match="Unsupported suite"):
        run_suite("everything", zero, 0.0, 4, 8)


def test_hardy_suite_needs_four_terms(zero, solver_config):
    with pytest.raises(InputValidationError):
        hardy_suite(zero, 3, solver_config)


def test_hardy_identities_for_a_narrow_gaussian(solver_config):
    checks = {check.name: check for check in hardy_suite(Potential.gaussian(0.3, 2.0), 64, solver_config)}
    for name in ("F(1) = ∫q/√(2π)", "F(-1) = q(0)/2^(3/2)", "G from F", "parity split reconstruction"):
        assert checks[name].passed, name


def test_trace_suite_on_zero_potential(zero, solver_config):
    calls = []

    def counting_solver(q, boundary, N):
        calls.append(boundary.name)
        return solve(q, boundary, N, solver_config)

    checks = trace_suite(zero, 0.0, 3, solver_config, counting_solver)
    assert calls == ["dirichlet", "robin"]
    failed = [check.name for check in checks if not check.passed]
    assert failed == []
    # b-recovery needs more modes than this
    assert not any(check.name.startswith("b-recovery") for check in checks)


@pytest.mark.slow
def test_trace_suite_recovers_b(gaussian, solver_config):
    report = run_suite("traces", gaussian, 0.4, 12, 16, solver_config)
    assert report.passed, report.failures


@pytest.mark.slow
def test_darboux_suite_passes(gaussian, solver_config):
    report = run_suite("darboux", gaussian, 0.3, 4, 16, solver_config)
    assert report.passed, report.failures


@pytest.mark.slow
def test_gradient_suite_passes(gaussian, solver_config):
    report = run_suite("gradients", gaussian, 0.3, 3, 16, solver_config)
    assert report.passed, report.failures
