"""Identity suites: trace formulas, gradients, generating functions and flows."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Sequence

import numpy as np

from .boundary import BoundaryCondition, DirichletBoundary, RobinBoundary
from .config import SolverConfig
from .coords import MIN_RECOVERY_MODES, TailModel, q0_from_tau, recover_b, tau, trace_partial_sums
from .darboux import dirichlet_flow, robin_flow
from .errors import InputValidationError
from .hardy import (
    PowerSeries,
    check_from_generating,
    even_odd_split,
    f_plus,
    g_from_f,
    g_plus,
    hat_from_generating,
    hat_sequences,
    parity_generating_functions,
)
from .potential import Potential, integral
from .spectrum import SpectralData, gradient_check, gradient_products, solve, spectral_pairs

logger = logging.getLogger(__name__)

SUITES = ("traces", "gradients", "hardy", "darboux", "all")

Solver = Callable[[Potential, BoundaryCondition, int], SpectralData]

TRACE_TOL = 1e-2
ROBIN_TRACE_TOL = 2e-2
TAU_TOL = 5e-2
NORM_IDENTITY_TOL = 1e-6
NORM_IDENTITY_MODES = 10
B_RECOVERY_TOL = 5e-2
ZERO_TERM_TOL = 1e-8
GRADIENT_TOL = 1e-4
GRADIENT_FLOOR = 1e-3
GRADIENT_MODES = 5
PRODUCT_TOL = 1e-5
PRODUCT_MODES = 4
HARDY_TOL = 1e-6
HAT_TOL = 1e-7
HAT_MODES = 32
HARDY_ORDER = 64
SPLIT_TOL = 1e-10
DELTA_TOL = 1e-2
FLOW_LAMBDA_TOL = 1e-7
FLOW_S_TOL = 1e-6
FLOW_DATUM_TOL = 1e-8
FLOW_MODE = 1
FLOW_SHIFT = 0.4


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    tolerance: float
    passed: bool

    @classmethod
    def at_most(cls, name: str, value: float, tolerance: float) -> "CheckResult":
        value = float(value)
        return cls(name, value, tolerance, bool(math.isfinite(value) and abs(value) <= tolerance))

    @classmethod
    def flag(cls, name: str, ok: bool) -> "CheckResult":
        return cls(name, 0.0 if ok else 1.0, 0.0, bool(ok))


@dataclass
class VerificationReport:
    suite: str
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> List[CheckResult]:
        return [check for check in self.checks if not check.passed]

    def extend(self, checks: Sequence[CheckResult]) -> None:
        self.checks.extend(checks)

    def rows(self) -> List[tuple]:
        return [(c.name, c.value, c.tolerance, "pass" if c.passed else "FAIL") for c in self.checks]


def _default_solver(config: SolverConfig) -> Solver:
    return lambda q, boundary, N: solve(q, boundary, N, config)


def _relative(observed: float, expected: float) -> float:
    scale = abs(expected)
    return abs(observed - expected) / scale if scale > 0 else abs(observed)


# traces


def norm_identity_checks(data: SpectralData, count: int = NORM_IDENTITY_MODES) -> List[CheckResult]:
    """(−1)ⁿẇe^{−s} = ‖ψ₊‖²₊ and (−1)ⁿẇe^{s} = ‖φ‖²₊ mode by mode."""
    checks = []
    for entry in data.entries[:count]:
        sign = -1.0 if entry.n % 2 else 1.0
        psi_side = sign * entry.ws_dot * math.exp(-entry.s)
        phi_side = sign * entry.ws_dot * math.exp(entry.s)
        label = f"{data.boundary.name}[{entry.n}]"
        checks.append(CheckResult.at_most(f"norm_psi_plus {label}", _relative(psi_side, entry.norm_sq_psi_plus), NORM_IDENTITY_TOL))
        checks.append(CheckResult.at_most(f"norm_phi {label}", _relative(phi_side, entry.norm_sq_phi), NORM_IDENTITY_TOL))
    return checks


def trace_suite(q: Potential, b: float, N: int, config: SolverConfig, solver: Solver | None = None) -> List[CheckResult]:
    solver = solver or _default_solver(config)
    dirichlet = solver(q, DirichletBoundary(), N)
    neumann = solver(q, RobinBoundary(0.0), N)
    robin = neumann if b == 0.0 else solver(q, RobinBoundary(b), N)
    hats = hat_sequences(q, 2 * N, config)

    table = trace_partial_sums(dirichlet, neumann, robin, hats.q_hat)
    checks = [
        CheckResult.at_most("trace dirichlet defect", table.dirichlet[-1], TRACE_TOL),
        CheckResult.at_most("trace neumann defect", table.neumann[-1], TRACE_TOL),
        CheckResult.at_most("trace robin defect", table.robin[-1], ROBIN_TRACE_TOL),
    ]

    factor = config.tail_factor
    tau_estimate = q0_from_tau(
        tau(neumann.mus, dirichlet.mus),
        TailModel.from_potential(q, RobinBoundary(0.0), factor),
        TailModel.from_potential(q, DirichletBoundary(), factor),
    )
    checks.append(CheckResult.at_most("q(0) from tau", tau_estimate - q.q_at_zero(), TAU_TOL))

    for data in (dirichlet, neumann) if b == 0.0 else (dirichlet, neumann, robin):
        checks.extend(norm_identity_checks(data))

    if N >= MIN_RECOVERY_MODES:
        recovery = recover_b(robin, factor)
        if q.is_zero and b == 0.0:
            checks.append(CheckResult.at_most("b-recovery max term", np.max(np.abs(recovery.terms)), ZERO_TERM_TOL))
        else:
            error = recovery.b - b
            if b != 0.0:
                error /= abs(b)
            checks.append(CheckResult.at_most("b-recovery", error, B_RECOVERY_TOL))
    else:
        logger.info("Skipping b-recovery: needs at least %d modes, got %d", MIN_RECOVERY_MODES, N)
    return checks


# gradients


def _directions() -> Dict[str, Potential]:
    return {
        "hermite0": Potential.from_coeffs([1.0]),
        "gaussian2": Potential.gaussian(1.0, 2.0),
    }


def gradient_suite(q: Potential, b: float, N: int, config: SolverConfig) -> List[CheckResult]:
    checks = []
    count = min(N, GRADIENT_MODES)
    for boundary in (DirichletBoundary(), RobinBoundary(b)):
        for n in range(count):
            for label, v in _directions().items():
                for key, comparison in gradient_check(q, boundary, n, v, config).items():
                    if key.endswith("_b") and label != "hermite0":
                        continue
                    scale = max(abs(comparison.analytic), abs(comparison.finite_diff), GRADIENT_FLOOR)
                    name = f"gradient {key} {boundary.name}[{n}] {label}"
                    checks.append(CheckResult.at_most(name, comparison.error / scale, GRADIENT_TOL))
        products = gradient_products(q, boundary, min(N, PRODUCT_MODES) - 1, config)
        checks.append(CheckResult.at_most(f"gradient products {boundary.name}", products.max_defect(), PRODUCT_TOL))
    return checks


# generating functions


def hardy_suite(q: Potential, K: int, config: SolverConfig) -> List[CheckResult]:
    if K < 4:
        raise InputValidationError(f"The generating-function suite needs K ≥ 4, got {K}.")
    # the partial-sum checks need a long series
    K = max(K, HARDY_ORDER)
    rule = q.quadrature_rule(config.quad_panel, config.quad_order)
    f = f_plus(q, K, rule)
    g = g_plus(q, K, rule)
    mass = 0.0 if q.is_zero else integral(q, rule)
    checks = [
        CheckResult.at_most("F(1) = ∫q/√(2π)", f.at_one() - mass / math.sqrt(2.0 * math.pi), HARDY_TOL),
        CheckResult.at_most("F(-1) = q(0)/2^(3/2)", f.evaluate(-1.0) - q.q_at_zero() / 2.0**1.5, HARDY_TOL),
    ]

    half = K // 2
    g_check = g_from_f(f).coeffs[:half] - g.coeffs[:half]
    checks.append(CheckResult.at_most("G from F", np.max(np.abs(g_check)), HARDY_TOL))

    parity = parity_generating_functions(q, K, rule)
    quarter = max(K // 4, 1)
    g_n_defect = parity.g_n.coeffs[:quarter] + 0.5 * math.pi * parity.f_d.coeffs[:quarter]
    g_d_defect = parity.g_d.coeffs[:quarter] + 0.5 * math.pi * parity.f_n.shift_left().coeffs[:quarter]
    checks.append(CheckResult.at_most("G_N = -(pi/2) F_D", np.max(np.abs(g_n_defect)), HARDY_TOL))
    checks.append(CheckResult.at_most("G_D = -(pi/2) S*F_N", np.max(np.abs(g_d_defect)), HARDY_TOL))

    count = min(HAT_MODES, K)
    hats = hat_sequences(q, 2 * K, config)
    hat_defect = hat_from_generating(f)[:count] - hats.q_hat[:count]
    checks.append(CheckResult.at_most("q_hat generating", np.max(np.abs(hat_defect)), HAT_TOL))
    check_defect = check_from_generating(g)[:count] - hats.q_check[:count]
    checks.append(CheckResult.at_most("q_check generating", np.max(np.abs(check_defect)), HARDY_TOL))

    order = 2 * (K // 2)
    h = PowerSeries(hats.q_hat[:order])
    split = even_odd_split(h)
    direct = h.cauchy(PowerSeries.binomial(0.5, -1.0, order), order).coeffs[:order]
    reconstruction = split.reconstruct_f(order).coeffs[:order] - direct
    checks.append(CheckResult.at_most("parity split reconstruction", np.max(np.abs(reconstruction)), SPLIT_TOL))

    checks.append(CheckResult.at_most("Delta H q(1) = q(0)/4", hats.delta().at_one() - q.q_at_zero() / 4.0, DELTA_TOL))
    return checks


# flows


def _flow_checks(
    label: str,
    before: tuple[np.ndarray, np.ndarray],
    after: tuple[np.ndarray, np.ndarray],
    n: int,
    t: float,
    datum_shift: float,
    eta_bounds: tuple[float, float],
) -> List[CheckResult]:
    lam_before, s_before = before
    lam_after, s_after = after
    shift = s_after - s_before
    others = np.delete(shift, n)
    eta_min, eta_max = eta_bounds
    low, high = min(1.0, math.exp(t)), max(1.0, math.exp(t))
    return [
        CheckResult.at_most(f"{label} spectrum drift", np.max(np.abs(lam_after - lam_before)), FLOW_LAMBDA_TOL),
        CheckResult.at_most(f"{label} targeted s shift", shift[n] - t, FLOW_S_TOL),
        CheckResult.at_most(f"{label} other s drift", np.max(np.abs(others)) if others.size else 0.0, FLOW_S_TOL),
        CheckResult.at_most(f"{label} boundary datum", datum_shift, FLOW_DATUM_TOL),
        CheckResult.flag(f"{label} eta bounds", low - 1e-12 <= eta_min and eta_max <= high + 1e-12),
    ]


def darboux_suite(
    q: Potential,
    b: float,
    config: SolverConfig,
    n: int = FLOW_MODE,
    t: float = FLOW_SHIFT,
) -> List[CheckResult]:
    count = n + 3
    checks = []

    boundary = DirichletBoundary()
    before = spectral_pairs(q, boundary, count, config)
    result = dirichlet_flow(q, n, t, config)
    after = spectral_pairs(result.q_new, boundary, count, config)
    datum_shift = result.q_new.q_at_zero() - q.q_at_zero()
    checks.extend(_flow_checks("dirichlet flow", before, after, n, t, datum_shift, (result.eta_min, result.eta_max)))

    boundary = RobinBoundary(b)
    before = spectral_pairs(q, boundary, count, config)
    result = robin_flow(q, b, n, t, config)
    after = spectral_pairs(result.q_new, result.boundary, count, config)
    datum_shift = (result.q_new.q_at_zero() - 2.0 * result.b_new**2) - (q.q_at_zero() - 2.0 * b * b)
    checks.extend(_flow_checks("robin flow", before, after, n, t, datum_shift, (result.eta_min, result.eta_max)))
    return checks


def run_suite(
    suite: str,
    q: Potential,
    b: float,
    N: int,
    K: int,
    config: SolverConfig | None = None,
    solver: Solver | None = None,
) -> VerificationReport:
    """Run one named suite (or all of them) and collect the checks."""
    config = config or SolverConfig()
    if suite not in SUITES:
        raise InputValidationError(f"Unsupported suite '{suite}'. Choose from {', '.join(SUITES)}.")
    report = VerificationReport(suite)
    if suite in ("traces", "all"):
        report.extend(trace_suite(q, b, N, config, solver))
    if suite in ("gradients", "all"):
        report.extend(gradient_suite(q, b, N, config))
    if suite in ("hardy", "all"):
        report.extend(hardy_suite(q, K, config))
    if suite in ("darboux", "all"):
        report.extend(darboux_suite(q, b, config))
    for check in report.failures:
        logger.warning("Check failed: %s = %.3e (tolerance %.1e)", check.name, check.value, check.tolerance)
    logger.info("Suite %s: %d checks, %d failed", suite, len(report.checks), len(report.failures))
    return report
