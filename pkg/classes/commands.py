"""Command implementations behind the CLI subcommands.

Each ``cmd_*`` takes an AppConfig and returns a process exit code: 0 on success, 1 when a
verification check fails, 2 for invalid input and 3 for numerical failures. Input errors
and numerical errors are raised as exceptions and mapped to their codes by ``main.run_cli``.
"""

from __future__ import annotations

import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, Mapping, Sequence

import numpy as np

from .boundary import BoundaryCondition
from .boundary_factory import create_boundary
from .config import AppConfig
from .darboux import flow
from .errors import InputValidationError
from .hardy import (
    PowerSeries,
    cal_h_norm,
    even_odd_split,
    f_plus,
    g_plus,
    guarded_order,
    hat_sequences,
    operator_A,
    operator_A_inverse,
    split_leading_term,
    tilde_q,
)
from .inverse import InverseProblem, forward_map, reconstruct
from .potential import Potential
from .serialization import (
    csv_text,
    dumps_json,
    format_number,
    load_potential,
    load_spectral,
    potential_to_dict,
    read_json,
    series_from_dict,
    series_to_dict,
    spectral_rows,
    spectral_to_dict,
)
from .spectral_cache import SpectralCache
from .specfun import unperturbed_constants, weber_at_zero
from .utils import ensure_directory
from .verification import SUITES, run_suite

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_NOT_CONVERGED = 3


def _require_potential(config: AppConfig) -> Potential:
    if config.potential_path is None:
        raise InputValidationError(f"The {config.command} command needs --potential FILE.")
    return load_potential(config.potential_path)


def _boundary(config: AppConfig) -> BoundaryCondition:
    return create_boundary(config.boundary_spec)


def _emit(config: AppConfig, payload: Mapping[str, Any], header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """Write JSON or CSV to --out, or print it to stdout."""
    text = dumps_json(payload) if config.output_format == "json" else csv_text(header, rows)
    if config.out_path is None:
        sys.stdout.write(text)
        return
    ensure_directory(config.out_path.parent)
    config.out_path.write_text(text, encoding="utf-8")
    print(f"Done: {config.out_path}")


def _dry_run(config: AppConfig, **inputs: object) -> int:
    described = ", ".join(f"{key}={value}" for key, value in inputs.items())
    logger.info("Dry run for %s: inputs valid (%s)", config.command, described)
    print(f"Dry run: {config.command} inputs are valid.")
    return EXIT_OK


def _cache(config: AppConfig) -> SpectralCache:
    return SpectralCache(config.cache_dir, enabled=config.use_cache)


def cmd_forward(config: AppConfig) -> int:
    """Spectral data (λ, μ, s, r, ẇ, norms) of the first N modes."""
    q = _require_potential(config)
    boundary = _boundary(config)
    if config.dry_run:
        return _dry_run(config, potential=config.potential_path, boundary=boundary.name, N=config.modes)

    N = config.modes
    data = _cache(config).load_or_compute(
        q, boundary, N, config.solver, lambda: forward_map(q, boundary, N, config.solver)
    )
    header, rows = spectral_rows(data)
    _emit(config, spectral_to_dict(data), header, rows)
    return EXIT_OK


def cmd_verify(config: AppConfig) -> int:
    """Run an identity suite; exit 1 if any check fails."""
    q = _require_potential(config)
    boundary = _boundary(config)
    if config.suite not in SUITES:
        raise InputValidationError(f"Unsupported suite '{config.suite}'. Choose from {', '.join(SUITES)}.")
    if config.dry_run:
        return _dry_run(config, potential=config.potential_path, suite=config.suite, N=config.modes)

    cache = _cache(config)

    def cached_forward(potential: Potential, condition: BoundaryCondition, N: int):
        return cache.load_or_compute(
            potential, condition, N, config.solver, lambda: forward_map(potential, condition, N, config.solver)
        )

    report = run_suite(config.suite, q, boundary.b, config.modes, config.series_order, config.solver, cached_forward)
    payload = {
        "suite": report.suite,
        "passed": report.passed,
        "checks": [
            {
                "name": check.name,
                "value": format_number(check.value),
                "tolerance": format_number(check.tolerance),
                "passed": check.passed,
            }
            for check in report.checks
        ],
    }
    _emit(config, payload, ("name", "value", "tolerance", "status"), report.rows())
    if not report.passed:
        print(f"{len(report.failures)} of {len(report.checks)} checks failed.", file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK


def cmd_darboux(config: AppConfig) -> int:
    """Apply one norming-constant flow and write the new potential."""
    q = _require_potential(config)
    boundary = _boundary(config)
    if config.dry_run:
        return _dry_run(config, potential=config.potential_path, n=config.flow_mode, t=config.shift)

    result = flow(q, boundary, config.flow_mode, config.shift, config.solver)
    payload: Dict[str, Any] = potential_to_dict(result.q_new)
    payload["boundary"] = result.boundary.to_dict()
    payload["flow"] = {
        "n": result.n,
        "t": format_number(result.t),
        "eta_min": format_number(result.eta_min),
        "eta_max": format_number(result.eta_max),
    }
    grid = np.linspace(0.0, result.q_new.x_max, int(round(result.q_new.x_max / config.solver.grid_step)) + 1)
    values = np.asarray(result.q_new.evaluate(grid), dtype=float)
    _emit(config, payload, ("x", "q"), zip(grid.tolist(), values.tolist()))
    if result.b_new is not None:
        logger.info("New Robin constant b=%s", format_number(result.b_new))
    return EXIT_OK


def _residual_path(out_path: Path) -> Path:
    return out_path.with_name(f"{out_path.stem}.residuals.csv")


def cmd_invert(config: AppConfig) -> int:
    """Reconstruct q (and b) from a spectral data file."""
    if config.data_path is None:
        raise InputValidationError("The invert command needs --data FILE (spectral data JSON).")
    target = load_spectral(config.data_path)
    problem = InverseProblem(
        target=target,
        K=config.order,
        max_iter=config.max_iter,
        tol=config.tol,
        config=config.solver,
    )
    if config.dry_run:
        return _dry_run(config, data=config.data_path, N=problem.N, K=problem.K)

    result = reconstruct(problem)
    history_rows = [(index, residual) for index, residual in enumerate(result.residual_history)]
    payload: Dict[str, Any] = potential_to_dict(result.q)
    if result.b is not None:
        payload["boundary"] = {"type": "robin", "b": format_number(result.b)}
    payload["converged"] = result.converged
    payload["residual_history"] = [format_number(value) for value in result.residual_history]
    _emit(config, payload, ("iteration", "residual"), history_rows)
    if config.out_path is not None and config.output_format == "json":
        _residual_path(config.out_path).write_text(csv_text(("iteration", "residual"), history_rows), encoding="utf-8")

    if not result.converged:
        print(
            f"Reconstruction did not converge in {config.max_iter} iterations "
            f"(residual {result.residual_history[-1]:.3e}); wrote the best iterate.",
            file=sys.stderr,
        )
        return EXIT_NOT_CONVERGED
    return EXIT_OK


WEBER_COLUMNS = ("n", "parity", "lambda0", "psi0", "dpsi0", "s0", "alpha", "e_n", "kappa_dot", "kappa_dot_prime")


def cmd_weber_table(config: AppConfig) -> int:
    """ψ⁰₊(0, λ⁰), (ψ⁰₊)′(0, λ⁰) and the unperturbed constants for the first N modes of each parity."""
    if config.dry_run:
        return _dry_run(config, N=config.modes)

    rows = []
    for n in range(config.modes):
        for parity in ("even", "odd"):
            constants = unperturbed_constants(n, parity)
            value, derivative = weber_at_zero(constants.lambda0)
            rows.append(
                (
                    n,
                    parity,
                    constants.lambda0,
                    float(value),
                    float(derivative),
                    constants.s0,
                    constants.alpha,
                    constants.e_n,
                    constants.kappa_dot,
                    constants.kappa_dot_prime,
                )
            )
    payload = {
        "modes": [
            {key: (format_number(value) if isinstance(value, float) else value) for key, value in zip(WEBER_COLUMNS, row)}
            for row in rows
        ]
    }
    _emit(config, payload, WEBER_COLUMNS, rows)
    return EXIT_OK


def _potential_transform(q: Potential, boundary: BoundaryCondition, config: AppConfig) -> tuple[dict, list, list]:
    K = config.series_order
    hats = hat_sequences(q, 2 * guarded_order(K), config.solver)
    f = f_plus(q, K)
    g = g_plus(q, K)
    tilde = tilde_q(q, K, boundary.b, config.solver, hats)
    payload = {
        "F": series_to_dict(f),
        "G": series_to_dict(g),
        "q_hat": [format_number(v) for v in hats.q_hat[: 2 * K]],
        "q_check": [format_number(v) for v in hats.q_check[: 2 * K]],
        "tilde_q": {"minus_one": format_number(tilde.minus_one), "values": [format_number(v) for v in tilde.values]},
    }
    header = ["n", "F", "G", "q_hat", "q_check", "tilde_q"]
    rows = [
        [k, f.coeffs[k], g.coeffs[k], hats.q_hat[k], hats.q_check[k], tilde.values[k]]
        for k in range(K)
    ]
    return payload, header, rows


def _series_transform(h: PowerSeries) -> tuple[dict, list, list]:
    order = h.order + (h.order % 2)
    h = h.padded(order)
    norm = cal_h_norm(h)
    split = even_odd_split(h)
    v, remainder = split_leading_term(h)
    a_image = operator_A(norm.f)
    a_inverse = operator_A_inverse(norm.f)
    payload = {
        "norm": format_number(norm.norm),
        "f": series_to_dict(norm.f),
        "f_at_1": format_number(norm.f_at_1),
        "A_f": series_to_dict(a_image),
        "A_inverse_f": series_to_dict(a_inverse),
        "leading": {"v": format_number(v), "remainder": series_to_dict(remainder)},
        "split": {
            "h_n": series_to_dict(split.h_n),
            "h_d": series_to_dict(split.h_d),
            "delta_h": series_to_dict(split.delta_h),
            "f_n": series_to_dict(split.f_n),
            "f_d": series_to_dict(split.f_d),
        },
    }
    header = ["n", "h", "f", "A_f", "A_inverse_f"]
    rows = [[k, h.coeffs[k], norm.f.coeffs[k], a_image.coeffs[k], a_inverse.coeffs[k]] for k in range(order)]
    return payload, header, rows


def cmd_hardy_transform(config: AppConfig) -> int:
    """Generating functions of a potential (--potential) or Hardy-space data of a series (--data)."""
    if config.potential_path is None and config.data_path is None:
        raise InputValidationError("hardy-transform needs --potential FILE or --data SERIES.json.")
    if config.potential_path is not None:
        q = load_potential(config.potential_path)
        boundary = _boundary(config)
        if config.dry_run:
            return _dry_run(config, potential=config.potential_path, K=config.series_order)
        payload, header, rows = _potential_transform(q, boundary, config)
    else:
        h = series_from_dict(read_json(config.data_path))
        if config.dry_run:
            return _dry_run(config, series=config.data_path, order=h.order)
        payload, header, rows = _series_transform(h)
    _emit(config, payload, header, rows)
    return EXIT_OK


COMMANDS: Dict[str, Callable[[AppConfig], int]] = {
    "forward": cmd_forward,
    "verify": cmd_verify,
    "darboux": cmd_darboux,
    "invert": cmd_invert,
    "weber-table": cmd_weber_table,
    "hardy-transform": cmd_hardy_transform,
}


def run_command(config: AppConfig) -> int:
    try:
        command = COMMANDS[config.command]
    except KeyError as exc:
        raise InputValidationError(f"Unsupported command '{config.command}'.") from exc
    return command(config)
