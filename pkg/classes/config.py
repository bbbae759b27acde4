"""Application configuration helpers."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import InputValidationError

DEFAULT_CACHE_DIR = ".cache"
DEFAULT_FIXTURES_DIR = "fixtures"
DEFAULT_FORMAT = "json"
DEFAULT_BOUNDARY = "dirichlet"
DEFAULT_MODES = 8
DEFAULT_ORDER = 12
DEFAULT_TOL = 1e-6
DEFAULT_LOG_LEVEL = "WARNING"
DEFAULT_ODE_RTOL = 1e-11
DEFAULT_ODE_ATOL = 1e-12
DEFAULT_QUAD_TOL = 1e-11
SUPPORTED_FORMATS = ("json", "csv")
DEFAULT_SUITE = "all"
DEFAULT_MAX_ITER = 25


def _env_or_default(name: str, default):
    """Get environment variable value or return default if not set."""
    value = os.getenv(name)
    return value if value is not None else default


def _env_bool(name: str, default: bool) -> bool:
    """Parse environment variable as boolean, with fallback to default."""
    raw = os.getenv(name)
    if raw is None:
        return default
    return raw.strip().lower() in {"1", "true", "yes", "on"}


def _env_int(name: str, default: int | None) -> int | None:
    """Parse environment variable as integer, with fallback to default."""
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        return int(raw)
    except ValueError as exc:
        raise InputValidationError(f"{name} must be an integer, got {raw!r}.") from exc


def _env_float(name: str, default: float) -> float:
    """Parse environment variable as float, with fallback to default."""
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        return float(raw)
    except ValueError as exc:
        raise InputValidationError(f"{name} must be a number, got {raw!r}.") from exc


def _env_float_optional(name: str) -> float | None:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return None
    return _env_float(name, 0.0)


@dataclass(frozen=True)
class SolverConfig:
    """Numerical tolerances and ranges shared by every solver in the package."""

    ode_rtol: float = DEFAULT_ODE_RTOL
    ode_atol: float = DEFAULT_ODE_ATOL
    quad_tol: float = DEFAULT_QUAD_TOL
    root_tol: float = 1e-12
    x_max: float | None = None
    x_max_floor: float = 12.0
    turning_margin: float = 6.0
    decay_tol: float = 1e-10
    lambda_step: float = 1e-5
    bracket_eps: float = 1e-6
    bracket_widenings: int = 3
    grid_step: float = 0.01
    quad_panel: float = 0.25
    quad_order: int = 16
    growth_cap: float = 1e250
    tail_factor: int = 64
    renorm_low: float = 1e-2
    renorm_high: float = 1e2
    companion_x_max: float = 25.0
    max_workers: int = 1

    def __post_init__(self) -> None:
        positive = {
            "ode_rtol": self.ode_rtol,
            "ode_atol": self.ode_atol,
            "quad_tol": self.quad_tol,
            "root_tol": self.root_tol,
            "decay_tol": self.decay_tol,
            "lambda_step": self.lambda_step,
            "bracket_eps": self.bracket_eps,
            "grid_step": self.grid_step,
            "quad_panel": self.quad_panel,
        }
        for name, value in positive.items():
            if not (value > 0 and math.isfinite(value)):
                raise InputValidationError(f"Tolerance '{name}' must be positive, got {value!r}.")
        if self.x_max is not None and self.x_max <= 0:
            raise InputValidationError(f"x_max must be positive, got {self.x_max!r}.")
        if self.tail_factor < 1 or self.quad_order < 2 or self.max_workers < 1:
            raise InputValidationError("tail_factor, quad_order and max_workers must be positive.")

    def x_max_for(self, lambda_max: float) -> float:
        """Integration cutoff beyond the turning point of the largest eigenvalue."""
        if self.x_max is not None:
            return float(self.x_max)
        return max(self.x_max_floor, 2.0 * math.sqrt(max(lambda_max, 1.0)) + self.turning_margin)

    @property
    def cache_fingerprint(self) -> tuple[str, ...]:
        """Tolerances that change solver output, for cache keys."""
        return (
            repr(self.ode_rtol),
            repr(self.ode_atol),
            repr(self.quad_tol),
            repr(self.root_tol),
            repr(self.x_max),
            repr(self.lambda_step),
            repr(self.tail_factor),
        )

    def with_overrides(self, **changes) -> "SolverConfig":
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


@dataclass
class AppConfig:
    """Runtime configuration derived from CLI arguments and environment variables."""

    command: str
    potential_path: Path | None
    boundary_spec: str
    modes: int
    order: int | None
    out_path: Path | None
    output_format: str
    tol: float
    dry_run: bool
    fixtures_dir: Path
    cache_dir: Path
    use_cache: bool
    log_level: str
    solver: SolverConfig = field(default_factory=SolverConfig)
    suite: str = DEFAULT_SUITE
    flow_mode: int = 0
    shift: float = 0.0
    data_path: Path | None = None
    max_iter: int = DEFAULT_MAX_ITER

    @classmethod
    def from_args(cls, args) -> "AppConfig":
        """Create AppConfig from CLI args, falling back to environment variables."""
        fixtures_dir = Path(
            getattr(args, "fixtures", None) or _env_or_default("OSCISPEC_FIXTURES", DEFAULT_FIXTURES_DIR)
        ).expanduser()

        raw_potential = getattr(args, "potential", None)
        potential_path = _resolve_fixture(Path(raw_potential), fixtures_dir) if raw_potential else None

        boundary_spec = (getattr(args, "boundary", None) or DEFAULT_BOUNDARY).strip().lower()

        modes = getattr(args, "modes", None)
        if modes is None:
            modes = _env_int("OSCISPEC_MODES", DEFAULT_MODES)
        order = getattr(args, "order", None)
        if order is None:
            order = _env_int("OSCISPEC_ORDER", None)

        output_format = (
            getattr(args, "format", None) or _env_or_default("OSCISPEC_FORMAT", DEFAULT_FORMAT)
        ).strip().lower()

        tol = getattr(args, "tol", None)
        if tol is None:
            tol = _env_float("OSCISPEC_TOL", DEFAULT_TOL)

        raw_data = getattr(args, "data", None)
        max_iter = getattr(args, "max_iter", None)
        if max_iter is None:
            max_iter = _env_int("OSCISPEC_MAX_ITER", DEFAULT_MAX_ITER)

        out = getattr(args, "out", None)
        out_path = Path(out).expanduser() if out else None

        base_cache_dir = Path(
            getattr(args, "cache_dir", None) or _env_or_default("OSCISPEC_CACHE_DIR", DEFAULT_CACHE_DIR)
        ).expanduser()
        if getattr(args, "no_cache", False):
            use_cache = False
        else:
            use_cache = _env_bool("OSCISPEC_USE_CACHE", True)

        if getattr(args, "verbose", False):
            log_level = "INFO"
        else:
            log_level = _env_or_default("OSCISPEC_LOG_LEVEL", DEFAULT_LOG_LEVEL).strip().upper()

        config = cls(
            command=getattr(args, "command", None) or "forward",
            potential_path=potential_path,
            boundary_spec=boundary_spec,
            modes=modes,
            order=order,
            out_path=out_path,
            output_format=output_format,
            tol=tol,
            dry_run=bool(getattr(args, "dry_run", False)),
            fixtures_dir=fixtures_dir,
            cache_dir=base_cache_dir,
            use_cache=use_cache,
            log_level=log_level,
            solver=_build_solver_config(args),
            suite=(getattr(args, "suite", None) or DEFAULT_SUITE).strip().lower(),
            flow_mode=getattr(args, "n", None) or 0,
            shift=getattr(args, "t", None) or 0.0,
            data_path=_resolve_fixture(Path(raw_data), fixtures_dir) if raw_data else None,
            max_iter=max_iter,
        )
        config.validate()
        return config

    @property
    def series_order(self) -> int:
        """--order for the series commands; invert picks its own default from N."""
        return self.order if self.order is not None else DEFAULT_ORDER

    def validate(self) -> None:
        if self.modes < 1:
            raise InputValidationError(f"--modes must be at least 1, got {self.modes}.")
        if self.order is not None and self.order < 1:
            raise InputValidationError(f"--order must be at least 1, got {self.order}.")
        if not (self.tol > 0 and math.isfinite(self.tol)):
            raise InputValidationError(f"--tol must be positive, got {self.tol!r}.")
        if self.flow_mode < 0:
            raise InputValidationError(f"-n must be non-negative, got {self.flow_mode}.")
        if not math.isfinite(self.shift):
            raise InputValidationError(f"-t must be finite, got {self.shift!r}.")
        if self.max_iter < 0:
            raise InputValidationError(f"--max-iter must be non-negative, got {self.max_iter}.")
        if self.output_format not in SUPPORTED_FORMATS:
            raise InputValidationError(
                f"Unsupported output format '{self.output_format}'. Choose from {', '.join(SUPPORTED_FORMATS)}."
            )


def _resolve_fixture(path: Path, fixtures_dir: Path) -> Path:
    """Look up relative potential paths in the fixtures directory when missing locally."""
    path = path.expanduser()
    if path.exists() or path.is_absolute():
        return path
    candidate = fixtures_dir / path
    return candidate if candidate.exists() else path


def _build_solver_config(args) -> SolverConfig:
    x_max = getattr(args, "xmax", None)
    if x_max is None:
        x_max = _env_float_optional("OSCISPEC_XMAX")
    return SolverConfig(
        ode_rtol=_env_float("OSCISPEC_ODE_RTOL", DEFAULT_ODE_RTOL),
        ode_atol=_env_float("OSCISPEC_ODE_ATOL", DEFAULT_ODE_ATOL),
        quad_tol=_env_float("OSCISPEC_QUAD_TOL", DEFAULT_QUAD_TOL),
        x_max=x_max,
        max_workers=_env_int("OSCISPEC_MAX_WORKERS", 1),
    )
