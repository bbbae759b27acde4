"""Factory helpers to instantiate boundary conditions from specs."""

from __future__ import annotations

from typing import Mapping

from .boundary import BoundaryCondition, DirichletBoundary, RobinBoundary
from .errors import InputValidationError


def create_boundary(spec: str) -> BoundaryCondition:
    """Build a BoundaryCondition from `dirichlet`, `neumann`, `robin` or `robin:B`."""
    text = (spec or "").strip().lower()
    kind, _, raw_b = text.partition(":")

    if kind == "dirichlet" and not raw_b:
        return DirichletBoundary()

    if kind == "neumann" and not raw_b:
        return RobinBoundary(0.0)

    if kind == "robin":
        if not raw_b:
            return RobinBoundary(0.0)
        try:
            return RobinBoundary(float(raw_b))
        except ValueError as exc:
            raise InputValidationError(f"Unsupported boundary spec '{spec}': {exc}") from exc

    raise InputValidationError(f"Unsupported boundary spec '{spec}'. Use dirichlet, neumann or robin:B.")


def boundary_from_dict(payload: Mapping) -> BoundaryCondition:
    """Inverse of ``BoundaryCondition.to_dict``."""
    if not isinstance(payload, Mapping):
        raise InputValidationError(f"Boundary must be a JSON object, got {payload!r}.")
    kind = str(payload.get("type", "")).lower()
    if kind == "dirichlet":
        return DirichletBoundary()
    if kind == "robin":
        try:
            return RobinBoundary(float(payload.get("b", 0.0)))
        except (TypeError, ValueError) as exc:
            raise InputValidationError(f"Invalid Robin constant in {dict(payload)!r}.") from exc
    raise InputValidationError(f"Unsupported boundary configuration type: {kind!r}")
