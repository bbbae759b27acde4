"""Boundary-condition strategies for the half-line operator."""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Tuple

from .specfun import Parity, SQRT_PI, central_binomial_ratio, unperturbed_eigenvalue


class BoundaryCondition(ABC):
    """Strategy interface for the condition imposed at x = 0."""

    @property
    @abstractmethod
    def name(self) -> str:
        """Unique identifier (`dirichlet` or `robin`)."""

    @property
    @abstractmethod
    def parity(self) -> Parity:
        """Parity of the unperturbed eigenfunctions on the whole line."""

    @property
    @abstractmethod
    def b(self) -> float:
        """Robin constant; 0 for Dirichlet."""

    @property
    @abstractmethod
    def cache_fingerprint(self) -> Tuple[str, ...]:
        """Immutable tuple describing cache-relevant parameters."""

    @abstractmethod
    def wronskian(self, psi0: float, dpsi0: float) -> float:
        """Wronskian of ψ₊ with the solution satisfying the condition, from the traces at 0."""

    @abstractmethod
    def boundary_trace(self, psi0: float, dpsi0: float) -> float:
        """The trace of ψ₊ whose log-modulus defines the norming constant."""

    @abstractmethod
    def first_order_shift(self, n: int, q_hat: float) -> float:
        """Leading-order eigenvalue shift used to seed the root search."""

    @abstractmethod
    def with_b(self, b: float) -> "BoundaryCondition":
        """Same kind of condition with a new Robin constant."""

    def unperturbed_eigenvalue(self, n: int) -> float:
        return unperturbed_eigenvalue(n, self.parity)

    def full_index(self, n: int) -> int:
        """Index of mode n among the eigenvalues of the even extension."""
        return 2 * n + 1 if self.parity == "odd" else 2 * n

    def eigenfunction_sign(self, psi0: float, dpsi0: float) -> float:
        """Sign making the relevant boundary trace of the eigenfunction positive."""
        return 1.0 if self.boundary_trace(psi0, dpsi0) >= 0 else -1.0

    def to_dict(self) -> dict:
        return {"type": self.name}


@dataclass(frozen=True)
class DirichletBoundary(BoundaryCondition):
    """ψ(0) = 0."""

    @property
    def name(self) -> str:
        return "dirichlet"

    @property
    def parity(self) -> Parity:
        return "odd"

    @property
    def b(self) -> float:
        return 0.0

    @property
    def cache_fingerprint(self) -> Tuple[str, ...]:
        return ("dirichlet",)

    def wronskian(self, psi0: float, dpsi0: float) -> float:
        return -psi0

    def boundary_trace(self, psi0: float, dpsi0: float) -> float:
        return dpsi0

    def first_order_shift(self, n: int, q_hat: float) -> float:
        return 2.0 * q_hat

    def with_b(self, b: float) -> BoundaryCondition:
        if b != 0.0:
            raise ValueError("Dirichlet boundary has no Robin constant.")
        return self


@dataclass(frozen=True)
class RobinBoundary(BoundaryCondition):
    """ψ′(0) = b·ψ(0); b = 0 is the Neumann condition."""

    robin_b: float = 0.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.robin_b):
            raise ValueError(f"Robin constant must be finite, got {self.robin_b!r}.")

    @property
    def name(self) -> str:
        return "robin"

    @property
    def parity(self) -> Parity:
        return "even"

    @property
    def b(self) -> float:
        return self.robin_b

    @property
    def cache_fingerprint(self) -> Tuple[str, ...]:
        return ("robin", repr(float(self.robin_b)))

    def wronskian(self, psi0: float, dpsi0: float) -> float:
        return dpsi0 - self.robin_b * psi0

    def boundary_trace(self, psi0: float, dpsi0: float) -> float:
        return psi0

    def first_order_shift(self, n: int, q_hat: float) -> float:
        return 2.0 * q_hat + 2.0 * central_binomial_ratio(n) * self.robin_b / SQRT_PI

    def with_b(self, b: float) -> BoundaryCondition:
        return RobinBoundary(float(b))

    def to_dict(self) -> dict:
        return {"type": self.name, "b": float(self.robin_b)}
