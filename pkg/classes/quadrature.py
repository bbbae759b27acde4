"""Quadrature rules on the half-line."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.special import roots_legendre

from .errors import QuadratureError


def adaptive_integral(
    func: Callable[[float], float],
    a: float,
    b: float,
    tol: float,
    limit: int = 400,
) -> float:
    """Gauss–Kronrod adaptive integral of ``func`` over [a, b]; raise when it does not converge."""
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            value, _ = quad(func, a, b, epsabs=tol, epsrel=tol, limit=limit)
        except IntegrationWarning as exc:
            raise QuadratureError(f"Quadrature on [{a}, {b}] did not reach tolerance {tol}: {exc}") from exc
    return float(value)


def adaptive_inner(
    f: Callable[[float], float],
    g: Callable[[float], float],
    a: float,
    b: float,
    tol: float,
) -> float:
    """(f, g) on [a, b] by adaptive quadrature."""
    return adaptive_integral(lambda x: f(x) * g(x), a, b, tol)


@lru_cache(maxsize=8)
def _legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = roots_legendre(order)
    return nodes, weights


@dataclass(frozen=True, eq=False)
class HalfLineRule:
    """Composite Gauss–Legendre rule on [0, x_max].

    Tabulated functions (shooting solutions, Hermite basis tables) are sampled on
    ``nodes`` and integrated by a dot product with ``weights``.
    """

    x_max: float
    nodes: np.ndarray
    weights: np.ndarray

    @classmethod
    def build(cls, x_max: float, panel: float = 0.25, order: int = 16) -> "HalfLineRule":
        panels = max(1, int(np.ceil(x_max / panel)))
        edges = np.linspace(0.0, x_max, panels + 1)
        base_nodes, base_weights = _legendre(order)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[1:] + edges[:-1])
        nodes = (mid[:, None] + half[:, None] * base_nodes[None, :]).ravel()
        weights = (half[:, None] * base_weights[None, :]).ravel()
        return cls(x_max=float(x_max), nodes=nodes, weights=weights)

    def integrate(self, values: np.ndarray) -> float:
        return float(np.dot(self.weights, values))

    def inner(self, left: np.ndarray, right: np.ndarray) -> float:
        """(f, g)₊ for functions tabulated on the nodes."""
        return float(np.dot(self.weights, left * right))

    def gram(self, rows: np.ndarray, columns: np.ndarray) -> np.ndarray:
        """Matrix of inner products between two stacks of tabulated functions."""
        return (rows * self.weights[None, :]) @ columns.T
