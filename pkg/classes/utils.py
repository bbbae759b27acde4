"""Utility helpers shared across the spectral toolkit."""

from __future__ import annotations

from pathlib import Path
from typing import Iterable

import numpy as np


def ensure_directory(path: Path) -> None:
    """Create the directory if it does not already exist."""
    path.mkdir(parents=True, exist_ok=True)


def binomial_series(power: float, sign: float, order: int) -> np.ndarray:
    """Taylor coefficients of (1 + sign·z)^power up to degree ``order − 1``."""
    coeffs = np.empty(order)
    if order == 0:
        return coeffs
    coeffs[0] = 1.0
    for k in range(order - 1):
        coeffs[k + 1] = coeffs[k] * sign * (power - k) / (k + 1)
    return coeffs


def strictly_increasing(values: Iterable[float]) -> bool:
    array = np.asarray(list(values), dtype=float)
    return bool(np.all(np.diff(array) > 0))
