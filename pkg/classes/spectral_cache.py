"""On-disk cache of forward spectral data keyed by potential, boundary and tolerances."""

from __future__ import annotations

import hashlib
import logging
from pathlib import Path
from typing import Callable

from .boundary import BoundaryCondition
from .config import SolverConfig
from .errors import InputValidationError
from .potential import Potential
from .serialization import dumps_json, load_spectral, potential_to_dict, spectral_to_dict
from .spectrum import SpectralData
from .utils import ensure_directory

logger = logging.getLogger(__name__)

CACHE_VERSION = "1"


class SpectralCache:
    """Store solved spectral data so reruns with the same inputs are instant."""

    def __init__(self, cache_dir: Path, enabled: bool = True) -> None:
        self.cache_dir = Path(cache_dir)
        self.enabled = enabled
        if enabled:
            ensure_directory(self.cache_dir)

    def load_or_compute(
        self,
        q: Potential,
        boundary: BoundaryCondition,
        N: int,
        config: SolverConfig,
        compute: Callable[[], SpectralData],
    ) -> SpectralData:
        """Return cached data for this key, or compute it and write it back."""
        if not self.enabled:
            return compute()

        cache_file = self.path_for(q, boundary, N, config)
        if cache_file.exists():
            try:
                data = load_spectral(cache_file)
            except InputValidationError as exc:
                logger.warning("Ignoring unreadable cache entry %s: %s", cache_file, exc)
            else:
                logger.info("Cache hit: %s", cache_file.name)
                return data

        data = compute()
        ensure_directory(cache_file.parent)
        cache_file.write_text(dumps_json(spectral_to_dict(data)), encoding="utf-8")
        logger.debug("Cached %s spectral data (N=%d) at %s", boundary.name, N, cache_file)
        return data

    def path_for(self, q: Potential, boundary: BoundaryCondition, N: int, config: SolverConfig) -> Path:
        return self.cache_dir / boundary.name / f"{self._make_cache_key(q, boundary, N, config)}.json"

    def _make_cache_key(self, q: Potential, boundary: BoundaryCondition, N: int, config: SolverConfig) -> str:
        """sha1 over every input that changes the solved data."""
        potential_part = hashlib.sha1(dumps_json(potential_to_dict(q)).encode("utf-8")).hexdigest()
        boundary_parts = "|".join(boundary.cache_fingerprint)
        config_parts = "|".join(config.cache_fingerprint)
        fingerprint = f"{CACHE_VERSION}|{potential_part}|{boundary_parts}|{N}|{config_parts}".encode("utf-8")
        return hashlib.sha1(fingerprint).hexdigest()
