"""JSON and CSV readers/writers for potentials, spectral data and power series.

Numbers are written as 17-significant-digit decimal strings with sorted keys, so equal
inputs produce byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .boundary_factory import boundary_from_dict
from .errors import InputValidationError
from .hardy import PowerSeries
from .potential import Potential
from .spectrum import SpectralData, SpectralDatum
from .utils import ensure_directory

logger = logging.getLogger(__name__)

_ENTRY_FIELDS = ("lambda", "mu", "s", "r", "ws_dot", "norm_sq_psi_plus", "norm_sq_phi")
_ENTRY_ATTRS = ("lam", "mu", "s", "r", "ws_dot", "norm_sq_psi_plus", "norm_sq_phi")


def format_number(value: float) -> str:
    return format(float(value), ".17g")


def parse_number(value: Any, name: str) -> float:
    """Accept decimal strings or JSON numbers."""
    try:
        return float(value)
    except (TypeError, ValueError) as exc:
        raise InputValidationError(f"Field '{name}' must be a number, got {value!r}.") from exc


def _numbers(values: Iterable[float]) -> list[str]:
    return [format_number(v) for v in values]


def _parse_list(values: Any, name: str) -> np.ndarray:
    if not isinstance(values, list):
        raise InputValidationError(f"Field '{name}' must be a list.")
    return np.array([parse_number(v, name) for v in values], dtype=float)


def _mapping(value: Any, context: str) -> Mapping:
    if not isinstance(value, Mapping):
        raise InputValidationError(f"{context} must be a JSON object, got {value!r}.")
    return value


def _require(payload: Any, key: str, context: str) -> Any:
    if key not in _mapping(payload, context):
        raise InputValidationError(f"{context} is missing the '{key}' field.")
    return payload[key]


# files


def dumps_json(payload: Mapping) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def read_json(path: Path) -> dict:
    """Parse a JSON object; malformed text is an input error naming line and column."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise InputValidationError(f"Input file not found: {path}") from exc
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputValidationError(
            f"Malformed JSON in {path} at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(payload, dict):
        raise InputValidationError(f"{path} must contain a JSON object.")
    return payload


def write_json(path: Path, payload: Mapping) -> None:
    path = Path(path)
    ensure_directory(path.parent)
    path.write_text(dumps_json(payload), encoding="utf-8")
    logger.debug("Wrote %s", path)


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_number(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buffer.getvalue()


# potentials


def potential_to_dict(q: Potential) -> dict:
    payload: dict = {"kind": q.kind, "x_max": format_number(q.x_max), "metadata": q.metadata}
    if q.kind == "grid":
        payload["h"] = format_number(q.h)
        payload["samples"] = _numbers(q.samples)
    elif q.kind == "hermite":
        payload["coeffs"] = _numbers(q.coeffs)
    else:
        payload["terms"] = [
            {"name": name, "amplitude": format_number(amplitude), "param": format_number(param)}
            for name, amplitude, param in q.terms
        ]
    return payload


def potential_from_dict(payload: Mapping) -> Potential:
    kind = str(_require(payload, "kind", "Potential")).lower()
    metadata = str(payload.get("metadata", ""))
    if kind == "grid":
        samples = _parse_list(_require(payload, "samples", "Grid potential"), "samples")
        h = parse_number(_require(payload, "h", "Grid potential"), "h")
        q = Potential.from_samples(samples, h, metadata)
        if "x_max" in payload and abs(parse_number(payload["x_max"], "x_max") - q.x_max) > 1e-9 * q.x_max:
            raise InputValidationError(f"Grid potential x_max {payload['x_max']} does not match h·(len − 1) = {q.x_max}.")
        return q
    x_max = parse_number(payload["x_max"], "x_max") if "x_max" in payload else None
    if kind == "hermite":
        coeffs = _parse_list(_require(payload, "coeffs", "Hermite potential"), "coeffs")
        return Potential.from_coeffs(coeffs, x_max, metadata)
    if kind == "closed_form":
        raw_terms = _require(payload, "terms", "Closed-form potential")
        if not isinstance(raw_terms, list):
            raise InputValidationError("Field 'terms' must be a list.")
        terms = tuple(
            (
                str(_require(term, "name", "Closed-form term")),
                parse_number(_require(term, "amplitude", "Closed-form term"), "amplitude"),
                parse_number(_require(term, "param", "Closed-form term"), "param"),
            )
            for term in raw_terms
        )
        return Potential(kind="closed_form", x_max=x_max or 12.0, terms=terms, metadata=metadata)
    raise InputValidationError(f"Unsupported potential kind '{kind}'.")


def load_potential(path: Path) -> Potential:
    return potential_from_dict(read_json(path))


# spectral data


def spectral_to_dict(data: SpectralData) -> dict:
    entries = []
    for entry in data.entries:
        record = {"n": entry.n}
        for name, attr in zip(_ENTRY_FIELDS, _ENTRY_ATTRS):
            record[name] = format_number(getattr(entry, attr))
        entries.append(record)
    datum_key = "q0" if data.boundary.parity == "odd" else "q0_minus_2b2"
    truncation = {key: format_number(value) for key, value in data.truncation.items()}
    return {
        "boundary": data.boundary.to_dict(),
        "N": data.size,
        "entries": entries,
        datum_key: format_number(data.q0_datum),
        "truncation": truncation,
    }


def spectral_from_dict(payload: Mapping) -> SpectralData:
    boundary = boundary_from_dict(_require(payload, "boundary", "Spectral data"))
    raw_entries = _require(payload, "entries", "Spectral data")
    if not isinstance(raw_entries, list) or not raw_entries:
        raise InputValidationError("Spectral data needs a non-empty 'entries' list.")
    entries = []
    for index, raw in enumerate(raw_entries):
        raw = _mapping(raw, f"Spectral entry {index}")
        n = int(parse_number(raw.get("n", index), "n"))
        if n != index:
            raise InputValidationError(f"Spectral entries must be ordered by n; entry {index} has n={n}.")
        values = {
            attr: parse_number(raw[name], name) if name in raw else float("nan")
            for name, attr in zip(_ENTRY_FIELDS, _ENTRY_ATTRS)
        }
        if "lambda" not in raw or "s" not in raw:
            raise InputValidationError(f"Spectral entry {n} needs 'lambda' and 's'.")
        if "mu" not in raw:
            values["mu"] = values["lam"] - boundary.unperturbed_eigenvalue(n)
        entries.append(SpectralDatum(n=n, **values))
    datum_key = "q0" if boundary.parity == "odd" else "q0_minus_2b2"
    q0_datum = parse_number(_require(payload, datum_key, "Spectral data"), datum_key)
    raw_truncation = _mapping(payload.get("truncation", {}), "Field 'truncation'")
    truncation = {key: parse_number(value, key) for key, value in raw_truncation.items()}
    if "N" in payload and int(parse_number(payload["N"], "N")) != len(entries):
        raise InputValidationError(f"Spectral data declares N={payload['N']} but has {len(entries)} entries.")
    return SpectralData(boundary=boundary, entries=entries, q0_datum=q0_datum, truncation=truncation)


def load_spectral(path: Path) -> SpectralData:
    return spectral_from_dict(read_json(path))


def spectral_rows(data: SpectralData) -> tuple[list[str], list[list]]:
    header = ["n", *_ENTRY_FIELDS]
    rows = [[entry.n, *(float(getattr(entry, attr)) for attr in _ENTRY_ATTRS)] for entry in data.entries]
    return header, rows


# power series


def series_to_dict(series: PowerSeries) -> dict:
    return {"coeffs": _numbers(series.coeffs)}


def series_from_dict(payload: Mapping) -> PowerSeries:
    return PowerSeries(_parse_list(_require(payload, "coeffs", "Power series"), "coeffs"))
