import json
import math

import numpy as np
import pytest

from classes.boundary import DirichletBoundary, RobinBoundary
from classes.errors import InputValidationError
from classes.serialization import (
    csv_text,
    format_number,
    load_potential,
    load_spectral,
    potential_from_dict,
    potential_to_dict,
    read_json,
    series_from_dict,
    spectral_from_dict,
    spectral_rows,
    spectral_to_dict,
    write_json,
)
from classes.spectrum import SpectralData, SpectralDatum


@pytest.fixture
def robin_data() -> SpectralData:
    boundary = RobinBoundary(0.25)
    entries = [
        SpectralDatum(n=0, lam=1.3, mu=0.3, s=0.01, r=0.002, ws_dot=0.7, norm_sq_psi_plus=0.69, norm_sq_phi=0.71),
        SpectralDatum(n=1, lam=5.1, mu=0.1, s=-0.2, r=-0.001, ws_dot=-0.4, norm_sq_psi_plus=0.5, norm_sq_phi=0.3),
    ]
    return SpectralData(boundary=boundary, entries=entries, q0_datum=0.175, truncation={"tail_factor": 64.0})


def _write(tmp_path, text):
    path = tmp_path / "input.json"
    path.write_text(text, encoding="utf-8")
    return path


def test_numbers_are_written_with_full_precision():
    assert format_number(0.1) == "0.10000000000000001"
    assert float(format_number(math.pi)) == math.pi


def test_spectral_data_survives_a_file_round_trip(tmp_path, robin_data):
    path = tmp_path / "out" / "data.json"
    write_json(path, spectral_to_dict(robin_data))
    loaded = load_spectral(path)
    assert loaded.boundary == robin_data.boundary
    assert loaded.q0_datum == robin_data.q0_datum
    assert loaded.r_values == pytest.approx(robin_data.r_values, abs=0)
    assert loaded.truncation == {"tail_factor": 64.0}


def test_robin_files_name_the_shifted_datum(robin_data):
    payload = spectral_to_dict(robin_data)
    assert "q0_minus_2b2" in payload and "q0" not in payload
    assert payload["boundary"] == {"type": "robin", "b": 0.25}
    assert payload["N"] == 2


def test_output_is_deterministic(robin_data):
    first = json.dumps(spectral_to_dict(robin_data), sort_keys=True)
    second = json.dumps(spectral_to_dict(robin_data), sort_keys=True)
    assert first == second


def test_malformed_json_reports_line_and_column(tmp_path):
    path = _write(tmp_path, '{\n  "kind": "grid",\n  "h": 0.1,,\n}')
    with pytest.raises(InputValidationError, match=r"line 3, column"):
        read_json(path)


def test_missing_file_and_non_object_inputs(tmp_path):
    with pytest.raises(InputValidationError, match="not found"):
        read_json(tmp_path / "absent.json")
    with pytest.raises(InputValidationError, match="JSON object"):
        read_json(_write(tmp_path, "[1, 2]"))


def test_missing_lambda_is_rejected():
    payload = {"boundary": {"type": "dirichlet"}, "q0": "0", "entries": [{"n": 0, "s": "0.1"}]}
    with pytest.raises(InputValidationError, match="lambda"):
        spectral_from_dict(payload)


def test_entries_must_be_ordered():
    payload = {
        "boundary": {"type": "dirichlet"},
        "q0": "0",
        "entries": [{"n": 1, "lambda": "7", "s": "0"}, {"n": 0, "lambda": "3", "s": "0"}],
    }
    with pytest.raises(InputValidationError, match="ordered"):
        spectral_from_dict(payload)


def test_declared_size_must_match():
    payload = {"boundary": {"type": "dirichlet"}, "q0": "0", "N": 3, "entries": [{"n": 0, "lambda": "3", "s": "0"}]}
    with pytest.raises(InputValidationError, match="N=3"):
        spectral_from_dict(payload)


def test_mu_is_derived_when_absent():
    payload = {"boundary": {"type": "dirichlet"}, "q0": "0.1", "entries": [{"lambda": "3.25", "s": "0"}]}
    data = spectral_from_dict(payload)
    assert data.mus == pytest.approx([0.25])
    assert np.isnan(data.r_values[0])


def test_unknown_boundary_type_is_rejected():
    payload = {"boundary": {"type": "periodic"}, "q0": "0", "entries": [{"lambda": "3", "s": "0"}]}
    with pytest.raises(InputValidationError):
        spectral_from_dict(payload)


@pytest.mark.parametrize(
    "payload",
    [
        {"boundary": {"type": "dirichlet"}, "q0": "0", "entries": [1.0, 2.0]},
        {"boundary": {"type": "dirichlet"}, "q0": "0", "entries": [{"lambda": "3", "s": "0"}], "truncation": [64]},
        {"boundary": "dirichlet", "q0": "0", "entries": [{"lambda": "3", "s": "0"}]},
    ],
)
def test_nested_spectral_fields_must_be_objects(payload):
    with pytest.raises(InputValidationError, match="JSON object"):
        spectral_from_dict(payload)


def test_closed_form_terms_must_be_objects():
    with pytest.raises(InputValidationError, match="JSON object"):
        potential_from_dict({"kind": "closed_form", "terms": [3]})


def test_malformed_entry_file_is_an_input_error(tmp_path):
    path = _write(tmp_path, '{"boundary": {"type": "dirichlet"}, "q0": "0", "entries": [1.0]}')
    with pytest.raises(InputValidationError):
        load_spectral(path)


def test_grid_potential_checks_its_extent():
    samples = ["0.1", "0.05", "0", "0", "0"]
    q = potential_from_dict({"kind": "grid", "h": "0.5", "samples": samples, "x_max": "2"})
    assert q.x_max == pytest.approx(2.0)
    with pytest.raises(InputValidationError, match="x_max"):
        potential_from_dict({"kind": "grid", "h": "0.5", "samples": samples, "x_max": "3"})


def test_potential_kinds_load():
    hermite = potential_from_dict({"kind": "hermite", "coeffs": ["0.1", "-0.05"]})
    assert hermite.coeffs == pytest.approx([0.1, -0.05])
    closed = potential_from_dict(
        {"kind": "closed_form", "terms": [{"name": "gaussian", "amplitude": "0.3", "param": "1"}]}
    )
    assert closed.q_at_zero() == pytest.approx(0.3)
    assert potential_from_dict(potential_to_dict(closed)).terms == closed.terms
    with pytest.raises(InputValidationError, match="Unsupported potential kind"):
        potential_from_dict({"kind": "spline"})
    with pytest.raises(InputValidationError, match="must be a number"):
        potential_from_dict({"kind": "hermite", "coeffs": ["zero"]})


def test_fixture_files_load(fixtures_dir):
    assert load_potential(fixtures_dir / "zero.json").is_zero
    assert load_potential(fixtures_dir / "gaussian_0.3.json").q_at_zero() == pytest.approx(0.3)
    assert load_potential(fixtures_dir / "hermite_mix.json").kind == "hermite"
    series = series_from_dict(read_json(fixtures_dir / "series_inverse_sqrt.json"))
    assert series.coeffs[:3] == pytest.approx([1.0, 0.5, 0.375])


def test_csv_rows(robin_data):
    header, rows = spectral_rows(robin_data)
    text = csv_text(header, rows)
    lines = text.splitlines()
    assert lines[0] == "n,lambda,mu,s,r,ws_dot,norm_sq_psi_plus,norm_sq_phi"
    assert lines[1].startswith("0,1.3")
    assert len(lines) == 3


def test_dirichlet_files_use_plain_q0():
    data = SpectralData(DirichletBoundary(), [SpectralDatum(n=0, lam=3.0, mu=0.0, s=0.0)], 0.0)
    assert "q0" in spectral_to_dict(data)
