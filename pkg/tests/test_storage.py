"""Unit tests for artifact files and run documents.

Author: Odiseo Team
Created: 2025-11-19
Version: 1.0.0
"""

import json

import numpy as np
import pytest

from app.exceptions import ConfigError, IoError
from app.models.diagnostics import Verdict
from app.models.family import ProbeResult
from app.models.flow import SeriesRecord
from app.storage import ArtifactStore, load_run_config, read_potential_csv, read_profile_csv


@pytest.fixture
def store(tmp_path) -> ArtifactStore:
    """Artifact store rooted in a temporary directory."""
    return ArtifactStore(tmp_path / "out")


# ============================================================================
# Profiles
# ============================================================================


def test_profile_round_trip_is_exact(store, unit_sphere):
    """Test a written profile reads back bit for bit."""
    later = unit_sphere.evolve(phi=unit_sphere.phi, psi=unit_sphere.psi, t=0.125)

    path = store.write_profile("snapshots/profile_0000.csv", later)
    loaded = read_profile_csv(path)

    np.testing.assert_array_equal(loaded.x, later.x)
    np.testing.assert_array_equal(loaded.phi, later.phi)
    np.testing.assert_array_equal(loaded.psi, later.psi)
    assert loaded.t == 0.125
    assert loaded.n == 2
    assert loaded.boundary_mode == later.boundary_mode


def test_profile_round_trip_keeps_boundary_mode(store, periodic_cylinder):
    """Test the boundary mode comment survives a round trip."""
    path = store.write_profile("cylinder.csv", periodic_cylinder)

    assert read_profile_csv(path).boundary_mode == periodic_cylinder.boundary_mode


def test_profile_missing_dimension(tmp_path):
    """Test a profile without the n comment is malformed."""
    path = tmp_path / "profile.csv"
    path.write_text("x,phi,psi\n-1,1,0\n0,1,1\n1,1,0\n", encoding="utf-8")

    with pytest.raises(IoError):
        read_profile_csv(path)


def test_profile_invalid_values(tmp_path):
    """Test a profile violating the pole conditions is a configuration error."""
    x = np.linspace(-1.0, 1.0, 9)
    rows = "\n".join(f"{v!r},1.0,1.0" for v in x)
    path = tmp_path / "profile.csv"
    path.write_text(f"# n=2\nx,phi,psi\n{rows}\n", encoding="utf-8")

    with pytest.raises(ConfigError) as exc_info:
        read_profile_csv(path)

    assert exc_info.value.field_path == "profile_path"


def test_potential_bad_header(tmp_path):
    """Test a potential file needs the x,f,f_s,f_ss header."""
    path = tmp_path / "potential.csv"
    path.write_text("x,f\n0,1\n", encoding="utf-8")

    with pytest.raises(IoError):
        read_potential_csv(path)


def test_read_missing_file(tmp_path):
    """Test unreadable files raise IoError."""
    with pytest.raises(IoError):
        read_profile_csv(tmp_path / "absent.csv")


# ============================================================================
# Tables and JSON
# ============================================================================


def test_series_blank_for_undefined(store):
    """Test undefined series values are written as empty cells."""
    path = store.write_series(
        "series.csv", [SeriesRecord(t=0.0, k_max=1.0, psi_min=0.5, r_min=None)]
    )

    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "t,k_max,r_min,psi_min,x_plus,x_minus,pinching"
    assert lines[1] == "0,1,,0.5,,,"


def test_phase_sorted_by_alpha(store):
    """Test the phase table is ordered by alpha with error labels."""
    results = [
        ProbeResult(alpha=0.75, verdict=Verdict.TYPE_I_NECKPINCH, max_ratio=1.5, T_est=2.0),
        ProbeResult(alpha=0.25, error="failed"),
    ]

    path = store.write_phase("phase.csv", results)

    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines == [
        "alpha,verdict,max_ratio,T_est",
        "0.25,error,,",
        "0.75,type_I_neckpinch,1.5,2",
    ]


def test_json_is_sorted_and_indented(store):
    """Test JSON reports are deterministic."""
    path = store.write_json("report.json", {"b": 1, "a": [1, 2]})

    text = path.read_text(encoding="utf-8")
    assert text == json.dumps({"a": [1, 2], "b": 1}, indent=2) + "\n"


# ============================================================================
# Run documents
# ============================================================================


def test_load_run_config(tmp_path):
    """Test a minimal family document validates."""
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"solver": {"n_grid": 129}, "family": {"alpha": 0.5}}))

    config = load_run_config(path)

    assert config.solver.n_grid == 129
    assert config.family.alpha == 0.5
    assert config.seed == 0


def test_load_run_config_field_path(tmp_path):
    """Test validation errors name the offending field."""
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"solver": {"n_grid": 128}, "family": {}}))

    with pytest.raises(ConfigError) as exc_info:
        load_run_config(path)

    assert exc_info.value.field_path == "solver.n_grid"


def test_load_run_config_needs_one_source(tmp_path):
    """Test a document without initial data is rejected."""
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"solver": {"n_grid": 129}}))

    with pytest.raises(ConfigError):
        load_run_config(path)


def test_load_run_config_bad_json(tmp_path):
    """Test malformed JSON is a configuration error."""
    path = tmp_path / "run.json"
    path.write_text("{solver: }")

    with pytest.raises(ConfigError):
        load_run_config(path)
