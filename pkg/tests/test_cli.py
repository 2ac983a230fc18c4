"""End-to-end tests for the command-line front end.

Author: Odiseo Team
Created: 2025-11-19
Version: 1.0.0
"""

import json

import numpy as np
import pytest

from app.exceptions import NotOrthonormal
from app.main import EXIT_CONFIG_ERROR, EXIT_IO_ERROR, build_parser, main
from app.models.geometry import BoundaryMode
from app.services.flow_solver import FlowSolver
from app.services.profile_geometry import cylinder, round_sphere
from app.services.soliton_lab import quadratic_potential
from app.storage import ArtifactStore


@pytest.fixture
def workspace(tmp_path):
    """Store for input files plus an output directory path."""
    (tmp_path / "inputs").mkdir()
    return ArtifactStore(tmp_path / "inputs"), tmp_path / "out"


def write_config(directory, payload) -> str:
    """Write a run document and return its path as a string."""
    path = directory / "run.json"
    path.write_text(json.dumps(payload), encoding="utf-8")
    return str(path)


def test_parser_knows_every_command():
    """Test each subcommand parses its common options."""
    parser = build_parser()

    for name in ("run", "sweep", "bisect", "validate", "soliton-check"):
        args = parser.parse_args([name, "--config", "run.json", "--out", "out", "--seed", "7"])
        assert args.command == name
        assert args.seed == 7


def test_sweep_alpha_list_option():
    """Test --alphas takes a comma separated list."""
    args = build_parser().parse_args(
        ["sweep", "--config", "run.json", "--out", "out", "--alphas", "0.1,0.5"]
    )

    assert args.alphas == [0.1, 0.5]


def test_validate_sphere(workspace):
    """Test validate passes on a round sphere and writes its report."""
    store, out = workspace
    profile = store.write_profile("sphere.csv", round_sphere(2, 1.0, 65))
    config = write_config(store.root, {"solver": {"n_grid": 65}, "profile_path": str(profile)})

    status = main(["validate", "--config", config, "--out", str(out), "--seed", "3"])

    assert status == 0
    report = json.loads((out / "validation.json").read_text(encoding="utf-8"))
    assert report["passed"] is True
    assert report["seed"] == 3
    assert report["failures"] == {}


def test_validate_writes_to_configured_output_dir(workspace):
    """Test commands fall back to output_dir when --out is omitted."""
    store, out = workspace
    profile = store.write_profile("sphere.csv", round_sphere(2, 1.0, 65))
    config = write_config(
        store.root,
        {"solver": {"n_grid": 65}, "profile_path": str(profile), "output_dir": str(out)},
    )

    assert build_parser().parse_args(["validate", "--config", config]).out is None
    assert main(["validate", "--config", config]) == 0
    assert (out / "validation.json").exists()


def test_missing_grid_size_is_config_error(workspace):
    """Test a document without solver.n_grid exits with the config status."""
    store, out = workspace
    profile = store.write_profile("sphere.csv", round_sphere(2, 1.0, 65))
    config = write_config(store.root, {"solver": {}, "profile_path": str(profile)})

    assert main(["validate", "--config", config, "--out", str(out)]) == EXIT_CONFIG_ERROR


def test_grid_mismatch_is_config_error(workspace):
    """Test a profile whose size differs from solver.n_grid is rejected."""
    store, out = workspace
    profile = store.write_profile("sphere.csv", round_sphere(2, 1.0, 65))
    config = write_config(store.root, {"solver": {"n_grid": 129}, "profile_path": str(profile)})

    assert main(["validate", "--config", config, "--out", str(out)]) == EXIT_CONFIG_ERROR


def test_missing_config_is_io_error(tmp_path):
    """Test an unreadable run document exits with the I/O status."""
    status = main(["validate", "--config", str(tmp_path / "absent.json"), "--out", "out"])

    assert status == EXIT_IO_ERROR


def test_synthetic_bisect(workspace):
    """Test bisect with the synthetic dichotomy writes its ledger."""
    store, out = workspace
    config = write_config(
        store.root,
        {
            "solver": {"n_grid": 65},
            "family": {"n_grid": 65},
            "bisection": {"synthetic_threshold": 0.37, "tolerance": 0.125},
        },
    )

    status = main(["bisect", "--config", config, "--out", str(out)])

    assert status == 0
    ledger = json.loads((out / "bisection.json").read_text(encoding="utf-8"))
    lo, hi = ledger["bracket"]
    assert lo <= 0.37 < hi
    assert hi - lo <= 0.125
    assert ledger["error"] is None
    assert (out / "phase.csv").read_text(encoding="utf-8").startswith("alpha,verdict")


def test_run_cylinder_profile(workspace):
    """Test run writes series, snapshots and report for a short cylinder run."""
    store, out = workspace
    profile = store.write_profile("cylinder.csv", cylinder(2, 1.0, 65, half_length=8.0))
    config = write_config(
        store.root,
        {
            "solver": {"n_grid": 65, "boundary_mode": "interval_periodic", "t_max": 0.05},
            "profile_path": str(profile),
        },
    )

    status = main(["run", "--config", config, "--out", str(out)])

    assert status == 0
    report = json.loads((out / "report.json").read_text(encoding="utf-8"))
    assert report["run"]["termination"] == "t_max"
    assert report["report"]["verdict"] == "unresolved"
    assert set(report["ratio_cap_sensitivity"]) == {"5", "10", "20"}
    assert (out / "series.csv").exists()
    assert (out / "ratio.csv").read_text(encoding="utf-8").splitlines() == ["t,rho"]
    assert (out / "snapshots" / "profile_0000.csv").exists()


def test_run_solver_error_exits_nonzero(workspace, monkeypatch):
    """Test a run ended by a solver error still writes its report and exits 1."""

    def broken(self, *args, **kwargs):
        raise NotOrthonormal("frame drifted")

    monkeypatch.setattr(FlowSolver, "advance", broken)
    store, out = workspace
    profile = store.write_profile("cylinder.csv", cylinder(2, 1.0, 65, half_length=8.0))
    config = write_config(
        store.root,
        {
            "solver": {"n_grid": 65, "boundary_mode": "interval_periodic", "t_max": 0.05},
            "profile_path": str(profile),
        },
    )

    assert main(["run", "--config", config, "--out", str(out)]) == 1
    report = json.loads((out / "report.json").read_text(encoding="utf-8"))
    assert report["run"]["termination"] == "solver_error"


def test_soliton_check_cylinder(workspace):
    """Test soliton-check passes on the shrinking cylinder."""
    store, out = workspace
    p = cylinder(2, np.sqrt(2.0), 65, half_length=4.0, mode=BoundaryMode.INTERVAL_NEUMANN)
    profile = store.write_profile("cylinder.csv", p)
    f = quadratic_potential(p)
    potential = store.path("potential.csv")
    rows = ["x,f,f_s,f_ss"] + [
        ",".join("%.17g" % v for v in row) for row in zip(p.x, f.f, f.f_s, f.f_ss)
    ]
    potential.write_text("\n".join(rows) + "\n", encoding="utf-8")
    config = write_config(
        store.root,
        {
            "solver": {"n_grid": 65, "boundary_mode": "interval_neumann"},
            "profile_path": str(profile),
            "soliton": {"potential_path": str(potential), "oracle_frames": 10},
        },
    )

    status = main(["soliton-check", "--config", config, "--out", str(out)])

    assert status == 0
    result = json.loads((out / "soliton.json").read_text(encoding="utf-8"))
    assert result["passed"] is True
    assert result["sup_norm"] <= 1e-10
    assert result["level_set_identity_error"] <= 1e-12
