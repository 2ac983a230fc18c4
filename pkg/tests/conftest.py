"""Pytest configuration and shared fixtures.

Author: Odiseo Team
Created: 2025-10-31
Version: 2.0.0
"""

import os

# Settings are read once at import; keep test runs off the console and disk.
os.environ.setdefault("LOG_TO_FILE", "false")
os.environ.setdefault("LOG_CONSOLE_ENABLED", "false")

import numpy as np  # noqa: E402
import pytest  # noqa: E402

from app.models.flow import FlowRun, SeriesRecord, SolverConfig, Termination  # noqa: E402
from app.models.geometry import BoundaryMode, Profile  # noqa: E402
from app.services.profile_geometry import cylinder, round_sphere  # noqa: E402


@pytest.fixture
def unit_sphere() -> Profile:
    """Round S^3 (n = 2) of radius 1 on 129 points."""
    return round_sphere(2, 1.0, 129)


@pytest.fixture
def coarse_sphere() -> Profile:
    """Round S^3 (n = 2) of radius 1 on 65 points."""
    return round_sphere(2, 1.0, 65)


@pytest.fixture
def periodic_cylinder() -> Profile:
    """Unit-radius periodic cylinder window of half length 8 (n = 2)."""
    return cylinder(2, 1.0, 65, half_length=8.0)


@pytest.fixture
def flat_cylinder() -> Profile:
    """Neumann cylinder of radius 1e3: nearly flat on unit scales."""
    return cylinder(2, 1.0e3, 65, half_length=2.0, mode=BoundaryMode.INTERVAL_NEUMANN)


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator."""
    return np.random.default_rng(0)


@pytest.fixture
def make_run():
    """Factory assembling a FlowRun from hand-made snapshots and records."""

    def _make(
        snapshots: list[Profile],
        series: list[SeriesRecord],
        termination: Termination = Termination.CURVATURE_CAP,
    ) -> FlowRun:
        return FlowRun(
            config=SolverConfig(n_grid=65, boundary_mode=snapshots[0].boundary_mode),
            snapshots=snapshots,
            series=series,
            termination=termination,
        )

    return _make
