"""Services package for Neckpinch Lab.

Geometry, flow integration, diagnostics, the dumbbell family and the
soliton identities.

Author: Odiseo Team
Version: 1.0.0
"""

from app.services.diagnostics import classify, detect_features, estimate_T, reduced_distance
from app.services.family_builder import (
    FamilyProbe,
    SyntheticProbe,
    bisect_critical,
    build_initial,
    check_constraints,
    sweep,
)
from app.services.flow_solver import FlowSolver, rhs, run, step
from app.services.profile_geometry import curvature, cylinder, round_sphere
from app.services.run_monitor import InvariantMonitor
from app.services.soliton_lab import bound_chain, level_set_volume, soliton_residual

__all__ = [
    "FamilyProbe",
    "FlowSolver",
    "InvariantMonitor",
    "SyntheticProbe",
    "bisect_critical",
    "bound_chain",
    "build_initial",
    "check_constraints",
    "classify",
    "curvature",
    "cylinder",
    "detect_features",
    "estimate_T",
    "level_set_volume",
    "reduced_distance",
    "rhs",
    "round_sphere",
    "run",
    "soliton_residual",
    "step",
    "sweep",
]
