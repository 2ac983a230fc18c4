"""Domain models module."""

from app.models.config import BisectionConfig, RunConfig, SolitonCheckConfig, SweepConfig
from app.models.diagnostics import (
    BlowupEstimate,
    BlowupPivot,
    ClassifierConfig,
    Evidence,
    Feature,
    NeckBumpReport,
    RescaledBlowup,
    SingularityReport,
    Verdict,
)
from app.models.family import (
    BisectionState,
    ConstraintReport,
    FamilyGeometry,
    FamilyShape,
    FamilySpec,
    ProbeResult,
)
from app.models.flow import FlowRun, MonitorReport, SeriesRecord, SolverConfig, Termination
from app.models.geometry import BoundaryMode, CurvatureField, FloatArray, FrameSet, Profile
from app.models.soliton import BoundChainReport, PotentialProfile, SolitonResidual

__all__ = [
    "BisectionConfig",
    "BisectionState",
    "BlowupEstimate",
    "BlowupPivot",
    "BoundaryMode",
    "BoundChainReport",
    "ClassifierConfig",
    "ConstraintReport",
    "CurvatureField",
    "Evidence",
    "FamilyGeometry",
    "FamilyShape",
    "FamilySpec",
    "Feature",
    "FloatArray",
    "FlowRun",
    "FrameSet",
    "MonitorReport",
    "NeckBumpReport",
    "PotentialProfile",
    "Profile",
    "ProbeResult",
    "RescaledBlowup",
    "RunConfig",
    "SeriesRecord",
    "SingularityReport",
    "SolitonCheckConfig",
    "SolitonResidual",
    "SolverConfig",
    "SweepConfig",
    "Termination",
    "Verdict",
]
