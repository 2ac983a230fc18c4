"""Flow solver models.

Solver configuration, per-step series records and the FlowRun container
returned by the solver.

Author: Odiseo Team
Created: 2025-11-04
Version: 1.0.0
"""

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.config.settings import settings
from app.models.geometry import BoundaryMode, Profile


class SolverConfig(BaseModel):
    """Time-integration settings for one run.

    Attributes:
        cfl_safety: Fraction of the explicit stability limit used per step.
        k_stop: Curvature cap; the run ends when max |Rm| reaches it.
        t_max: Hard bound on flow time.
        n_grid: Number of grid points (odd, >= 65).
        boundary_mode: End closure of the grid.
        snapshot_stride: Accepted steps between stored snapshots.
        resample_every: Arclength re-grid period in accepted steps (0 = off).
        dissipation: Strength of the fourth-difference damping of phi (0 = off).
    """

    model_config = ConfigDict(
        frozen=True,
        json_schema_extra={
            "example": {
                "cfl_safety": 0.2,
                "k_stop": 1.0e6,
                "t_max": 1.0,
                "n_grid": 513,
                "boundary_mode": "sphere_poles",
                "snapshot_stride": 50,
            }
        },
    )

    cfl_safety: float = Field(default=settings.solver_cfl_safety, gt=0.0, le=1.0)
    k_stop: float = Field(default=settings.solver_k_stop, gt=0.0)
    t_max: float = Field(default=settings.solver_t_max, ge=0.0)
    n_grid: int = Field(..., ge=65, description="Grid size, odd so that x = 0 is a node")
    boundary_mode: BoundaryMode = Field(default=BoundaryMode.SPHERE_POLES)
    snapshot_stride: int = Field(default=settings.solver_snapshot_stride, ge=1)
    max_rejections: int = Field(default=settings.solver_max_rejections, ge=1)
    gradient_tolerance: float = Field(default=settings.solver_gradient_tolerance, gt=0.0)
    reaction_factor: float = Field(default=settings.solver_reaction_factor, gt=0.0, le=1.0)
    resample_every: int = Field(default=0, ge=0)
    dissipation: float = Field(default=settings.solver_dissipation, ge=0.0, le=0.3)

    @field_validator("n_grid")
    @classmethod
    def validate_odd_grid(cls, v: int) -> int:
        """Require an odd grid so the equator x = 0 is a grid point."""
        if v % 2 == 0:
            raise ValueError(f"n_grid must be odd, got {v}")
        return v


class Termination(str, Enum):
    """Why a run stopped."""

    CURVATURE_CAP = "curvature_cap"
    DT_FLOOR = "dt_floor"
    T_MAX = "t_max"
    DEGENERATE_INTERIOR = "degenerate_interior"
    SOLVER_ERROR = "solver_error"


class SeriesRecord(BaseModel):
    """Diagnostics recorded after every accepted step.

    The first seven fields are the persisted series columns; the rest feed
    the runtime monitors and the classifier.
    """

    model_config = ConfigDict(frozen=True)

    t: float
    k_max: float
    r_min: float | None = None
    psi_min: float
    x_plus: float | None = None
    x_minus: float | None = None
    pinching: float | None = None

    dt: float = 0.0
    bump_count: int = 0
    psi_x_plus: float | None = None
    psi_x_minus: float | None = None
    grad_max: float = 0.0
    rm_psi2_max: float = 0.0
    r_min_scalar: float = 0.0
    r_max_scalar: float = 0.0
    pole_residual: float = 0.0
    inv_sqrt_r_gradient: float | None = None


class MonitorReport(BaseModel):
    """Running sups and violations of the flow invariants.

    Attributes:
        grad_max_sup: Sup of max |psi_s| over accepted steps.
        rm_psi2_sup: Sup of max |Rm| psi^2 (bounded along a run).
        pinching_sup: Sup of the log-pinching functional.
        inv_sqrt_r_gradient_sup: Sup of |d/ds R^{-1/2}|.
        inv_r_rate_sup: Sup of |d/dt R^{-1}| between records.
        r_max_growth_sup: Sup of (dR_max/dt) / R_max^2 between records.
        pole_residual_sup: Sup of |psi_ss| at the poles.
        scalar_positive_initially: Whether min R > 0 at t = 0.
        violations: Human-readable invariant failures, in order.
    """

    grad_max_sup: float = 0.0
    rm_psi2_sup: float = 0.0
    pinching_sup: float | None = None
    inv_sqrt_r_gradient_sup: float | None = None
    inv_r_rate_sup: float | None = None
    r_max_growth_sup: float | None = None
    pole_residual_sup: float = 0.0
    scalar_positive_initially: bool = False
    violations: list[str] = Field(default_factory=list)


class FlowRun(BaseModel):
    """Result of integrating one initial profile.

    Attributes:
        config: Solver configuration used.
        snapshots: Time-ordered stored profiles (first is the initial data).
        series: One record per accepted step, plus the initial record.
        termination: Stopping reason.
        message: Detail for the stopping reason.
        monitors: Invariant monitor summary.
        steps: Number of accepted steps.
        rejections: Total number of rejected step attempts.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    config: SolverConfig
    snapshots: list[Profile]
    series: list[SeriesRecord]
    termination: Termination
    message: str = ""
    monitors: MonitorReport = Field(default_factory=MonitorReport)
    steps: int = 0
    rejections: int = 0

    @property
    def final(self) -> Profile:
        """Last stored profile."""
        return self.snapshots[-1]

    @property
    def initial(self) -> Profile:
        """Initial profile."""
        return self.snapshots[0]

    def summary(self) -> dict[str, object]:
        """Scalar summary used in JSON reports."""
        last = self.series[-1]
        return {
            "termination": self.termination.value,
            "message": self.message,
            "steps": self.steps,
            "rejections": self.rejections,
            "snapshots": len(self.snapshots),
            "t_final": last.t,
            "k_max_final": last.k_max,
            "r_min_final": last.r_min,
            "monitors": self.monitors.model_dump(mode="json"),
        }
