"""Run document models.

A run document is a single JSON file describing one experiment. It is
validated here and resolved into the solver, classifier and family models.

Author: Odiseo Team
Created: 2025-11-08
Version: 1.0.0
"""

from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.config.settings import settings
from app.models.diagnostics import ClassifierConfig
from app.models.family import FamilySpec
from app.models.flow import SolverConfig


class SweepConfig(BaseModel):
    """Alpha values for a phase sweep."""

    model_config = ConfigDict(frozen=True)

    alphas: list[float] = Field(default_factory=list)
    max_workers: int = Field(default=settings.sweep_max_workers, ge=1)

    @field_validator("alphas")
    @classmethod
    def validate_alpha_range(cls, v: list[float]) -> list[float]:
        """Keep alphas inside the family range."""
        for alpha in v:
            if not 0.0 <= alpha <= 1.0:
                raise ValueError(f"alpha {alpha} outside [0, 1]")
        return v


class BisectionConfig(BaseModel):
    """Critical-parameter bisection settings.

    Attributes:
        alpha_lo: Initial lower bracket end.
        alpha_hi: Initial upper bracket end.
        tolerance: Target bracket width.
        synthetic_threshold: When set, probes use the synthetic verdict
            "neckpinch iff alpha > threshold" instead of running the flow.
    """

    model_config = ConfigDict(frozen=True)

    alpha_lo: float = Field(default=0.0, ge=0.0, le=1.0)
    alpha_hi: float = Field(default=1.0, ge=0.0, le=1.0)
    tolerance: float = Field(default=1.0 / 64.0, gt=0.0)
    synthetic_threshold: float | None = Field(default=None, ge=0.0, le=1.0)

    @model_validator(mode="after")
    def check_bracket(self) -> "BisectionConfig":
        """Require alpha_lo < alpha_hi."""
        if self.alpha_lo >= self.alpha_hi:
            raise ValueError("alpha_lo must be smaller than alpha_hi")
        return self


class SolitonCheckConfig(BaseModel):
    """Inputs of the soliton check.

    Attributes:
        potential_path: CSV with columns x,f,f_s,f_ss on the profile grid.
        t: Soliton time (negative).
        tolerance: Residual sup-norm accepted as a pass.
        level_fractions: Level sets are sampled at these fractions of the length.
        oracle_frames: Random frames for the curvature oracle comparison.
    """

    model_config = ConfigDict(frozen=True)

    potential_path: Path
    t: float = Field(default=-1.0, lt=0.0)
    tolerance: float = Field(default=1.0e-8, gt=0.0)
    level_fractions: list[float] = Field(default_factory=lambda: [0.2, 0.35, 0.8])
    oracle_frames: int = Field(default=100, ge=0)


class RunConfig(BaseModel):
    """Resolved experiment document.

    Exactly one source of initial data is given: a family member or a
    profile CSV. Commands write to output_dir unless --out is given.

    Example:
        >>> RunConfig.model_validate({"solver": {"n_grid": 513}, "family": {"alpha": 1.0}})
    """

    model_config = ConfigDict(
        frozen=True,
        extra="forbid",
        json_schema_extra={
            "example": {
                "solver": {"n_grid": 513, "k_stop": 1.0e6},
                "family": {"n": 2, "alpha": 1.0, "n_grid": 513},
                "output_dir": "out/alpha1",
                "seed": 0,
            }
        },
    )

    solver: SolverConfig
    family: FamilySpec | None = None
    profile_path: Path | None = None
    classifier: ClassifierConfig = Field(default_factory=ClassifierConfig)
    sweep: SweepConfig = Field(default_factory=SweepConfig)
    bisection: BisectionConfig = Field(default_factory=BisectionConfig)
    soliton: SolitonCheckConfig | None = None
    output_dir: Path = Field(default=Path("out"))
    seed: int = Field(default=0, ge=0, lt=2**64)

    @model_validator(mode="after")
    def check_initial_data(self) -> "RunConfig":
        """Require exactly one of family / profile_path."""
        if (self.family is None) == (self.profile_path is None):
            raise ValueError("exactly one of 'family' or 'profile_path' must be given")
        return self
