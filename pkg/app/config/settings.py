"""Application configuration using Pydantic v2 Settings.

Holds the numerical defaults for the flow solver, the singularity
classifier, the family builder and the orchestration layer, together with
the logging configuration, loaded from environment variables.

Author: Odiseo Team
Version: 2.0.0
"""

from pathlib import Path

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables.

    All settings can be overridden via environment variables. Values here are
    defaults only: a run document (see app.models.config.RunConfig) always
    takes precedence for the fields it declares.
    """

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore",
    )

    # ========================================================================
    # Flow Solver Configuration
    # ========================================================================
    solver_cfl_safety: float = Field(default=0.2, gt=0.0, le=1.0, alias="SOLVER_CFL_SAFETY")
    solver_k_stop: float = Field(
        default=1.0e10,
        gt=0.0,
        alias="SOLVER_K_STOP",
        description="Curvature cap: runs stop once max |Rm| reaches this value",
    )
    solver_t_max: float = Field(default=10.0, ge=0.0, alias="SOLVER_T_MAX")
    solver_snapshot_stride: int = Field(default=50, ge=1, alias="SOLVER_SNAPSHOT_STRIDE")
    solver_max_rejections: int = Field(
        default=20,
        ge=1,
        le=60,
        alias="SOLVER_MAX_REJECTIONS",
        description="Step halvings allowed before DtFloor is raised",
    )
    solver_gradient_tolerance: float = Field(
        default=1.0e-6,
        gt=0.0,
        le=1.0e-2,
        alias="SOLVER_GRADIENT_TOLERANCE",
        description="Allowed excess of |psi_s| over 1 before a step is rejected",
    )
    solver_dt_floor_factor: float = Field(default=1.0e-16, gt=0.0, alias="SOLVER_DT_FLOOR_FACTOR")
    solver_psi_floor_factor: float = Field(
        default=1.0e-10,
        gt=0.0,
        lt=1.0,
        alias="SOLVER_PSI_FLOOR_FACTOR",
        description="Interior psi floor as a fraction of the initial max psi",
    )
    # Reaction limit: dt <= factor * cfl / max|Rm|
    solver_reaction_factor: float = Field(
        default=0.25, gt=0.0, le=1.0, alias="SOLVER_REACTION_FACTOR"
    )
    solver_dissipation: float = Field(
        default=0.25,
        ge=0.0,
        le=0.3,
        alias="SOLVER_DISSIPATION",
        description="Fourth-difference artificial viscosity on phi, in units of the local ds^2",
    )
    profile_closure_tolerance: float = Field(
        default=0.05,
        gt=0.0,
        lt=1.0,
        alias="PROFILE_CLOSURE_TOLERANCE",
        description="Tolerance on |psi_s| = 1 at sphere poles (one-sided slope)",
    )

    # ========================================================================
    # Singularity Classifier Configuration
    # ========================================================================
    classify_round_tolerance: float = Field(
        default=0.10, gt=0.0, lt=1.0, alias="CLASSIFY_ROUND_TOLERANCE"
    )
    classify_profile_tolerance: float = Field(
        default=0.05, gt=0.0, lt=1.0, alias="CLASSIFY_PROFILE_TOLERANCE"
    )
    classify_neck_collapse_ratio: float = Field(
        default=1.0e-2, gt=0.0, lt=1.0, alias="CLASSIFY_NECK_COLLAPSE_RATIO"
    )
    classify_cap_retention: float = Field(
        default=0.25, gt=0.0, lt=1.0, alias="CLASSIFY_CAP_RETENTION"
    )
    classify_ratio_cap_factor: float = Field(
        default=10.0, gt=1.0, alias="CLASSIFY_RATIO_CAP_FACTOR"
    )
    classify_min_fit_records: int = Field(default=10, ge=3, alias="CLASSIFY_MIN_FIT_RECORDS")
    classify_fit_decade: float = Field(
        default=10.0,
        gt=1.0,
        alias="CLASSIFY_FIT_DECADE",
        description="Blow-up fits use records with K_max >= K_last / decade",
    )
    classify_cylinder_window: float = Field(
        default=5.0, gt=0.0, alias="CLASSIFY_CYLINDER_WINDOW"
    )

    # ========================================================================
    # Family / Reduced Distance Configuration
    # ========================================================================
    family_neck_ratio_max: float = Field(
        default=0.01,
        gt=0.0,
        lt=1.0,
        alias="FAMILY_NECK_RATIO_MAX",
        description="Neck-to-bump radius ratio required at the neckpinch endpoint",
    )
    reduced_distance_min_slices: int = Field(
        default=16, ge=2, alias="REDUCED_DISTANCE_MIN_SLICES"
    )

    # ========================================================================
    # Concurrency Configuration
    # ========================================================================
    # Probes in a sweep run independently; each worker owns its solver state.
    sweep_max_workers: int = Field(
        default=4,
        ge=1,
        le=64,
        alias="SWEEP_MAX_WORKERS",
        description="Max concurrent probes in a parameter sweep (ThreadPool size)",
    )

    # ========================================================================
    # Logging Configuration
    # ========================================================================
    log_level: str = Field(default="INFO", alias="LOG_LEVEL")
    log_to_file: bool = Field(default=True, alias="LOG_TO_FILE")
    log_dir: Path = Field(default=Path("logs"), alias="LOG_DIR")
    log_console_enabled: bool = Field(default=True, alias="LOG_CONSOLE_ENABLED")
    log_json_format: bool = Field(default=True, alias="LOG_JSON_FORMAT")
    log_file_max_mb: int = Field(default=10, ge=1, le=100, alias="LOG_FILE_MAX_MB")
    log_file_backup_count: int = Field(default=5, ge=1, le=20, alias="LOG_FILE_BACKUP_COUNT")

    # ========================================================================
    # Validators
    # ========================================================================

    @property
    def is_debug(self) -> bool:
        """Check if debug mode is enabled (LOG_LEVEL == DEBUG)."""
        return self.log_level == "DEBUG"

    @field_validator("log_level", mode="before")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Validate and normalize log level."""
        valid_levels = {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}
        normalized = v.upper().strip()
        if normalized not in valid_levels:
            return "INFO"
        return normalized

    @field_validator("log_dir", mode="before")
    @classmethod
    def ensure_log_dir_path(cls, v: str | Path) -> Path:
        """Ensure log_dir is a Path object."""
        return Path(v) if isinstance(v, str) else v


# Singleton instance
settings = Settings()
