"""Diagnostics models.

Neck/bump structure, blow-up time estimates, singularity verdicts and
the classifier thresholds that produce them.

Author: Odiseo Team
Created: 2025-11-05
Version: 1.0.0
"""

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.config.settings import settings
from app.models.geometry import Profile


class Feature(BaseModel):
    """A neck or bump of psi.

    Attributes:
        index: Grid index (midpoint of a merged plateau, rounded down).
        x: Grid coordinate of the feature (plateau midpoint).
        value: psi at the feature.
    """

    model_config = ConfigDict(frozen=True)

    index: int
    x: float
    value: float


class NeckBumpReport(BaseModel):
    """Interior local extrema of psi and the polar cap shape.

    Attributes:
        bumps: Interior local maxima, left to right.
        necks: Interior local minima, left to right.
        r_min: Smallest neck value (None without necks).
        x_plus: Right-most bump position.
        x_minus: Left-most bump position.
        cap_concavity: (left, right) flags, True when psi_ss < 0 across the cap.
    """

    model_config = ConfigDict(frozen=True)

    bumps: list[Feature] = Field(default_factory=list)
    necks: list[Feature] = Field(default_factory=list)
    r_min: float | None = None
    x_plus: float | None = None
    x_minus: float | None = None
    cap_concavity: tuple[bool, bool] = (False, False)

    @model_validator(mode="after")
    def check_ordering(self) -> "NeckBumpReport":
        """Validate x_minus <= x_plus and r_min consistency."""
        if self.x_plus is not None and self.x_minus is not None and self.x_minus > self.x_plus:
            raise ValueError("x_minus must not exceed x_plus")
        if self.necks and self.r_min != min(neck.value for neck in self.necks):
            raise ValueError("r_min must equal the smallest neck value")
        return self

    @property
    def bump_count(self) -> int:
        """Number of bumps."""
        return len(self.bumps)

    @property
    def left_bump(self) -> Feature | None:
        """Left-most bump."""
        return self.bumps[0] if self.bumps else None

    @property
    def right_bump(self) -> Feature | None:
        """Right-most bump."""
        return self.bumps[-1] if self.bumps else None


class Verdict(str, Enum):
    """Singularity classification outcome."""

    TYPE_I_NECKPINCH = "type_I_neckpinch"
    ROUND_POINT = "round_point"
    TYPE_II_CANDIDATE = "type_II_candidate"
    UNRESOLVED = "unresolved"


class ClassifierConfig(BaseModel):
    """Thresholds of the verdict rules.

    Attributes:
        round_tolerance: Allowed 1 - K_min/K_max for a round point.
        profile_tolerance: Sup-norm match to the normalized sine profile.
        neck_collapse_ratio: r_min / r_min(0) below which the neck has pinched.
        cap_retention: Minimum psi(x_+-) / psi(x_+-)(0) for macroscopic caps.
        ratio_cap_factor: Multiple of the early median of rho giving ratio_cap.
        min_fit_records: Minimum number of records in the blow-up fit.
        fit_decade: Blow-up fit uses records with K_max >= K_last / fit_decade.
        cylinder_window: Rescaled length of the neck-cylinder comparison window.
    """

    model_config = ConfigDict(
        frozen=True,
        json_schema_extra={
            "example": {
                "round_tolerance": 0.1,
                "profile_tolerance": 0.05,
                "neck_collapse_ratio": 0.01,
                "cap_retention": 0.25,
                "ratio_cap_factor": 10.0,
            }
        },
    )

    round_tolerance: float = Field(default=settings.classify_round_tolerance, gt=0.0, lt=1.0)
    profile_tolerance: float = Field(default=settings.classify_profile_tolerance, gt=0.0)
    neck_collapse_ratio: float = Field(
        default=settings.classify_neck_collapse_ratio, gt=0.0, lt=1.0
    )
    cap_retention: float = Field(default=settings.classify_cap_retention, gt=0.0, lt=1.0)
    ratio_cap_factor: float = Field(default=settings.classify_ratio_cap_factor, gt=1.0)
    min_fit_records: int = Field(default=settings.classify_min_fit_records, ge=3)
    fit_decade: float = Field(default=settings.classify_fit_decade, gt=1.0)
    cylinder_window: float = Field(default=settings.classify_cylinder_window, gt=0.0)


class BlowupEstimate(BaseModel):
    """Extrapolated maximal time from a 1/K_max fit.

    Attributes:
        T_est: Fitted blow-up time (strictly after the last record).
        width: Standard-error based half width of the estimate.
        window_start: Index of the first record in the fit window.
        n_points: Number of records in the fit window.
    """

    model_config = ConfigDict(frozen=True)

    T_est: float
    width: float = Field(..., ge=0.0)
    window_start: int = Field(..., ge=0)
    n_points: int = Field(..., ge=2)


class Evidence(BaseModel):
    """Scale-free quantities the verdict rules were evaluated on."""

    r_min_initial: float | None = None
    r_min_final: float | None = None
    r_min_ratio: float | None = None
    psi_x_plus_initial: float | None = None
    psi_x_plus_final: float | None = None
    psi_x_minus_initial: float | None = None
    psi_x_minus_final: float | None = None
    D: float | None = Field(default=None, description="psi(x_-) at the last resolved time")
    curvature_ratio: float | None = None
    sine_profile_error: float | None = None
    ratio_cap: float | None = None
    ratio_max: float | None = None
    ratio_last: float | None = None
    ratio_increasing: bool | None = None
    neck_cylinder_error: float | None = None
    note: str = ""


class SingularityReport(BaseModel):
    """Classification of the singularity a run develops.

    Attributes:
        T_est: Extrapolated maximal time (None when no blow-up was found).
        T_width: Confidence half width of T_est.
        ratio_series: (t, (T_est - t) K_max(t)) over the blow-up window.
        verdict: Classification outcome.
        evidence: Quantities the rules were evaluated on.
        thresholds: Classifier thresholds used.
    """

    T_est: float | None = None
    T_width: float | None = None
    ratio_series: list[tuple[float, float]] = Field(default_factory=list)
    verdict: Verdict = Verdict.UNRESOLVED
    evidence: Evidence = Field(default_factory=Evidence)
    thresholds: ClassifierConfig = Field(default_factory=ClassifierConfig)

    @property
    def max_ratio(self) -> float | None:
        """Largest rho over the window."""
        return max((rho for _, rho in self.ratio_series), default=None)


class BlowupPivot(BaseModel):
    """Point-time pair used to normalize a blow-up sequence.

    Attributes:
        snapshot: Index into the run snapshots.
        index: Grid index of the pivot point.
        t: Flow time of the snapshot.
        Q: Scalar curvature at the pivot.
        rule: Which selection rule fixed the pivot.
    """

    model_config = ConfigDict(frozen=True)

    snapshot: int = Field(..., ge=0)
    index: int = Field(..., ge=0)
    t: float
    Q: float = Field(..., gt=0.0)
    rule: str = "curvature_max"


class RescaledBlowup(BaseModel):
    """Profiles rescaled around a pivot (lengths x sqrt(Q), time Q(t - t_m))."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    pivot: BlowupPivot
    profiles: list[Profile]
