"""Dumbbell family and bisection models.

Author: Odiseo Team
Created: 2025-11-06
Version: 1.0.0
"""

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.models.diagnostics import Verdict


class FamilyShape(BaseModel):
    """Shape parameters of the dumbbell family.

    The right cap radius, neck radius and neck center follow from these and
    alpha; they are reported in FamilyGeometry.

    Attributes:
        a_left: Left cap radius.
        neck_ratio: Neck radius as a fraction of a_left.
        valley_factor: Valley curvature radius q as a multiple of a_left.
        blend_width: Curvature blend width as a multiple of a_left.
        reach_min: Valley reach at alpha = 0 as a fraction of the distance
            from the valley entry to the neck center.
    """

    model_config = ConfigDict(frozen=True)

    a_left: float = Field(default=1.0, gt=0.0)
    neck_ratio: float = Field(default=0.008, gt=0.0, lt=0.5)
    valley_factor: float = Field(default=5.0, ge=5.0, le=50.0)
    blend_width: float = Field(default=0.25, gt=0.0, le=0.5)
    reach_min: float = Field(default=0.5, gt=0.0, lt=1.0)


class FamilySpec(BaseModel):
    """One member of the alpha-parametrized dumbbell family.

    Example:
        >>> FamilySpec(n=2, alpha=1.0, n_grid=513)
    """

    model_config = ConfigDict(
        frozen=True,
        json_schema_extra={"example": {"n": 2, "alpha": 1.0, "n_grid": 513}},
    )

    n: int = Field(default=2, ge=2)
    alpha: float = Field(default=1.0, ge=0.0, le=1.0)
    shape: FamilyShape = Field(default_factory=FamilyShape)
    n_grid: int = Field(default=513, ge=65)

    @model_validator(mode="after")
    def check_grid(self) -> "FamilySpec":
        """Require an odd grid."""
        if self.n_grid % 2 == 0:
            raise ValueError(f"n_grid must be odd, got {self.n_grid}")
        return self

    def with_alpha(self, alpha: float, n_grid: int | None = None) -> "FamilySpec":
        """Copy with a new alpha (and optionally grid size)."""
        return self.model_copy(
            update={"alpha": alpha, "n_grid": n_grid if n_grid is not None else self.n_grid}
        )


class FamilyGeometry(BaseModel):
    """Derived arclength layout of a built dumbbell.

    Attributes:
        length: Total pole-to-pole length.
        a_right: Right cap radius.
        neck_radius: Valley minimum w.
        neck_center: Arclength of the valley minimum.
        valley_entry: End of the left blend.
        valley_exit: Start of the right blend.
        right_cap_start: End of the right blend.
    """

    model_config = ConfigDict(frozen=True)

    length: float
    a_right: float
    neck_radius: float
    neck_center: float
    valley_entry: float
    valley_exit: float
    right_cap_start: float


class ConstraintReport(BaseModel):
    """Outcome of the four family conditions.

    Attributes:
        bump_count: Interior local maxima of psi.
        slope_zero_count: Plateau-merged zeros of psi_s.
        max_abs_slope: max |psi_s|.
        left_cap_concave: psi_ss < 0 across the left cap.
        min_scalar: min R.
        failures: Failed conditions with location details.
    """

    bump_count: int
    slope_zero_count: int
    max_abs_slope: float
    left_cap_concave: bool
    min_scalar: float
    failures: dict[str, str] = Field(default_factory=dict)

    @property
    def passed(self) -> bool:
        """True when every condition holds."""
        return not self.failures


class ProbeResult(BaseModel):
    """Verdict of one family member.

    Attributes:
        alpha: Family parameter.
        verdict: Classification, or None when the probe failed.
        max_ratio: Largest rho over the blow-up window.
        T_est: Extrapolated blow-up time.
        n_grid: Resolution used.
        error: Failure message when the probe could not complete.
    """

    model_config = ConfigDict(frozen=True)

    alpha: float
    verdict: Verdict | None = None
    max_ratio: float | None = None
    T_est: float | None = None
    n_grid: int | None = None
    error: str | None = None

    @property
    def verdict_label(self) -> str:
        """Verdict string for phase tables ("error" when failed)."""
        return self.verdict.value if self.verdict is not None else "error"


class BisectionState(BaseModel):
    """Bracket and probe ledger of the critical-parameter bisection.

    Attributes:
        alpha_lo: Lower bracket end (round point or Type II side).
        alpha_hi: Upper bracket end (neckpinch side).
        tolerance: Target bracket width.
        probes: Every probe result in evaluation order.
        anomalies: Probes that stayed unresolved after retries.
    """

    alpha_lo: float = Field(default=0.0, ge=0.0, le=1.0)
    alpha_hi: float = Field(default=1.0, ge=0.0, le=1.0)
    tolerance: float = Field(default=1.0 / 64.0, gt=0.0)
    probes: list[ProbeResult] = Field(default_factory=list)
    anomalies: list[ProbeResult] = Field(default_factory=list)

    @property
    def width(self) -> float:
        """Current bracket width."""
        return self.alpha_hi - self.alpha_lo

    @property
    def interior_probes(self) -> int:
        """Probes evaluated strictly inside the initial bracket."""
        return max(len(self.probes) - 2, 0)

    def ratio_maxima(self) -> list[tuple[float, float]]:
        """(alpha, max rho) pairs sorted by alpha, one per probed alpha."""
        latest: dict[float, float] = {}
        for probe in self.probes:
            if probe.max_ratio is not None:
                latest[probe.alpha] = probe.max_ratio
        return sorted(latest.items())
