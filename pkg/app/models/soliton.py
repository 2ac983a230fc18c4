"""Soliton-check models.

Author: Odiseo Team
Created: 2025-11-07
Version: 1.0.0
"""

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.models.geometry import FloatArray


class PotentialProfile(BaseModel):
    """Radial potential f(s) with its arclength derivatives on a grid."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    f: FloatArray
    f_s: FloatArray
    f_ss: FloatArray

    @model_validator(mode="after")
    def check_lengths(self) -> "PotentialProfile":
        """Require matching 1-D arrays."""
        if not (self.f.ndim == 1 and self.f.shape == self.f_s.shape == self.f_ss.shape):
            raise ValueError("f, f_s and f_ss must be 1-D arrays of equal length")
        return self


class SolitonResidual(BaseModel):
    """Pointwise residual of Hess f + Ric + g/(2t) = 0.

    Attributes:
        radial: Radial component f_ss + n K0 - 1/(2|t|).
        spherical: g_can coefficient f_s psi_s psi + psi^2[K0+(n-1)K1] - psi^2/(2|t|).
        sup_norm: Largest absolute residual over both components.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    radial: FloatArray
    spherical: FloatArray
    sup_norm: float = Field(..., ge=0.0)


class BoundChainReport(BaseModel):
    """Links of the level-set curvature bound chain at one point.

    Attributes:
        ricci_ii: Frame Ricci value R_ii.
        sectional_upper: Upper bound 2 eps K0 + (1 - eps) K1 of R_ijij.
        radial_margin: 2 (1 - 2 eps (n - 1)) K0 (positive by hypothesis).
        normalization_margin: 1 - 2 (K0 + (n - 1)(1 - eps) K1) (positive by hypothesis).
        gauss_margin: 1 - R_ii - R_jj evaluated with both Ricci values at eps.
        bound: Chain value bounding the level-set sectional curvature.
        limit: 1 / (2 (n - 1)).
        hypotheses_hold: Both margins positive.
        holds: bound < limit.
    """

    model_config = ConfigDict(frozen=True)

    ricci_ii: float
    sectional_upper: float
    radial_margin: float
    normalization_margin: float
    gauss_margin: float
    bound: float
    limit: float
    hypotheses_hold: bool
    holds: bool
