"""Warped-product geometry models.

Pydantic v2 models for the discretized rotationally symmetric metric
g = phi(x)^2 dx^2 + psi(x)^2 g_can on [-1, 1] x S^n, its pointwise
curvature, and orthonormal frames used by the level-set computations.

Author: Odiseo Team
Created: 2025-11-04
Version: 1.0.0
"""

from enum import Enum
from typing import Annotated, Any

import numpy as np
import numpy.typing as npt
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    PlainSerializer,
    PlainValidator,
    model_validator,
)

from app.config.settings import settings


def _as_float_array(value: Any) -> npt.NDArray[np.float64]:
    """Copy input into a read-only one-or-two dimensional float64 array."""
    arr = np.array(value, dtype=np.float64)
    if arr.ndim not in (1, 2):
        raise ValueError(f"expected a 1-D or 2-D array, got ndim={arr.ndim}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("array contains non-finite values")
    arr.setflags(write=False)
    return arr


FloatArray = Annotated[
    npt.NDArray[np.float64],
    PlainValidator(_as_float_array),
    PlainSerializer(lambda a: a.tolist(), return_type=list),
]

# Uniform-spacing tolerance on the x grid (relative to dx).
GRID_UNIFORMITY_TOL = 1e-9
# Minimum grid size for the two-ghost-point stencils.
MIN_GRID_POINTS = 5


class BoundaryMode(str, Enum):
    """How the ends of the x interval close up."""

    SPHERE_POLES = "sphere_poles"
    INTERVAL_PERIODIC = "interval_periodic"
    INTERVAL_NEUMANN = "interval_neumann"


class Profile(BaseModel):
    """Discretized warped-product metric at one instant of the flow.

    Attributes:
        n: Dimension of the sphere factor (>= 2).
        x: Uniform, strictly increasing grid on [-1, 1].
        phi: Positive radial stretch factor at each grid point.
        psi: Warping radius at each grid point.
        t: Flow time.
        boundary_mode: Closure at x = -1 and x = +1.

    Example:
        >>> x = np.linspace(-1.0, 1.0, 65)
        >>> Profile(n=2, x=x, phi=np.ones_like(x), psi=np.full_like(x, 2.0),
        ...         boundary_mode=BoundaryMode.INTERVAL_NEUMANN)
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int = Field(..., ge=2, description="Sphere dimension")
    x: FloatArray = Field(..., description="Grid coordinate on [-1, 1]")
    phi: FloatArray = Field(..., description="Radial stretch phi(x) > 0")
    psi: FloatArray = Field(..., description="Warping radius psi(x) >= 0")
    t: float = Field(default=0.0, description="Flow time")
    boundary_mode: BoundaryMode = Field(default=BoundaryMode.SPHERE_POLES)

    @model_validator(mode="after")
    def check_invariants(self) -> "Profile":
        """Validate grid, positivity and end-closure invariants."""
        size = self.x.size
        if self.x.ndim != 1 or self.phi.shape != self.x.shape or self.psi.shape != self.x.shape:
            raise ValueError("x, phi and psi must be 1-D arrays of equal length")
        if size < MIN_GRID_POINTS:
            raise ValueError(f"grid needs at least {MIN_GRID_POINTS} points, got {size}")
        if not np.allclose([self.x[0], self.x[-1]], [-1.0, 1.0], rtol=0.0, atol=1e-12):
            raise ValueError("grid must span [-1, 1]")
        steps = np.diff(self.x)
        if np.any(steps <= 0.0):
            raise ValueError("grid must be strictly increasing")
        if np.max(np.abs(steps - steps.mean())) > GRID_UNIFORMITY_TOL * steps.mean():
            raise ValueError("grid must be uniform")
        if np.any(self.phi <= 0.0):
            raise ValueError("phi must be positive at every grid point")

        if self.boundary_mode is BoundaryMode.SPHERE_POLES:
            if self.psi[0] != 0.0 or self.psi[-1] != 0.0:
                raise ValueError("psi must vanish exactly at both poles")
            if np.any(self.psi[1:-1] <= 0.0):
                raise ValueError("psi must be positive at interior points")
            left, right = self.pole_slopes()
            tol = settings.profile_closure_tolerance
            if abs(left - 1.0) > tol or abs(right + 1.0) > tol:
                raise ValueError(
                    f"smooth closure violated: psi_s(-1)={left:.6g}, psi_s(+1)={right:.6g} "
                    f"(tolerance {tol:g})"
                )
        else:
            if np.any(self.psi <= 0.0):
                raise ValueError("psi must be positive on an interval profile")
            if self.boundary_mode is BoundaryMode.INTERVAL_PERIODIC and not (
                np.isclose(self.psi[0], self.psi[-1], rtol=1e-12, atol=0.0)
                and np.isclose(self.phi[0], self.phi[-1], rtol=1e-12, atol=0.0)
            ):
                raise ValueError("periodic profile must repeat its first point at the end")
        return self

    @property
    def dx(self) -> float:
        """Uniform grid spacing."""
        return float(self.x[1] - self.x[0])

    @property
    def size(self) -> int:
        """Number of grid points."""
        return int(self.x.size)

    @property
    def has_poles(self) -> bool:
        """Whether both ends are sphere poles."""
        return self.boundary_mode is BoundaryMode.SPHERE_POLES

    def pole_slopes(self) -> tuple[float, float]:
        """One-sided second-order psi_s at x = -1 and x = +1."""
        h = self.dx
        psi = self.psi
        left = (-3.0 * psi[0] + 4.0 * psi[1] - psi[2]) / (2.0 * h * self.phi[0])
        right = (3.0 * psi[-1] - 4.0 * psi[-2] + psi[-3]) / (2.0 * h * self.phi[-1])
        return float(left), float(right)

    def evolve(
        self, phi: npt.NDArray[np.float64], psi: npt.NDArray[np.float64], t: float
    ) -> "Profile":
        """Return a profile on the same grid with new values."""
        return Profile(
            n=self.n, x=self.x, phi=phi, psi=psi, t=t, boundary_mode=self.boundary_mode
        )

    def scaled(self, factor: float, time_origin: float = 0.0) -> "Profile":
        """Scale lengths by ``factor`` and time by ``factor**2`` about ``time_origin``."""
        return Profile(
            n=self.n,
            x=self.x,
            phi=self.phi * factor,
            psi=self.psi * factor,
            t=(self.t - time_origin) * factor**2,
            boundary_mode=self.boundary_mode,
        )


class CurvatureField(BaseModel):
    """Pointwise curvature of a Profile.

    Attributes:
        K0: Sectional curvature of planes containing the radial direction.
        K1: Sectional curvature of planes tangent to the spheres.
        R: Scalar curvature 2n K0 + n(n-1) K1.
        ric_radial: Radial Ricci eigenvalue n K0.
        ric_sphere_coeff: Coefficient psi^2 [K0 + (n-1) K1] of g_can in Ric.
        rm_norm: max(|K0|, |K1|).
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    K0: FloatArray
    K1: FloatArray
    R: FloatArray
    ric_radial: FloatArray
    ric_sphere_coeff: FloatArray
    rm_norm: FloatArray

    @property
    def k_max(self) -> float:
        """Largest |Rm| on the grid."""
        return float(np.max(self.rm_norm))


class FrameSet(BaseModel):
    """Unit normal and tangent frame in the adapted orthonormal coordinates.

    Component 0 is the radial (d/ds) direction, components 1..n span the
    sphere factor.

    Attributes:
        normal: Components of the unit normal, shape (n+1,).
        tangents: Tangent vectors as rows, shape (n, n+1).
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    normal: FloatArray
    tangents: FloatArray

    @model_validator(mode="after")
    def check_shapes(self) -> "FrameSet":
        """Validate that the normal and tangents fit an (n+1)-dimensional frame."""
        dim = self.normal.size
        if self.normal.ndim != 1 or self.tangents.shape != (dim - 1, dim):
            raise ValueError(
                f"tangents must have shape (n, n+1) matching normal of length {dim}"
            )
        return self

    @property
    def n(self) -> int:
        """Sphere dimension of the frame."""
        return int(self.normal.size - 1)

    @property
    def matrix(self) -> npt.NDArray[np.float64]:
        """Frame as a square matrix with the normal in row 0."""
        return np.vstack([self.normal, self.tangents])

    @classmethod
    def from_matrix(cls, matrix: npt.NDArray[np.float64]) -> "FrameSet":
        """Build a frame whose row 0 is the normal and rows 1..n the tangents."""
        return cls(normal=matrix[0], tangents=matrix[1:])
