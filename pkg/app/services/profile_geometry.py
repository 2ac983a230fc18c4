"""Warped-product geometry of a Profile.

Arclength, s-derivatives of the warping radius, pointwise curvature and
the frame curvature formulas used by the level-set computations.

Stencils use two ghost points per end. At sphere poles psi is extended as
an odd function and phi as an even one (the discrete form of the smooth
closure conditions); interval_neumann uses even reflection for both and
interval_periodic wraps around the unique points. First derivatives are
fourth-order central, second derivatives second-order central.

Author: Odiseo Team
Created: 2025-11-10
Version: 1.0.0
"""

import numpy as np
import numpy.typing as npt
from scipy.integrate import cumulative_trapezoid, trapezoid
from scipy.interpolate import CubicSpline

from app.config.settings import settings
from app.exceptions import DegenerateInterior, NotOrthonormal
from app.models.geometry import BoundaryMode, CurvatureField, FrameSet, Profile
from app.utils.logging import get_logger

logger = get_logger(__name__)

FloatArray = npt.NDArray[np.float64]

GHOSTS = 2
ORTHONORMAL_TOL = 1e-10
# Grid points next to each pole where K1 takes the pole-regular value K0.
POLE_REGULAR_POINTS = 4


# ============================================================================
# STENCILS
# ============================================================================


def extend(values: FloatArray, mode: BoundaryMode, odd: bool = False) -> FloatArray:
    """Pad an array with two ghost points per end.

    Args:
        values: Grid values.
        mode: End closure of the grid.
        odd: Extend as an odd function about sphere poles (psi).

    Returns:
        Array of length len(values) + 4.
    """
    if mode is BoundaryMode.INTERVAL_PERIODIC:
        # The last grid point repeats the first one.
        return np.pad(values[:-1], (GHOSTS, GHOSTS + 1), mode="wrap")
    if mode is BoundaryMode.SPHERE_POLES and odd:
        return np.pad(values, GHOSTS, mode="reflect", reflect_type="odd")
    return np.pad(values, GHOSTS, mode="reflect")


def first_derivative(padded: FloatArray, h: float) -> FloatArray:
    """Fourth-order central first derivative on a ghost-padded array."""
    return (-padded[4:] + 8.0 * padded[3:-1] - 8.0 * padded[1:-3] + padded[:-4]) / (12.0 * h)


def second_derivative(padded: FloatArray, h: float) -> FloatArray:
    """Second-order central second derivative on a ghost-padded array."""
    return (padded[3:-1] - 2.0 * padded[2:-2] + padded[1:-3]) / (h * h)


def fourth_difference(padded: FloatArray) -> FloatArray:
    """Undivided fourth difference f[j-2] - 4 f[j-1] + 6 f[j] - 4 f[j+1] + f[j+2]."""
    return padded[:-4] - 4.0 * padded[1:-3] + 6.0 * padded[2:-2] - 4.0 * padded[3:-1] + padded[4:]


def s_derivatives(
    phi: FloatArray, psi: FloatArray, h: float, mode: BoundaryMode
) -> tuple[FloatArray, FloatArray]:
    """psi_s and psi_ss from raw arrays (see derivatives_s)."""
    psi_pad = extend(psi, mode, odd=True)
    phi_pad = extend(phi, mode)
    psi_x = first_derivative(psi_pad, h)
    psi_xx = second_derivative(psi_pad, h)
    phi_x = first_derivative(phi_pad, h)
    psi_s = psi_x / phi
    psi_ss = psi_xx / phi**2 - psi_x * phi_x / phi**3
    return psi_s, psi_ss


def pole_slope_x(psi: FloatArray, h: float) -> tuple[float, float]:
    """|psi_x| at both poles from the odd-reflection fourth-order stencil."""
    left = (16.0 * psi[1] - 2.0 * psi[2]) / (12.0 * h)
    right = (16.0 * psi[-2] - 2.0 * psi[-3]) / (12.0 * h)
    return float(left), float(right)


# ============================================================================
# ARCLENGTH AND DERIVATIVES
# ============================================================================


def arclength(p: Profile) -> FloatArray:
    """Arclength s(x) = int_0^x phi dx, anchored at the grid point nearest x = 0.

    Args:
        p: Profile.

    Returns:
        Monotone increasing s-values, zero at the node nearest x = 0.

    Examples:
        >>> s = arclength(profile_with_constant_phi_one)
        >>> np.allclose(s, profile_with_constant_phi_one.x)
        True
    """
    s = cumulative_trapezoid(p.phi, p.x, initial=0.0)
    anchor = int(np.argmin(np.abs(p.x)))
    return np.asarray(s - s[anchor], dtype=np.float64)


def total_length(p: Profile) -> float:
    """Length of the profile, int_{-1}^{1} phi dx."""
    return float(trapezoid(p.phi, p.x))


def derivatives_s(p: Profile) -> tuple[FloatArray, FloatArray]:
    """Arclength derivatives of psi.

    psi_s = psi_x / phi and psi_ss = (1/phi)(psi_x/phi)_x, evaluated with
    the ghost-point stencils described in the module docstring.

    Args:
        p: Profile.

    Returns:
        Tuple (psi_s, psi_ss).
    """
    return s_derivatives(p.phi, p.psi, p.dx, p.boundary_mode)


def pole_residual(p: Profile) -> float:
    """Largest |psi_ss| at the poles from a one-sided stencil (0 without poles).

    Smooth closure requires the second s-derivative of psi to vanish at a
    pole; this measures how far the discrete solution is from that.
    """
    if not p.has_poles:
        return 0.0
    h = p.dx
    psi = p.psi
    left = (2.0 * psi[0] - 5.0 * psi[1] + 4.0 * psi[2] - psi[3]) / (h * h * p.phi[0] ** 2)
    right = (2.0 * psi[-1] - 5.0 * psi[-2] + 4.0 * psi[-3] - psi[-4]) / (h * h * p.phi[-1] ** 2)
    return float(max(abs(left), abs(right)))


# ============================================================================
# CURVATURE
# ============================================================================


def sectional_curvatures(
    psi: FloatArray,
    psi_s: FloatArray,
    psi_ss: FloatArray,
    has_poles: bool,
    psi_floor: float,
) -> tuple[FloatArray, FloatArray]:
    """K0 and K1 from raw arrays.

    Next to a pole (1 - psi_s^2) / psi^2 divides grid-scale slope errors by
    psi^2 ~ h^2, so the first POLE_REGULAR_POINTS points use K1 = K0, the
    common limit both take at a smooth pole. The two differ by O(s^2)
    there, which keeps the scheme second order.

    Raises:
        DegenerateInterior: If an interior psi is at or below ``psi_floor``.
    """
    interior = slice(1, -1) if has_poles else slice(None)
    inner = psi[interior]
    low = int(np.argmin(inner))
    if not inner[low] > psi_floor:
        index = low + (1 if has_poles else 0)
        raise DegenerateInterior(
            f"psi={inner[low]:.3e} at grid index {index} is below floor {psi_floor:.3e}",
            index=index,
            value=float(inner[low]),
        )

    K0 = np.empty_like(psi)
    K1 = np.empty_like(psi)
    K0[interior] = -psi_ss[interior] / inner
    K1[interior] = (1.0 - psi_s[interior] ** 2) / inner**2

    if has_poles:
        # Quadratic extrapolation of K0; smoothness forces K0 = K1 at a pole.
        K0[0] = 3.0 * K0[1] - 3.0 * K0[2] + K0[3]
        K0[-1] = 3.0 * K0[-2] - 3.0 * K0[-3] + K0[-4]
        m = POLE_REGULAR_POINTS + 1
        K1[:m] = K0[:m]
        K1[-m:] = K0[-m:]
    return K0, K1


def curvature_from_derivatives(
    p: Profile,
    psi_s: FloatArray,
    psi_ss: FloatArray,
    psi_floor: float | None = None,
) -> CurvatureField:
    """Assemble the curvature field from given s-derivatives of psi.

    Used directly with analytic derivatives, and by curvature() with the
    finite-difference ones.

    Args:
        p: Profile supplying psi, n and the boundary mode.
        psi_s: First arclength derivative of psi.
        psi_ss: Second arclength derivative of psi.
        psi_floor: Smallest admissible interior psi; defaults to
            SOLVER_PSI_FLOOR_FACTOR times the current max psi.

    Returns:
        CurvatureField.

    Raises:
        DegenerateInterior: If an interior psi is at or below the floor.
    """
    psi = p.psi
    n = p.n
    if psi_floor is None:
        psi_floor = settings.solver_psi_floor_factor * float(np.max(psi))
    K0, K1 = sectional_curvatures(psi, psi_s, psi_ss, p.has_poles, psi_floor)

    return CurvatureField(
        K0=K0,
        K1=K1,
        R=2.0 * n * K0 + n * (n - 1) * K1,
        ric_radial=n * K0,
        ric_sphere_coeff=psi**2 * (K0 + (n - 1) * K1),
        rm_norm=np.maximum(np.abs(K0), np.abs(K1)),
    )


def curvature(p: Profile, psi_floor: float | None = None) -> CurvatureField:
    """Pointwise curvature of a profile.

    K0 = -psi_ss/psi (radial planes), K1 = (1 - psi_s^2)/psi^2 (planes
    tangent to the spheres). At poles both take the quadratic extrapolation
    of interior K0.

    Args:
        p: Profile.
        psi_floor: Smallest admissible interior psi (see
            curvature_from_derivatives).

    Returns:
        CurvatureField.

    Raises:
        DegenerateInterior: If an interior psi is at or below the floor.

    Examples:
        >>> field = curvature(unit_sphere_profile)   # n = 2
        >>> float(field.R.mean())                    # approximately 6
    """
    psi_s, psi_ss = derivatives_s(p)
    return curvature_from_derivatives(p, psi_s, psi_ss, psi_floor)


def scalar_curvature_gradient(p: Profile, field: CurvatureField) -> float | None:
    """sup |d/ds R^{-1/2}| over points with R > 0, or None if R <= 0 everywhere."""
    positive = field.R > 0.0
    if not np.any(positive):
        return None
    inv_sqrt = np.where(positive, 1.0 / np.sqrt(np.where(positive, field.R, 1.0)), 0.0)
    grad = np.gradient(inv_sqrt, p.x, edge_order=2) / p.phi
    # One-sided differences across a sign change of R are meaningless.
    usable = positive.copy()
    usable[1:] &= positive[:-1]
    usable[:-1] &= positive[1:]
    if not np.any(usable):
        return None
    return float(np.max(np.abs(grad[usable])))


# ============================================================================
# FRAME CURVATURE
# ============================================================================


def check_orthonormal(frame: FrameSet, tol: float = ORTHONORMAL_TOL) -> None:
    """Raise NotOrthonormal unless the frame is orthonormal within ``tol``."""
    m = frame.matrix
    error = float(np.max(np.abs(m @ m.T - np.eye(m.shape[0]))))
    if error > tol:
        raise NotOrthonormal(f"frame deviates from orthonormality by {error:.3e} > {tol:.1e}")


def frame_sectional(K0: float, K1: float, frame: FrameSet, i: int, j: int) -> float:
    """Sectional curvature of the plane spanned by tangents i and j.

    R_ijij = [(u_i^0)^2 + (u_j^0)^2] K0 + [1 - (u_i^0)^2 - (u_j^0)^2] K1.

    Args:
        K0: Radial sectional curvature at the point.
        K1: Spherical sectional curvature at the point.
        frame: Orthonormal frame.
        i: First tangent index (0-based).
        j: Second tangent index (0-based), different from i.

    Returns:
        R_ijij.

    Raises:
        NotOrthonormal: If the frame is not orthonormal.
        ValueError: If i == j.
    """
    if i == j:
        raise ValueError("frame_sectional needs two distinct tangent indices")
    check_orthonormal(frame)
    radial = frame.tangents[i, 0] ** 2 + frame.tangents[j, 0] ** 2
    return float(radial * K0 + (1.0 - radial) * K1)


def frame_ricci(K0: float, K1: float, frame: FrameSet, i: int) -> float:
    """Ricci curvature in the direction of tangent i.

    R_ii = [1 + (n-1) eps] K0 + (n-1)(1 - eps) K1 with eps = (u_i^0)^2.

    Raises:
        NotOrthonormal: If the frame is not orthonormal.
    """
    check_orthonormal(frame)
    n = frame.n
    eps = float(frame.tangents[i, 0] ** 2)
    return float((1.0 + (n - 1) * eps) * K0 + (n - 1) * (1.0 - eps) * K1)


def riemann_tensor(K0: float, K1: float, n: int) -> FloatArray:
    """Full curvature tensor R_abcd in adapted orthonormal coordinates.

    Only the warped-product components are nonzero: R_{a0a0} = K0 and
    R_{abab} = K1 for a, b >= 1, completed by the curvature symmetries.
    """
    dim = n + 1
    tensor = np.zeros((dim, dim, dim, dim))
    for a in range(dim):
        for b in range(dim):
            if a == b:
                continue
            k = K0 if 0 in (a, b) else K1
            tensor[a, b, a, b] = k
            tensor[a, b, b, a] = -k
    return tensor


def contract_sectional(tensor: FloatArray, u: FloatArray, v: FloatArray) -> float:
    """R(u, v, u, v) by full contraction."""
    return float(np.einsum("abcd,a,b,c,d->", tensor, u, v, u, v))


def random_frame(n: int, rng: np.random.Generator) -> FrameSet:
    """Uniformly random orthonormal frame in dimension n + 1."""
    q, r = np.linalg.qr(rng.standard_normal((n + 1, n + 1)))
    q = q * np.sign(np.diag(r))
    return FrameSet.from_matrix(q.T)


# ============================================================================
# PROFILE FACTORIES
# ============================================================================


def round_sphere(n: int, radius: float, n_grid: int, t: float = 0.0) -> Profile:
    """Round S^{n+1} of the given radius on a uniform x grid.

    phi is constant (pi r / 2), so s runs over [0, pi r] from pole to pole
    and psi = r sin(s / r).
    """
    x = np.linspace(-1.0, 1.0, n_grid)
    psi = radius * np.sin(0.5 * np.pi * (x + 1.0))
    psi[0] = 0.0
    psi[-1] = 0.0
    phi = np.full_like(x, 0.5 * np.pi * radius)
    return Profile(n=n, x=x, phi=phi, psi=psi, t=t)


def cylinder(
    n: int,
    radius: float,
    n_grid: int,
    half_length: float = 1.0,
    mode: BoundaryMode = BoundaryMode.INTERVAL_PERIODIC,
) -> Profile:
    """Constant-radius window [-half_length, half_length] x S^n without poles."""
    if mode is BoundaryMode.SPHERE_POLES:
        raise ValueError("a cylinder window needs an interval boundary mode")
    x = np.linspace(-1.0, 1.0, n_grid)
    return Profile(
        n=n,
        x=x,
        phi=np.full_like(x, half_length),
        psi=np.full_like(x, radius),
        boundary_mode=mode,
    )


def resample_arclength(p: Profile) -> Profile:
    """Re-grid a profile so that arclength is uniform in x (phi constant).

    psi is interpolated with a cubic spline in arclength; pole values stay
    pinned at zero.
    """
    s = cumulative_trapezoid(p.phi, p.x, initial=0.0)
    length = float(s[-1])
    target = 0.5 * length * (p.x + 1.0)
    psi = CubicSpline(s, p.psi)(target)
    if p.has_poles:
        psi[0] = 0.0
        psi[-1] = 0.0
    elif p.boundary_mode is BoundaryMode.INTERVAL_PERIODIC:
        psi[-1] = psi[0]
    phi = np.full_like(p.x, 0.5 * length)
    logger.debug(f"Resampled profile to uniform arclength (length={length:.6g})")
    return p.evolve(phi=phi, psi=psi, t=p.t)
