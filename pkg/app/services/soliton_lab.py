"""Shrinking soliton identities on rotationally symmetric profiles.

Evaluates the gradient shrinking soliton equation
Hess f + Ric + g / (2t) = 0 for radial potentials, the volumes of the
level sets {f = a} (round spheres of radius psi), their intrinsic
curvature through the Gauss equation, and the curvature bound chain used
to compare level sets with the round cylinder cross section.

Author: Odiseo Team
Created: 2025-11-16
Version: 1.0.0
"""

import numpy as np
from scipy.special import gamma

from app.exceptions import CriticalLevel
from app.models.geometry import CurvatureField, FrameSet, Profile
from app.models.soliton import BoundChainReport, PotentialProfile, SolitonResidual
from app.services.profile_geometry import (
    FloatArray,
    arclength,
    check_orthonormal,
    contract_sectional,
    curvature,
    curvature_from_derivatives,
    derivatives_s,
    frame_ricci,
    frame_sectional,
    random_frame,
    riemann_tensor,
)
from app.utils.logging import get_logger

logger = get_logger(__name__)

CRITICAL_SLOPE = 1e-14


# ============================================================================
# POTENTIALS
# ============================================================================


def potential_from_values(p: Profile, f: FloatArray) -> PotentialProfile:
    """Radial potential from grid values, differentiated in arclength."""
    f = np.asarray(f, dtype=np.float64)
    f_s = np.gradient(f, p.x, edge_order=2) / p.phi
    f_ss = np.gradient(f_s, p.x, edge_order=2) / p.phi
    return PotentialProfile(f=f, f_s=f_s, f_ss=f_ss)


def quadratic_potential(p: Profile, scale: float = 0.25) -> PotentialProfile:
    """f = scale * s^2 with s the arclength from x = 0 (exact derivatives)."""
    s = arclength(p)
    return PotentialProfile(f=scale * s * s, f_s=2.0 * scale * s, f_ss=np.full_like(s, 2.0 * scale))


def constant_potential(p: Profile, value: float = 0.0) -> PotentialProfile:
    """f = value everywhere."""
    zeros = np.zeros_like(p.x)
    return PotentialProfile(f=np.full_like(p.x, value), f_s=zeros, f_ss=zeros)


# ============================================================================
# SOLITON EQUATION
# ============================================================================


def hessian_radial(
    p: Profile, f: PotentialProfile, psi_s: FloatArray | None = None
) -> tuple[FloatArray, FloatArray]:
    """Hessian of a radial potential: f_ss ds^2 + f_s psi_s psi g_can.

    Args:
        p: Profile.
        f: Potential on the profile grid.
        psi_s: Arclength slope of psi (finite differences if omitted).

    Returns:
        Tuple (radial component, g_can coefficient).
    """
    if psi_s is None:
        psi_s, _ = derivatives_s(p)
    return f.f_ss, f.f_s * psi_s * p.psi


def soliton_residual(
    p: Profile,
    f: PotentialProfile,
    t: float,
    derivatives: tuple[FloatArray, FloatArray] | None = None,
) -> SolitonResidual:
    """Pointwise residual of Hess f + Ric + g / (2t) = 0.

    Args:
        p: Profile.
        f: Potential on the profile grid.
        t: Soliton time (negative).
        derivatives: Analytic (psi_s, psi_ss) replacing the finite differences.

    Returns:
        SolitonResidual.

    Raises:
        ValueError: If t is not negative.
        DegenerateInterior: If the curvature cannot be evaluated.
    """
    if not t < 0.0:
        raise ValueError(f"soliton time must be negative, got {t}")
    psi_s, psi_ss = derivatives if derivatives is not None else derivatives_s(p)
    field: CurvatureField = curvature_from_derivatives(p, psi_s, psi_ss)
    hess_rad, hess_sph = hessian_radial(p, f, psi_s)
    half = 1.0 / (2.0 * abs(t))

    radial = hess_rad + field.ric_radial - half
    spherical = hess_sph + field.ric_sphere_coeff - p.psi**2 * half
    sup_norm = float(max(np.max(np.abs(radial)), np.max(np.abs(spherical))))
    return SolitonResidual(radial=radial, spherical=spherical, sup_norm=sup_norm)


# ============================================================================
# LEVEL SETS
# ============================================================================


def unit_sphere_volume(n: int) -> float:
    """Volume of the unit n-sphere, 2 pi^{(n+1)/2} / Gamma((n+1)/2)."""
    return float(2.0 * np.pi ** ((n + 1) / 2.0) / gamma((n + 1) / 2.0))


def level_set_volume(p: Profile, s_a: float) -> float:
    """Volume of the round level set at arclength s_a (measured from x = 0)."""
    psi_a = float(np.interp(s_a, arclength(p), p.psi))
    return unit_sphere_volume(p.n) * psi_a**p.n


def level_set_frame(n: int, rng: np.random.Generator | None = None) -> FrameSet:
    """Frame with normal d/ds and tangents spanning the sphere factor.

    The tangents are a random rotation of the sphere directions when a
    generator is given, the coordinate directions otherwise.
    """
    matrix = np.eye(n + 1)
    if rng is not None:
        q, r = np.linalg.qr(rng.standard_normal((n, n)))
        matrix[1:, 1:] = (q * np.sign(np.diag(r))).T
    return FrameSet.from_matrix(matrix)


def level_set_intrinsic_curvature(
    p: Profile,
    f: PotentialProfile,
    s_a: float,
    frame: FrameSet,
    i: int,
    j: int,
) -> float:
    """Intrinsic sectional curvature of the level set through s_a (Gauss equation).

    R~_ijij = R_ijij + h_ii h_jj - h_ij^2 with
    h_ab = [f_ss u_a^0 u_b^0 + (f_s psi_s / psi) sum_{beta >= 1} u_a^beta u_b^beta] / |f_s|.

    Args:
        p: Profile.
        f: Radial potential.
        s_a: Arclength of the level set (measured from x = 0).
        frame: Orthonormal frame; tangents i and j span the plane.
        i: First tangent index.
        j: Second tangent index.

    Returns:
        R~_ijij.

    Raises:
        CriticalLevel: If f_s vanishes at s_a.
        NotOrthonormal: If the frame is not orthonormal.
    """
    check_orthonormal(frame)
    s = arclength(p)
    psi_s, psi_ss = derivatives_s(p)
    psi_a, slope_a, psi_ss_a, f_s, f_ss = (
        float(np.interp(s_a, s, values)) for values in (p.psi, psi_s, psi_ss, f.f_s, f.f_ss)
    )
    if abs(f_s) <= CRITICAL_SLOPE:
        raise CriticalLevel(f"|grad f| vanishes at s = {s_a:.9g}")

    K0 = -psi_ss_a / psi_a
    K1 = (1.0 - slope_a * slope_a) / psi_a**2
    u, v = frame.tangents[i], frame.tangents[j]

    def h(a: FloatArray, b: FloatArray) -> float:
        return float((f_ss * a[0] * b[0] + (f_s * slope_a / psi_a) * (a[1:] @ b[1:])) / abs(f_s))

    return frame_sectional(K0, K1, frame, i, j) + h(u, u) * h(v, v) - h(u, v) ** 2


def bound_chain(K0: float, K1: float, n: int, eps: float, grad_f: float) -> BoundChainReport:
    """Evaluate the level-set curvature bound chain at one point.

    Args:
        K0: Radial sectional curvature.
        K1: Spherical sectional curvature.
        n: Sphere dimension.
        eps: Squared radial component of the frame tangent.
        grad_f: |grad f| at the point.

    Returns:
        BoundChainReport; ``holds`` compares the chain value with 1/(2(n-1)).
    """
    ricci_ii = (1.0 + (n - 1) * eps) * K0 + (n - 1) * (1.0 - eps) * K1
    h1 = 2.0 * (1.0 - 2.0 * eps * (n - 1)) * K0
    h2 = 1.0 - 2.0 * (K0 + (n - 1) * (1.0 - eps) * K1)
    limit = 1.0 / (2.0 * (n - 1))
    bound = (1.0 - h1 - h2) / (2.0 * (n - 1)) + h2 * h2 / (4.0 * grad_f * grad_f)
    return BoundChainReport(
        ricci_ii=ricci_ii,
        sectional_upper=2.0 * eps * K0 + (1.0 - eps) * K1,
        radial_margin=h1,
        normalization_margin=h2,
        gauss_margin=1.0 - 2.0 * ricci_ii,
        bound=bound,
        limit=limit,
        hypotheses_hold=h1 > 0.0 and h2 > 0.0,
        holds=bound < limit,
    )


# ============================================================================
# ORACLES
# ============================================================================


def frame_oracle_error(p: Profile, frames: int, rng: np.random.Generator) -> float:
    """Largest gap between frame_sectional/frame_ricci and full tensor contractions.

    Random frames are drawn at random interior grid points of the profile.
    """
    if frames == 0:
        return 0.0
    field = curvature(p)
    interior = np.arange(1, p.size - 1) if p.has_poles else np.arange(p.size)
    worst = 0.0
    for _ in range(frames):
        k = int(rng.choice(interior))
        K0, K1 = float(field.K0[k]), float(field.K1[k])
        frame = random_frame(p.n, rng)
        tensor = riemann_tensor(K0, K1, p.n)
        u, v = frame.tangents[0], frame.tangents[1]
        sectional = frame_sectional(K0, K1, frame, 0, 1)
        worst = max(worst, abs(sectional - contract_sectional(tensor, u, v)))
        ricci = sum(
            contract_sectional(tensor, u, w) for m, w in enumerate(frame.matrix) if m != 1
        )
        worst = max(worst, abs(frame_ricci(K0, K1, frame, 0) - ricci))
    logger.debug(f"Frame oracle over {frames} frames: max error {worst:.3e}")
    return worst


def level_set_identity_error(
    p: Profile, f: PotentialProfile, fractions: list[float], rng: np.random.Generator
) -> float:
    """Largest |R~_ijij - 1/psi^2| over level sets at the given length fractions."""
    s = arclength(p)
    worst = 0.0
    for fraction in fractions:
        s_a = float(s[0] + fraction * (s[-1] - s[0]))
        psi_a = float(np.interp(s_a, s, p.psi))
        frame = level_set_frame(p.n, rng)
        value = level_set_intrinsic_curvature(p, f, s_a, frame, 0, 1)
        worst = max(worst, abs(value - 1.0 / psi_a**2))
    return worst
