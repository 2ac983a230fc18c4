"""Unit tests for warped-product geometry and the Profile model.

Author: Odiseo Team
Created: 2025-11-19
Version: 1.0.0
"""

import numpy as np
import pytest
from pydantic import ValidationError

from app.exceptions import DegenerateInterior, NotOrthonormal
from app.models.geometry import BoundaryMode, FrameSet, Profile
from app.services.profile_geometry import (
    POLE_REGULAR_POINTS,
    arclength,
    contract_sectional,
    curvature,
    cylinder,
    derivatives_s,
    frame_ricci,
    frame_sectional,
    pole_residual,
    random_frame,
    resample_arclength,
    riemann_tensor,
    round_sphere,
    scalar_curvature_gradient,
    total_length,
)

# ============================================================================
# Profile model
# ============================================================================


def test_round_sphere_satisfies_closure(unit_sphere):
    """Test the round sphere factory closes smoothly at both poles."""
    left, right = unit_sphere.pole_slopes()

    assert unit_sphere.has_poles
    assert left == pytest.approx(1.0, abs=1e-3)
    assert right == pytest.approx(-1.0, abs=1e-3)


def test_profile_rejects_nonzero_pole():
    """Test psi must vanish exactly at sphere poles."""
    x = np.linspace(-1.0, 1.0, 65)
    psi = np.sin(0.5 * np.pi * (x + 1.0)) + 1e-3

    with pytest.raises(ValidationError):
        Profile(n=2, x=x, phi=np.full_like(x, 0.5 * np.pi), psi=psi)


def test_profile_rejects_grid_outside_interval():
    """Test the grid must span [-1, 1]."""
    x = np.linspace(-1.0, 0.5, 65)

    with pytest.raises(ValidationError):
        Profile(
            n=2,
            x=x,
            phi=np.ones_like(x),
            psi=np.ones_like(x),
            boundary_mode=BoundaryMode.INTERVAL_NEUMANN,
        )


def test_profile_rejects_small_dimension():
    """Test the sphere factor needs n >= 2."""
    with pytest.raises(ValidationError):
        cylinder(1, 1.0, 65, mode=BoundaryMode.INTERVAL_NEUMANN)


def test_cylinder_rejects_pole_mode():
    """Test a cylinder window cannot carry sphere poles."""
    with pytest.raises(ValueError):
        cylinder(2, 1.0, 65, mode=BoundaryMode.SPHERE_POLES)


def test_profile_arrays_are_read_only(unit_sphere):
    """Test profile arrays cannot be mutated in place."""
    with pytest.raises(ValueError):
        unit_sphere.psi[3] = 0.0


def test_scaled_profile(unit_sphere):
    """Test parabolic rescaling of lengths and time."""
    p = unit_sphere.evolve(phi=unit_sphere.phi, psi=unit_sphere.psi, t=0.5)

    scaled = p.scaled(2.0, time_origin=0.25)

    np.testing.assert_allclose(scaled.psi, 2.0 * p.psi)
    np.testing.assert_allclose(scaled.phi, 2.0 * p.phi)
    assert scaled.t == pytest.approx(1.0)


# ============================================================================
# Arclength and curvature
# ============================================================================


def test_arclength_anchored_at_equator(unit_sphere):
    """Test s = phi x for constant phi, zero at x = 0."""
    s = arclength(unit_sphere)

    np.testing.assert_allclose(s, 0.5 * np.pi * unit_sphere.x, atol=1e-12)
    assert total_length(unit_sphere) == pytest.approx(np.pi)


def test_sphere_curvature(unit_sphere):
    """Test K0 = K1 = 1 and R = n(n+1) on the unit sphere."""
    field = curvature(unit_sphere)

    np.testing.assert_allclose(field.K0, 1.0, atol=1e-3)
    np.testing.assert_allclose(field.K1, 1.0, atol=1e-3)
    np.testing.assert_allclose(field.R, 6.0, atol=1e-2)
    assert field.K0[0] == field.K1[0]
    assert field.K0[-1] == field.K1[-1]
    assert field.k_max == pytest.approx(1.0, abs=1e-3)


def test_sphere_k1_takes_pole_regular_value_near_poles(unit_sphere):
    """Test K1 = K0 next to the poles and (1 - psi_s^2) / psi^2 beyond."""
    field = curvature(unit_sphere)
    psi_s, _ = derivatives_s(unit_sphere)
    m = POLE_REGULAR_POINTS + 1

    np.testing.assert_array_equal(field.K1[:m], field.K0[:m])
    np.testing.assert_array_equal(field.K1[-m:], field.K0[-m:])
    direct = (1.0 - psi_s[m] ** 2) / unit_sphere.psi[m] ** 2
    assert field.K1[m] == pytest.approx(direct, rel=1e-12)


def test_sphere_pole_residual_is_small(unit_sphere):
    """Test the closure residual psi_ss at the poles nearly vanishes."""
    assert pole_residual(unit_sphere) < 1e-2


def test_cylinder_curvature_is_exact(periodic_cylinder):
    """Test K0 = 0 and K1 = 1/r^2 on a cylinder."""
    p = cylinder(3, 2.0, 65, half_length=4.0)

    field = curvature(p)

    np.testing.assert_array_equal(field.K0, 0.0)
    np.testing.assert_allclose(field.K1, 0.25, rtol=1e-14)
    np.testing.assert_allclose(field.R, 6 * 0.25, rtol=1e-14)
    assert pole_residual(periodic_cylinder) == 0.0


def test_curvature_degenerate_interior(unit_sphere):
    """Test an interior psi below the floor raises DegenerateInterior."""
    with pytest.raises(DegenerateInterior) as exc_info:
        curvature(unit_sphere, psi_floor=2.0)

    assert exc_info.value.index is not None
    assert 0 < exc_info.value.index < unit_sphere.size - 1


def test_scalar_curvature_gradient_on_cylinder(periodic_cylinder):
    """Test R^{-1/2} is constant on a cylinder."""
    field = curvature(periodic_cylinder)

    assert scalar_curvature_gradient(periodic_cylinder, field) == pytest.approx(0.0, abs=1e-12)


def test_resample_keeps_uniform_profile(unit_sphere):
    """Test re-gridding a constant-phi profile changes nothing."""
    resampled = resample_arclength(unit_sphere)

    np.testing.assert_allclose(resampled.phi, unit_sphere.phi)
    np.testing.assert_allclose(resampled.psi, unit_sphere.psi, atol=1e-12)


# ============================================================================
# Frame curvature
# ============================================================================


def test_frame_sectional_matches_contraction(rng):
    """Test the two-coefficient formula against the full tensor."""
    K0, K1, n = -0.7, 2.3, 3
    tensor = riemann_tensor(K0, K1, n)

    for _ in range(20):
        frame = random_frame(n, rng)
        for i in range(n):
            for j in range(i + 1, n):
                expected = contract_sectional(tensor, frame.tangents[i], frame.tangents[j])
                assert frame_sectional(K0, K1, frame, i, j) == pytest.approx(expected, abs=1e-12)


def test_frame_ricci_coordinate_frame():
    """Test R_ii = K0 + (n-1) K1 for a tangent orthogonal to the radial direction."""
    frame = FrameSet.from_matrix(np.eye(3))

    assert frame_ricci(1.5, 0.5, frame, 0) == pytest.approx(2.0)
    assert frame_sectional(1.5, 0.5, frame, 0, 1) == pytest.approx(0.5)


def test_frame_ricci_radial_tangent():
    """Test R_ii = n K0 when the tangent is the radial direction."""
    matrix = np.eye(3)[[1, 0, 2]]
    frame = FrameSet.from_matrix(matrix)

    assert frame_ricci(1.5, 0.5, frame, 0) == pytest.approx(3.0)


def test_frame_not_orthonormal():
    """Test a scaled frame is rejected."""
    frame = FrameSet.from_matrix(2.0 * np.eye(3))

    with pytest.raises(NotOrthonormal):
        frame_sectional(1.0, 1.0, frame, 0, 1)
    with pytest.raises(NotOrthonormal):
        frame_ricci(1.0, 1.0, frame, 0)


def test_frame_sectional_needs_distinct_indices():
    """Test i == j is rejected."""
    frame = FrameSet.from_matrix(np.eye(3))

    with pytest.raises(ValueError):
        frame_sectional(1.0, 1.0, frame, 1, 1)


def test_frame_shape_validation():
    """Test tangents must be (n, n+1)."""
    with pytest.raises(ValidationError):
        FrameSet(normal=np.zeros(3), tangents=np.zeros((3, 3)))


def test_round_sphere_radius_scaling():
    """Test curvature scales as 1/r^2."""
    field = curvature(round_sphere(2, 2.0, 129))

    np.testing.assert_allclose(field.K1, 0.25, atol=1e-3)
