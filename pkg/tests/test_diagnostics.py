"""Unit tests for neck/bump detection, blow-up fits, classification and
reduced distance.

Author: Odiseo Team
Created: 2025-11-19
Version: 1.0.0
"""

import numpy as np
import pytest

from app.exceptions import ConfigError, InsufficientHistory, NotBlowingUp, PivotNotFound
from app.models.diagnostics import BlowupPivot, ClassifierConfig, Verdict
from app.models.family import FamilySpec
from app.models.flow import FlowRun, SeriesRecord, SolverConfig, Termination
from app.models.geometry import BoundaryMode, Profile
from app.services.diagnostics import (
    cap_distance_bound,
    classify,
    detect_features,
    estimate_T,
    find_extrema,
    neck_cylinder_score,
    ratio_cap_sensitivity,
    reduced_distance,
    rescale_blowup,
    select_pivot,
)
from app.services.family_builder import build_initial
from app.services.flow_solver import run
from app.services.profile_geometry import round_sphere


@pytest.fixture(scope="module")
def neckpinch_run() -> FlowRun:
    """alpha = 1 dumbbell flowed to the default curvature cap on 129 points."""
    p0 = build_initial(FamilySpec(n=2, alpha=1.0, n_grid=129))
    return run(p0, SolverConfig(n_grid=129))


def blowup_series(times, k_of_t, **fields) -> list[SeriesRecord]:
    """Records with K_max = k_of_t(t) and constant extra fields."""
    records = []
    for t in times:
        values = {name: (f(t) if callable(f) else f) for name, f in fields.items()}
        records.append(SeriesRecord(t=float(t), k_max=float(k_of_t(t)), psi_min=1.0, **values))
    return records


# ============================================================================
# Necks and bumps
# ============================================================================


def test_find_extrema_dumbbell_shape():
    """Test two bumps around one neck."""
    x = np.linspace(-1.0, 1.0, 9)
    psi = np.array([0.0, 0.5, 0.9, 0.6, 0.4, 0.6, 0.9, 0.5, 0.0])

    maxima, minima = find_extrema(x, psi)

    assert [f.index for f in maxima] == [2, 6]
    assert [f.index for f in minima] == [4]
    assert minima[0].value == pytest.approx(0.4)
    assert minima[0].x == pytest.approx(0.0)


def test_find_extrema_merges_plateau():
    """Test a flat top counts once, at its midpoint."""
    x = np.linspace(-1.0, 1.0, 7)
    psi = np.array([0.0, 1.0, 2.0, 2.0, 2.0, 1.0, 0.0])

    maxima, minima = find_extrema(x, psi)

    assert len(maxima) == 1
    assert maxima[0].index == 3
    assert maxima[0].x == pytest.approx(0.0)
    assert minima == []


def test_find_extrema_monotone():
    """Test a monotone array has no interior extrema."""
    x = np.linspace(-1.0, 1.0, 11)

    assert find_extrema(x, x**3) == ([], [])


def test_detect_features_sphere(unit_sphere):
    """Test a round sphere has one bump at the equator and concave caps."""
    report = detect_features(unit_sphere)

    assert report.bump_count == 1
    assert report.necks == []
    assert report.r_min is None
    assert report.x_plus == pytest.approx(0.0)
    assert report.x_minus == report.x_plus
    assert report.cap_concavity == (True, True)


def test_detect_features_interval_has_no_caps(periodic_cylinder):
    """Test interval profiles report no cap concavity."""
    report = detect_features(periodic_cylinder)

    assert report.bump_count == 0
    assert report.cap_concavity == (False, False)


# ============================================================================
# Blow-up time
# ============================================================================


def test_estimate_T_exact_type_I_rate():
    """Test K = 1/(1 - 4t) extrapolates to T = 1/4."""
    series = blowup_series(np.linspace(0.0, 0.2, 20), lambda t: 1.0 / (1.0 - 4.0 * t))

    estimate = estimate_T(series)

    assert estimate.T_est == pytest.approx(0.25, rel=1e-9)
    assert estimate.width == pytest.approx(0.0, abs=1e-9)
    assert estimate.n_points == 20


def test_estimate_T_uses_last_decade():
    """Test the fit window starts where K_max is within a decade of its last value."""
    times = np.linspace(0.0, 0.99, 100)
    series = blowup_series(times, lambda t: 1.0 / (1.0 - t))
    cfg = ClassifierConfig(fit_decade=15.5)

    estimate = estimate_T(series, cfg)

    # K_max = 1/(1 - t) first exceeds 100/15.5 at t = 0.85.
    assert estimate.window_start == 85
    assert estimate.n_points == 15
    assert estimate.T_est == pytest.approx(1.0, rel=1e-9)


def test_estimate_T_too_few_records():
    """Test fewer than min_fit_records records raise NotBlowingUp."""
    series = blowup_series(np.linspace(0.0, 0.2, 5), lambda t: 1.0 / (1.0 - 4.0 * t))

    with pytest.raises(NotBlowingUp):
        estimate_T(series)


def test_estimate_T_non_monotone():
    """Test a decreasing curvature is not a blow-up."""
    series = blowup_series(np.linspace(0.0, 1.0, 20), lambda t: 2.0 - t)

    with pytest.raises(NotBlowingUp):
        estimate_T(series)


# ============================================================================
# Classification
# ============================================================================


def test_classify_round_point(unit_sphere, make_run):
    """Test a round final state with a Type I rate is a round point."""
    series = blowup_series(np.linspace(0.0, 0.9, 20), lambda t: 1.0 / (1.0 - t))
    flow = make_run([unit_sphere], series)

    report = classify(flow, t_est=1.0)

    assert report.verdict == Verdict.ROUND_POINT
    assert report.T_est == 1.0
    assert report.evidence.curvature_ratio == pytest.approx(1.0, abs=1e-2)
    assert report.evidence.sine_profile_error == pytest.approx(0.0, abs=1e-10)


def test_classify_round_point_of_sphere_run(coarse_sphere):
    """Test a flowed round sphere is classified as a round point near T = 1/4."""
    flow = run(coarse_sphere, SolverConfig(n_grid=65, k_stop=10.0))

    report = classify(flow)

    assert report.verdict == Verdict.ROUND_POINT
    assert report.T_est == pytest.approx(0.25, abs=5e-3)


def test_classify_neckpinch_of_dumbbell_run(neckpinch_run):
    """Test the alpha = 1 dumbbell pinches its neck with the caps retained."""
    report = classify(neckpinch_run)

    assert neckpinch_run.termination == Termination.CURVATURE_CAP
    assert report.verdict == Verdict.TYPE_I_NECKPINCH
    assert report.evidence.r_min_ratio < 1e-2
    assert report.T_est > neckpinch_run.final.t
    assert report.max_ratio < report.evidence.ratio_cap


def test_classify_type_I_neckpinch(periodic_cylinder, make_run):
    """Test a collapsing neck with bounded rho and retained caps."""
    series = blowup_series(
        np.linspace(0.0, 0.9, 20),
        lambda t: 1.0 / (1.0 - t),
        r_min=lambda t: 1.0 - 0.999 * t / 0.9,
        psi_x_plus=1.0,
        psi_x_minus=0.8,
    )
    flow = make_run([periodic_cylinder], series)

    report = classify(flow, t_est=1.0)

    assert report.verdict == Verdict.TYPE_I_NECKPINCH
    assert report.evidence.r_min_ratio == pytest.approx(0.001)
    assert report.evidence.D == pytest.approx(0.8)
    assert report.max_ratio == pytest.approx(1.0)


def test_classify_type_II_candidate(periodic_cylinder, make_run):
    """Test a rising rho above the ratio cap."""
    series = blowup_series(np.linspace(0.0, 0.95, 20), lambda t: 1.0 / (1.0 - t) ** 2)
    flow = make_run([periodic_cylinder], series)

    report = classify(flow, ClassifierConfig(ratio_cap_factor=5.0), t_est=1.0)

    assert report.verdict == Verdict.TYPE_II_CANDIDATE
    assert report.evidence.ratio_increasing
    assert report.evidence.ratio_last == pytest.approx(20.0)


def test_classify_unresolved_without_blowup(periodic_cylinder, make_run):
    """Test runs ending at t_max are not classified."""
    series = blowup_series(np.linspace(0.0, 0.9, 20), lambda t: 1.0 / (1.0 - t))
    flow = make_run([periodic_cylinder], series, termination=Termination.T_MAX)

    report = classify(flow)

    assert report.verdict == Verdict.UNRESOLVED
    assert report.T_est is None
    assert "t_max" in report.evidence.note


def test_classify_rejects_early_t_est(periodic_cylinder, make_run):
    """Test a supplied blow-up time must follow the last record."""
    series = blowup_series(np.linspace(0.0, 0.9, 20), lambda t: 1.0 / (1.0 - t))
    flow = make_run([periodic_cylinder], series)

    with pytest.raises(ValueError):
        classify(flow, t_est=0.5)


def test_ratio_cap_sensitivity_stable_type_I(periodic_cylinder, make_run):
    """Test a constant rho gives the same verdict for every cap factor."""
    series = blowup_series(
        np.linspace(0.0, 0.9, 20),
        lambda t: 1.0 / (1.0 - t),
        r_min=lambda t: 1.0 - 0.999 * t / 0.9,
        psi_x_plus=1.0,
        psi_x_minus=1.0,
    )
    flow = make_run([periodic_cylinder], series)

    verdicts = ratio_cap_sensitivity(flow)

    assert set(verdicts) == {5.0, 10.0, 20.0}
    assert set(verdicts.values()) == {Verdict.TYPE_I_NECKPINCH}


# ============================================================================
# Rescaling
# ============================================================================


def test_select_pivot_needs_poles(periodic_cylinder, make_run):
    """Test pivot selection on an interval profile fails."""
    flow = make_run([periodic_cylinder], blowup_series([0.0], lambda t: 1.0))

    with pytest.raises(PivotNotFound):
        select_pivot(flow)


def test_rescale_blowup_with_explicit_pivot(unit_sphere, make_run):
    """Test lengths scale by sqrt(Q) and time by Q about the pivot."""
    later = unit_sphere.evolve(phi=unit_sphere.phi, psi=unit_sphere.psi, t=0.5)
    flow = make_run([unit_sphere, later], blowup_series([0.0, 0.5], lambda t: 1.0))
    pivot = BlowupPivot(snapshot=1, index=64, t=0.5, Q=4.0)

    rescaled = rescale_blowup(flow, pivot)

    np.testing.assert_allclose(rescaled.profiles[1].psi, 2.0 * later.psi)
    assert rescaled.profiles[0].t == pytest.approx(-2.0)
    assert rescaled.profiles[1].t == pytest.approx(0.0)


def test_neck_cylinder_score_without_neck(unit_sphere):
    """Test profiles without a neck have no cylinder score."""
    assert neck_cylinder_score(unit_sphere) is None


def test_neck_cylinder_score_window_scales_with_neck():
    """Test only points within the rescaled window enter the score."""
    x = np.linspace(-1.0, 1.0, 129)
    # psi_ss = 1 at the neck, so R = -6 / 0.1 + 6 / 0.01 = 540 there.
    p = Profile(
        n=3,
        x=x,
        phi=np.ones_like(x),
        psi=0.1 + 0.5 * x**2 - 0.25 * x**4,
        boundary_mode=BoundaryMode.INTERVAL_NEUMANN,
    )

    score = neck_cylinder_score(p)

    # The cylinder of radius sqrt(6/540) is fitted at the neck, where psi = 0.1.
    assert score == pytest.approx(1.0 - np.sqrt(0.9), rel=1e-3)


def test_select_pivot_on_dumbbell_cap(neckpinch_run):
    """Test the half-slope point of the round left cap beats the neck maximum."""
    pivot = select_pivot(neckpinch_run)

    assert pivot.rule == "half_slope"
    assert pivot.index < neckpinch_run.final.size // 2
    assert pivot.Q == pytest.approx(6.0, rel=1e-2)


def test_cap_distance_bound_on_dumbbell_cap(neckpinch_run):
    """Test the cap distance from the pivot stays under 2 psi there."""
    pivot = select_pivot(neckpinch_run)

    distance, bound = cap_distance_bound(neckpinch_run.final, pivot.index)

    assert distance == pytest.approx(np.pi / 3.0, abs=0.05)
    assert distance <= bound


# ============================================================================
# Reduced distance
# ============================================================================


@pytest.fixture
def static_run(flat_cylinder, make_run):
    """Static nearly flat run with slices uniform in sigma = 2 sqrt(1 - t)."""
    times = [1.0 - (k / 16.0) ** 2 for k in range(16, -1, -1)]
    snapshots = [
        flat_cylinder.evolve(phi=flat_cylinder.phi, psi=flat_cylinder.psi, t=t) for t in times
    ]
    series = blowup_series(times, lambda t: 1.0e-6)
    return make_run(snapshots, series, termination=Termination.T_MAX)


def test_reduced_distance_flat_limit(static_run):
    """Test l = d^2 / (4 tau) for d = 2, tau = 1 in nearly flat space."""
    value = reduced_distance(static_run, q_index=64, t_m=1.0, tau=1.0, base_index=32)

    assert value == pytest.approx(1.0, abs=1e-5)


def test_reduced_distance_refinement_is_monotone(static_run):
    """Test a finer spatial lattice never increases the bound."""
    coarse = reduced_distance(static_run, q_index=64, t_m=1.0, tau=1.0, base_index=32, stride=8)
    fine = reduced_distance(static_run, q_index=64, t_m=1.0, tau=1.0, base_index=32, stride=1)

    assert fine <= coarse + 1e-12


def test_reduced_distance_insufficient_history(static_run):
    """Test too few slices raise InsufficientHistory."""
    with pytest.raises(InsufficientHistory):
        reduced_distance(static_run, q_index=64, t_m=1.0, tau=1.0, base_index=32, min_slices=30)


def test_reduced_distance_rejects_bad_tau(static_run):
    """Test a non-positive tau is rejected."""
    with pytest.raises(ValueError):
        reduced_distance(static_run, q_index=64, t_m=1.0, tau=0.0)


def test_reduced_distance_needs_snapshot_at_base_time(static_run):
    """Test a base time between snapshots is a configuration error."""
    with pytest.raises(ConfigError) as exc_info:
        reduced_distance(static_run, q_index=64, t_m=0.9, tau=0.5, base_index=32)

    assert exc_info.value.field_path == "t_m"


def test_reduced_distance_on_shrinking_sphere(make_run):
    """Test the pole-to-pole value on a round S^3 with r^2 = 1 - 4t."""
    times = [0.2 - 0.2 * (k / 32.0) ** 2 for k in range(32, -1, -1)]
    snapshots = [round_sphere(2, float(np.sqrt(1.0 - 4.0 * t)), 65, t=t) for t in times]
    flow = make_run(snapshots, blowup_series(times, lambda t: 1.0 / (1.0 - 4.0 * t)))

    value = reduced_distance(flow, q_index=0, t_m=0.2, tau=0.2, base_index=0)

    # l = (1 / (2 sqrt(tau))) int_0^tau 6 sqrt(u) / (0.2 + 4u) du
    assert value == pytest.approx(0.669640, rel=1e-2)
