"""Run diagnostics.

Extracts the neck/bump structure of a profile, extrapolates the blow-up
time of a run, classifies the singularity, rescales the blow-up around a
pivot and estimates the reduced distance along radial paths.

All functions are pure reads of immutable profiles and runs.

Author: Odiseo Team
Created: 2025-11-14
Version: 1.0.0
"""

from collections.abc import Sequence

import numpy as np
from scipy.stats import linregress

from app.config.settings import settings
from app.exceptions import (
    ConfigError,
    DegenerateInterior,
    InsufficientHistory,
    NotBlowingUp,
    PivotNotFound,
)
from app.models.diagnostics import (
    BlowupEstimate,
    BlowupPivot,
    ClassifierConfig,
    Evidence,
    Feature,
    NeckBumpReport,
    RescaledBlowup,
    SingularityReport,
    Verdict,
)
from app.models.flow import FlowRun, SeriesRecord, Termination
from app.models.geometry import Profile
from app.services.profile_geometry import (
    FloatArray,
    arclength,
    curvature,
    derivatives_s,
    total_length,
)
from app.utils.logging import get_logger

logger = get_logger(__name__)

# Relative size below which a difference of psi counts as flat.
FLAT_TOLERANCE = 1e-13
HALF_SLOPE = 0.5


# ============================================================================
# NECKS AND BUMPS
# ============================================================================


def find_extrema(x: FloatArray, values: FloatArray) -> tuple[list[Feature], list[Feature]]:
    """Interior local maxima and minima of sampled values.

    Sign changes of the forward differences locate the extrema; runs of
    flat differences between two signed ones collapse into one feature at
    the plateau midpoint.

    Args:
        x: Sample positions (increasing).
        values: Sampled values.

    Returns:
        Tuple (maxima, minima), each left to right.

    Examples:
        >>> x = np.linspace(-1.0, 1.0, 9)
        >>> psi = np.array([0, .5, .9, .6, .4, .6, .9, .5, 0])
        >>> maxima, minima = find_extrema(x, psi)
        >>> [f.index for f in maxima], [f.index for f in minima]
        ([2, 6], [4])
    """
    diff = np.diff(values)
    scale = float(np.max(np.abs(values))) or 1.0
    signs = np.where(np.abs(diff) <= FLAT_TOLERANCE * scale, 0, np.sign(diff)).astype(int)
    signed = np.flatnonzero(signs)

    maxima: list[Feature] = []
    minima: list[Feature] = []
    for a, b in zip(signed[:-1], signed[1:]):
        if signs[a] == signs[b]:
            continue
        # Nodes a+1 .. b form the (possibly one-point) plateau.
        first, last = int(a) + 1, int(b)
        mid = (first + last) // 2
        feature = Feature(
            index=mid,
            x=0.5 * float(x[first] + x[last]),
            value=float(values[mid]),
        )
        (maxima if signs[a] > 0 else minima).append(feature)
    return maxima, minima


def detect_features(p: Profile) -> NeckBumpReport:
    """Necks, bumps and polar cap concavity of a profile.

    Args:
        p: Profile.

    Returns:
        NeckBumpReport. Interval profiles report no caps.
    """
    bumps, necks = find_extrema(p.x, p.psi)
    r_min = min((neck.value for neck in necks), default=None)

    concavity = (False, False)
    if p.has_poles and bumps:
        _, psi_ss = derivatives_s(p)
        left = psi_ss[1 : bumps[0].index]
        right = psi_ss[bumps[-1].index + 1 : -1]
        concavity = (bool(np.all(left < 0.0)), bool(np.all(right < 0.0)))

    return NeckBumpReport(
        bumps=bumps,
        necks=necks,
        r_min=r_min,
        x_plus=bumps[-1].x if bumps else None,
        x_minus=bumps[0].x if bumps else None,
        cap_concavity=concavity,
    )


# ============================================================================
# BLOW-UP TIME
# ============================================================================


def estimate_T(
    series: Sequence[SeriesRecord], config: ClassifierConfig | None = None
) -> BlowupEstimate:
    """Extrapolate the maximal time from a linear fit of 1/K_max.

    The fit window is the trailing stretch with K_max within one
    ``fit_decade`` of its last value, extended back to ``min_fit_records``
    records when shorter.

    Args:
        series: Run records in time order.
        config: Classifier thresholds (defaults from settings).

    Returns:
        BlowupEstimate with T_est strictly after the last record.

    Raises:
        NotBlowingUp: If there are too few records, K_max is not strictly
            increasing over the window or 1/K_max is not decreasing.
    """
    cfg = config or ClassifierConfig()
    t = np.array([r.t for r in series], dtype=np.float64)
    k = np.array([r.k_max for r in series], dtype=np.float64)
    if len(series) < cfg.min_fit_records:
        raise NotBlowingUp(
            f"{len(series)} records, at least {cfg.min_fit_records} needed for a blow-up fit"
        )
    if not np.all(np.isfinite(k)) or np.any(k <= 0.0):
        raise NotBlowingUp("K_max must be finite and positive over the series")

    in_decade = np.flatnonzero(k < k[-1] / cfg.fit_decade)
    start = int(in_decade[-1]) + 1 if in_decade.size else 0
    start = min(start, len(series) - cfg.min_fit_records)
    t_win, k_win = t[start:], k[start:]

    if not np.all(np.diff(k_win) > 0.0):
        raise NotBlowingUp(
            f"K_max is not monotone over the fit window starting at t={t_win[0]:.9g}"
        )

    inv_k = 1.0 / k_win
    fit = linregress(t_win, inv_k)
    slope = float(fit.slope)
    if not slope < 0.0:
        raise NotBlowingUp(f"1/K_max is not decreasing (slope {slope:.3e})")

    T_est = -float(fit.intercept) / slope
    if T_est <= t_win[-1]:
        # Fall back to extrapolating from the last record with the fitted rate.
        T_est = float(t_win[-1] + inv_k[-1] / -slope)
        logger.debug(f"Fitted root precedes the last record; using local extrapolation {T_est:.9g}")

    residuals = inv_k - (fit.intercept + slope * t_win)
    width = float(np.max(np.abs(residuals)) / -slope)
    return BlowupEstimate(T_est=T_est, width=width, window_start=start, n_points=len(t_win))


def blowup_window(series: Sequence[SeriesRecord], min_records: int) -> int:
    """Index of the first record after K_max first exceeds twice its initial value."""
    k0 = series[0].k_max
    for i, record in enumerate(series):
        if record.k_max > 2.0 * k0:
            break
    else:
        return 0
    if len(series) - i < min_records:
        return 0
    return i


def ratio_series(
    series: Sequence[SeriesRecord], T_est: float, start: int = 0
) -> list[tuple[float, float]]:
    """(t, (T_est - t) K_max(t)) for the records from ``start`` on."""
    return [(r.t, (T_est - r.t) * r.k_max) for r in series[start:]]


# ============================================================================
# CLASSIFICATION
# ============================================================================


def _sine_profile_error(p: Profile) -> float | None:
    """Sup of |psi pi/L - sin(pi s/L)| for a profile with poles."""
    if not p.has_poles:
        return None
    s = arclength(p)
    s = s - s[0]
    length = total_length(p)
    return float(np.max(np.abs(p.psi * np.pi / length - np.sin(np.pi * s / length))))


def _curvature_ratio(p: Profile) -> float | None:
    """min(K0, K1) / max(K0, K1) over the grid, or None if the curvature fails."""
    try:
        field = curvature(p)
    except DegenerateInterior:
        return None
    high = float(max(np.max(field.K0), np.max(field.K1)))
    low = float(min(np.min(field.K0), np.min(field.K1)))
    if high <= 0.0:
        return None
    return low / high


def _last_defined(values: Sequence[float | None]) -> float | None:
    return next((v for v in reversed(values) if v is not None), None)


def _ratio(final: float | None, initial: float | None) -> float | None:
    if final is None or initial is None or initial <= 0.0:
        return None
    return final / initial


def classify(
    run: FlowRun,
    config: ClassifierConfig | None = None,
    t_est: float | None = None,
) -> SingularityReport:
    """Classify the singularity a run develops.

    Rules, in order:

    * round_point: the last state has curvature ratio within
      ``round_tolerance`` of 1 and matches the normalized sine profile to
      ``profile_tolerance``;
    * type_I_neckpinch: r_min fell below ``neck_collapse_ratio`` of its
      initial value, both psi(x_+-) kept ``cap_retention`` of theirs and rho
      stayed below ratio_cap;
    * type_II_candidate: the last rho exceeds ratio_cap and is still rising;
    * unresolved otherwise.

    ratio_cap is ``ratio_cap_factor`` times the median of rho over the
    first half of the blow-up window.

    Args:
        run: Flow run, normally terminated by the curvature cap.
        config: Classifier thresholds (defaults from settings).
        t_est: Known blow-up time; replaces the fitted estimate.

    Returns:
        SingularityReport. Fit failures yield an unresolved verdict.
    """
    cfg = config or ClassifierConfig()
    series = run.series
    evidence: dict[str, object] = {}

    if run.termination not in (Termination.CURVATURE_CAP, Termination.DEGENERATE_INTERIOR):
        note = f"run terminated by {run.termination.value}; no blow-up resolved"
        logger.info(f"Classification unresolved: {note}")
        return SingularityReport(evidence=Evidence(note=note), thresholds=cfg)

    width: float | None
    if t_est is not None:
        if t_est <= series[-1].t:
            raise ValueError(f"t_est={t_est} must exceed the last recorded time {series[-1].t}")
        T, width = t_est, 0.0
    else:
        try:
            estimate = estimate_T(series, cfg)
        except NotBlowingUp as e:
            logger.info(f"Classification unresolved: {e}")
            return SingularityReport(evidence=Evidence(note=str(e)), thresholds=cfg)
        T, width = estimate.T_est, estimate.width

    start = blowup_window(series, cfg.min_fit_records)
    rho_pairs = ratio_series(series, T, start)
    rho = np.array([r for _, r in rho_pairs])
    half = max(len(rho) // 2, 1)
    ratio_cap = cfg.ratio_cap_factor * float(np.median(rho[:half]))
    increasing = bool(len(rho) >= 2 and rho[-1] > rho[-2])

    r_min_values = [r.r_min for r in series]
    r_min_initial = series[0].r_min
    r_min_final = _last_defined(r_min_values)
    plus_initial = series[0].psi_x_plus
    minus_initial = series[0].psi_x_minus
    plus_final = _last_defined([r.psi_x_plus for r in series])
    minus_final = _last_defined([r.psi_x_minus for r in series])

    final = run.final
    curvature_ratio = _curvature_ratio(final)
    sine_error = _sine_profile_error(final)
    cylinder_error: float | None = None
    if run.termination is Termination.CURVATURE_CAP:
        cylinder_error = neck_cylinder_score(final, cfg.cylinder_window)

    evidence.update(
        r_min_initial=r_min_initial,
        r_min_final=r_min_final,
        r_min_ratio=_ratio(r_min_final, r_min_initial),
        psi_x_plus_initial=plus_initial,
        psi_x_plus_final=plus_final,
        psi_x_minus_initial=minus_initial,
        psi_x_minus_final=minus_final,
        D=minus_final,
        curvature_ratio=curvature_ratio,
        sine_profile_error=sine_error,
        ratio_cap=ratio_cap,
        ratio_max=float(np.max(rho)),
        ratio_last=float(rho[-1]),
        ratio_increasing=increasing,
        neck_cylinder_error=cylinder_error,
    )

    neck_ratio = _ratio(r_min_final, r_min_initial)
    plus_kept = _ratio(plus_final, plus_initial)
    minus_kept = _ratio(minus_final, minus_initial)

    if (
        curvature_ratio is not None
        and curvature_ratio >= 1.0 - cfg.round_tolerance
        and sine_error is not None
        and sine_error <= cfg.profile_tolerance
    ):
        verdict = Verdict.ROUND_POINT
    elif (
        neck_ratio is not None
        and neck_ratio < cfg.neck_collapse_ratio
        and plus_kept is not None
        and minus_kept is not None
        and min(plus_kept, minus_kept) >= cfg.cap_retention
        and float(np.max(rho)) <= ratio_cap
    ):
        verdict = Verdict.TYPE_I_NECKPINCH
    elif float(rho[-1]) > ratio_cap and increasing:
        verdict = Verdict.TYPE_II_CANDIDATE
    else:
        verdict = Verdict.UNRESOLVED

    logger.info(
        f"Classified run: verdict={verdict.value}, T_est={T:.9g}, "
        f"rho_max={float(np.max(rho)):.4g}, ratio_cap={ratio_cap:.4g}"
    )
    return SingularityReport(
        T_est=T,
        T_width=width,
        ratio_series=rho_pairs,
        verdict=verdict,
        evidence=Evidence.model_validate(evidence),
        thresholds=cfg,
    )


def ratio_cap_sensitivity(
    run: FlowRun,
    factors: Sequence[float] = (5.0, 10.0, 20.0),
    config: ClassifierConfig | None = None,
) -> dict[float, Verdict]:
    """Verdicts of the same run under several ratio_cap factors."""
    cfg = config or ClassifierConfig()
    return {
        factor: classify(run, cfg.model_copy(update={"ratio_cap_factor": factor})).verdict
        for factor in factors
    }


# ============================================================================
# BLOW-UP RESCALING
# ============================================================================


def select_pivot(run: FlowRun, snapshot: int = -1) -> BlowupPivot:
    """Choose the normalization point of a blow-up snapshot.

    The pivot is the scalar-curvature maximum, unless the grid point where
    psi_s crosses -+1/2 nearest the pole on that side is closer to the pole.

    Args:
        run: Flow run.
        snapshot: Snapshot index (negative counts from the end).

    Returns:
        BlowupPivot with Q = R at the pivot.

    Raises:
        PivotNotFound: Without poles, without a half-slope crossing on the
            cap or when R is not positive at the pivot.
    """
    k = snapshot % len(run.snapshots)
    p = run.snapshots[k]
    if not p.has_poles:
        raise PivotNotFound("pivot selection needs a profile with poles")

    field = curvature(p)
    psi_s, _ = derivatives_s(p)
    i_max = int(np.argmax(field.R))
    last = p.size - 1
    right_side = i_max > last // 2

    if right_side:
        # Walking in from the right pole psi_s rises from -1.
        crossings = np.flatnonzero(psi_s[: last] >= -HALF_SLOPE)
        if crossings.size == 0:
            raise PivotNotFound("no psi_s = -1/2 crossing on the right cap")
        j = int(crossings[-1])
        if j + 1 <= last and abs(psi_s[j + 1] + HALF_SLOPE) < abs(psi_s[j] + HALF_SLOPE):
            j += 1
        closer = j > i_max
    else:
        crossings = np.flatnonzero(psi_s[1:] <= HALF_SLOPE) + 1
        if crossings.size == 0:
            raise PivotNotFound("no psi_s = 1/2 crossing on the left cap")
        j = int(crossings[0])
        if j - 1 >= 0 and abs(psi_s[j - 1] - HALF_SLOPE) < abs(psi_s[j] - HALF_SLOPE):
            j -= 1
        closer = j < i_max

    index, rule = (j, "half_slope") if closer else (i_max, "curvature_max")
    Q = float(field.R[index])
    if not Q > 0.0:
        raise PivotNotFound(f"scalar curvature {Q:.6g} at pivot index {index} is not positive")
    return BlowupPivot(snapshot=k, index=index, t=p.t, Q=Q, rule=rule)


def rescale_blowup(run: FlowRun, pivot: BlowupPivot | None = None) -> RescaledBlowup:
    """Parabolically rescale every snapshot around a pivot.

    Lengths scale by sqrt(Q) and time becomes Q (t - t_m).

    Args:
        run: Flow run.
        pivot: Normalization point; selected from the last snapshot when omitted.

    Returns:
        RescaledBlowup.

    Raises:
        PivotNotFound: If the pivot snapshot is not part of the run or no
            pivot can be selected.
    """
    if pivot is None:
        pivot = select_pivot(run)
    if pivot.snapshot >= len(run.snapshots):
        raise PivotNotFound(f"pivot snapshot {pivot.snapshot} outside the run")
    factor = float(np.sqrt(pivot.Q))
    profiles = [p.scaled(factor, time_origin=pivot.t) for p in run.snapshots]
    return RescaledBlowup(pivot=pivot, profiles=profiles)


def neck_cylinder_score(p: Profile, window: float | None = None) -> float | None:
    """Relative sup deviation of psi from the cylinder matching R at the neck.

    The cylinder radius is sqrt(n(n-1)/R(neck)); the comparison window is
    ``window`` rescaled lengths 1/sqrt(R(neck)) long and centered at the
    thinnest neck.

    Returns:
        The deviation, or None without a neck or with R <= 0 there.
    """
    window = settings.classify_cylinder_window if window is None else window
    report = detect_features(p)
    if not report.necks:
        return None
    neck = min(report.necks, key=lambda f: f.value)
    try:
        field = curvature(p)
    except DegenerateInterior:
        return None
    R = float(field.R[neck.index])
    if not R > 0.0:
        return None
    radius = float(np.sqrt(p.n * (p.n - 1) / R))
    s = arclength(p)
    inside = np.abs(s - s[neck.index]) <= 0.5 * window / np.sqrt(R)
    return float(np.max(np.abs(p.psi[inside] / radius - 1.0)))


def cap_distance_bound(p: Profile, index: int) -> tuple[float, float]:
    """Largest cap distance from a point against the bound 2 psi(point).

    Walks from ``index`` toward the nearer pole while |psi_s| >= 1/2 and
    returns (largest distance reached, 2 psi(index)).
    """
    s = arclength(p)
    psi_s, _ = derivatives_s(p)
    step = 1 if index > (p.size - 1) // 2 else -1
    j = index
    while 0 < j < p.size - 1 and abs(psi_s[j + step]) >= HALF_SLOPE:
        j += step
    return float(abs(s[j] - s[index])), 2.0 * float(p.psi[index])


# ============================================================================
# REDUCED DISTANCE
# ============================================================================


def reduced_distance(
    run: FlowRun,
    q_index: int,
    t_m: float,
    tau: float,
    base_index: int = 0,
    stride: int = 1,
    min_slices: int | None = None,
) -> float:
    """Reduced distance l(q, tau) from a base point along radial lattice paths.

    Paths run backward in time from ``base_index`` at t_m to ``q_index`` at
    t_m - tau through the run snapshots, piecewise linear in
    sigma = 2 sqrt(t_m - t). Each segment costs
    d^2 / (sigma_b - sigma_a) + R_avg (2/3)(b^{3/2} - a^{3/2}), d measured
    with the averaged arclength of its two slices. The minimum over the
    lattice is an upper bound that decreases under refinement.

    Args:
        run: Flow run whose snapshots cover [t_m - tau, t_m].
        q_index: Grid index of the end point.
        t_m: Base time.
        tau: Backward time span (positive).
        base_index: Grid index of the base point (a pole by default).
        stride: Spatial lattice subsampling; base and end are always kept.
        min_slices: Fewest time slices accepted.

    Returns:
        l = L / (2 sqrt(tau)).

    Raises:
        InsufficientHistory: If the snapshots do not cover the interval
            with enough slices.
        ConfigError: If no snapshot sits at t_m.
        ValueError: On a non-positive tau or stride.
    """
    if not tau > 0.0 or stride < 1:
        raise ValueError("tau and stride must be positive")
    min_slices = settings.reduced_distance_min_slices if min_slices is None else min_slices
    eps = 1e-12 * max(abs(t_m), tau, 1.0)

    slices = [p for p in run.snapshots if t_m - tau - eps <= p.t <= t_m + eps]
    if slices and abs(slices[-1].t - t_m) > eps:
        raise ConfigError(
            f"no snapshot at t_m={t_m:.9g} (latest before it at t={slices[-1].t:.9g})",
            field_path="t_m",
        )
    if len(slices) < min_slices:
        raise InsufficientHistory(
            f"{len(slices)} snapshots in [{t_m - tau:.9g}, {t_m:.9g}], need {min_slices}"
        )
    if slices[0].t > t_m - tau + eps:
        raise InsufficientHistory(f"snapshots start at t={slices[0].t:.9g}, after t_m - tau")
    slices.reverse()

    size = slices[0].size
    nodes = np.union1d(np.arange(0, size, stride), [base_index, q_index]).astype(int)
    base = int(np.searchsorted(nodes, base_index))
    target = int(np.searchsorted(nodes, q_index))

    tau_bar = np.array([max(t_m - p.t, 0.0) for p in slices])
    sigma = 2.0 * np.sqrt(tau_bar)
    s_nodes = [arclength(p)[nodes] for p in slices]
    r_nodes = [curvature(p).R[nodes] for p in slices]

    cost = np.full(nodes.size, np.inf)
    cost[base] = 0.0
    for k in range(len(slices) - 1):
        a, b = tau_bar[k], tau_bar[k + 1]
        d_sigma = sigma[k + 1] - sigma[k]
        if d_sigma <= 0.0:
            continue
        s_avg = 0.5 * (s_nodes[k] + s_nodes[k + 1])
        d = s_avg[None, :] - s_avg[:, None]
        r_avg = 0.5 * (r_nodes[k][:, None] + r_nodes[k + 1][None, :])
        segment = d * d / d_sigma + r_avg * (2.0 / 3.0) * (b**1.5 - a**1.5)
        cost = np.min(cost[:, None] + segment, axis=0)

    L = float(cost[target])
    logger.debug(f"Reduced distance over {len(slices)} slices and {nodes.size} nodes: L={L:.6g}")
    return L / (2.0 * np.sqrt(tau_bar[-1]))
