"""Dumbbell family construction and critical-parameter search.

Builds the alpha-parametrized family of rotationally symmetric dumbbells
in arclength: a left round cap, a curvature blend into a parabolic neck
valley, a second blend and a right round cap. alpha = 1 is mirror
symmetric with a thin neck; alpha = 0 leaves the valley before its
minimum so the right side decreases monotonically to the pole.

Probes run a family member through the flow and the classifier; the
bisection narrows the bracket between the neckpinch side and the
round-point / Type II side.

Author: Odiseo Team
Created: 2025-11-15
Version: 1.0.0
"""

from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from app.config.settings import settings
from app.exceptions import (
    ConfigError,
    ConstraintViolation,
    DegenerateInterior,
    InconsistentEndpoints,
    LabError,
    NonDichotomous,
)
from app.models.config import BisectionConfig
from app.models.diagnostics import ClassifierConfig, Verdict
from app.models.family import (
    BisectionState,
    ConstraintReport,
    FamilyGeometry,
    FamilySpec,
    ProbeResult,
)
from app.models.flow import SolverConfig
from app.models.geometry import Profile
from app.services.diagnostics import classify, detect_features
from app.services.flow_solver import FlowSolver
from app.services.profile_geometry import FloatArray, curvature, derivatives_s
from app.utils.logging import get_logger

logger = get_logger(__name__)

ODE_RTOL = 1e-12
ODE_ATOL = 1e-14
RADIUS_BRACKET_EXPANSIONS = 4

NECKPINCH_SIDE = frozenset({Verdict.TYPE_I_NECKPINCH})
ROUND_SIDE = frozenset({Verdict.ROUND_POINT, Verdict.TYPE_II_CANDIDATE})

Probe = Callable[[float, int], ProbeResult]
Law = Callable[[float], float]


def smoothstep(tau: float) -> float:
    """Quintic blend weight 6t^5 - 15t^4 + 10t^3, clamped to [0, 1]."""
    t = min(max(tau, 0.0), 1.0)
    return t * t * t * (t * (6.0 * t - 15.0) + 10.0)


# ============================================================================
# CONSTRUCTION
# ============================================================================


@dataclass(frozen=True)
class _Layout:
    """Solved segment boundaries with the two blend solutions."""

    geometry: FamilyGeometry
    cap_end: float
    left: Any
    right: Any


class DumbbellBuilder:
    """Arclength construction of one family member.

    psi is C^2 across every junction: each blend moves psi'' from one law
    to the next with a quintic weight, so psi'' stays between the two laws.

    Attributes:
        spec: Family member to build.
        q: Curvature radius of the neck valley.
        delta: Left blend width.
        neck: Valley minimum radius.
    """

    def __init__(self, spec: FamilySpec) -> None:
        self.spec = spec
        shape = spec.shape
        self.a_left = shape.a_left
        self.q = shape.valley_factor * shape.a_left
        self.delta = shape.blend_width * shape.a_left
        self.neck = shape.neck_ratio * shape.a_left

    def _sphere_law(self, radius: float) -> Law:
        return lambda psi: -psi / (radius * radius)

    def _valley_law(self, psi: float) -> float:
        return 1.0 / self.q

    def _blend(
        self, start: float, y0: tuple[float, float], width: float, law_from: Law, law_to: Law
    ) -> Any:
        def rhs(sigma: float, y: FloatArray) -> list[float]:
            mu = smoothstep((sigma - start) / width)
            return [y[1], (1.0 - mu) * law_from(y[0]) + mu * law_to(y[0])]

        return solve_ivp(
            rhs,
            (start, start + width),
            list(y0),
            method="DOP853",
            rtol=ODE_RTOL,
            atol=ODE_ATOL,
            dense_output=True,
        )

    def _left_blend(self, cap_end: float) -> Any:
        a = self.a_left
        start = (a * np.sin(cap_end / a), np.cos(cap_end / a))
        return self._blend(cap_end, start, self.delta, self._sphere_law(a), self._valley_law)

    def _right_blend(
        self, start: float, y0: tuple[float, float], width: float, radius: float
    ) -> Any:
        return self._blend(start, y0, width, self._valley_law, self._sphere_law(radius))

    def _valley_minimum(self, cap_end: float) -> float:
        psi_e, slope_e = self._left_blend(cap_end).y[:, -1]
        return float(psi_e - 0.5 * self.q * slope_e * slope_e)

    def layout(self) -> _Layout:
        """Solve for the segment boundaries and the right cap radius.

        The left cap extent is chosen so the valley bottoms out at the neck
        radius; the right cap radius so the right cap closes with psi_s = -1.

        Raises:
            ConstraintViolation: If either match has no solution.
        """
        a = self.a_left
        try:
            cap_end = brentq(
                lambda s: self._valley_minimum(s) - self.neck,
                0.5 * np.pi * a,
                0.5 * np.pi * a + a,
                xtol=1e-14,
            )
        except ValueError as e:
            raise ConstraintViolation(
                f"no left cap extent gives neck radius {self.neck:.6g}",
                {"layout": "neck radius not reachable"},
            ) from e

        left = self._left_blend(cap_end)
        valley_entry = cap_end + self.delta
        psi_e, slope_e = (float(v) for v in left.y[:, -1])
        reach_c = -self.q * slope_e
        center = valley_entry + reach_c

        reach_min = self.spec.shape.reach_min * reach_c
        reach = reach_min + self.spec.alpha * (2.0 * reach_c - reach_min)
        valley_exit = valley_entry + reach
        psi2 = self.neck + (valley_exit - center) ** 2 / (2.0 * self.q)
        slope2 = (valley_exit - center) / self.q
        width_r = self.delta * min(1.0, psi2 / psi_e)

        def mismatch(radius: float) -> float:
            psi3, slope3 = self._right_blend(valley_exit, (psi2, slope2), width_r, radius).y[:, -1]
            return float(psi3 * psi3 / (radius * radius) + slope3 * slope3 - 1.0)

        guess = psi2 / np.sqrt(1.0 - slope2 * slope2)
        r_lo, r_hi = 0.5 * guess, 2.0 * guess
        for _ in range(RADIUS_BRACKET_EXPANSIONS):
            if mismatch(r_lo) > 0.0 > mismatch(r_hi):
                break
            r_lo, r_hi = 0.5 * r_lo, 2.0 * r_hi
        else:
            raise ConstraintViolation(
                f"right cap radius cannot be matched at alpha={self.spec.alpha}",
                {"layout": "right cap not closable"},
            )
        a_right = float(brentq(mismatch, r_lo, r_hi, xtol=1e-14))

        right = self._right_blend(valley_exit, (psi2, slope2), width_r, a_right)
        right_cap_start = valley_exit + width_r
        psi3, slope3 = (float(v) for v in right.y[:, -1])
        theta = float(np.arctan2(psi3 / a_right, -slope3))

        geometry = FamilyGeometry(
            length=right_cap_start + a_right * theta,
            a_right=a_right,
            neck_radius=self.neck,
            neck_center=center,
            valley_entry=valley_entry,
            valley_exit=valley_exit,
            right_cap_start=right_cap_start,
        )
        return _Layout(geometry=geometry, cap_end=float(cap_end), left=left, right=right)

    def psi_of_sigma(self, sigma: FloatArray, layout: _Layout) -> FloatArray:
        """Evaluate psi at arclengths measured from the left pole."""
        geo = layout.geometry
        a, b = self.a_left, geo.a_right
        psi = np.empty_like(sigma)

        cap_l = sigma <= layout.cap_end
        blend_l = (sigma > layout.cap_end) & (sigma < geo.valley_entry)
        valley = (sigma >= geo.valley_entry) & (sigma <= geo.valley_exit)
        blend_r = (sigma > geo.valley_exit) & (sigma < geo.right_cap_start)
        cap_r = sigma >= geo.right_cap_start

        psi[cap_l] = a * np.sin(sigma[cap_l] / a)
        psi[blend_l] = layout.left.sol(sigma[blend_l])[0]
        psi[valley] = geo.neck_radius + (sigma[valley] - geo.neck_center) ** 2 / (2.0 * self.q)
        psi[blend_r] = layout.right.sol(sigma[blend_r])[0]
        psi[cap_r] = b * np.sin((geo.length - sigma[cap_r]) / b)
        return psi

    def build(self) -> tuple[Profile, FamilyGeometry]:
        """Sample the member on its x grid through sigma = L (x + 1) / 2 (phi = L / 2)."""
        layout = self.layout()
        length = layout.geometry.length
        x = np.linspace(-1.0, 1.0, self.spec.n_grid)
        psi = self.psi_of_sigma(0.5 * (x + 1.0) * length, layout)
        psi[0] = 0.0
        psi[-1] = 0.0
        phi = np.full_like(x, 0.5 * length)
        return Profile(n=self.spec.n, x=x, phi=phi, psi=psi), layout.geometry


def build_initial(spec: FamilySpec, validate: bool = True) -> Profile:
    """Build one family member as a Profile.

    Args:
        spec: Family member.
        validate: Run check_constraints and the thin-neck check at alpha = 1.

    Returns:
        Profile with sphere poles.

    Raises:
        ConstraintViolation: If a family condition fails.
    """
    p, geo = DumbbellBuilder(spec).build()
    logger.debug(
        f"Built dumbbell alpha={spec.alpha:.6g}: length={geo.length:.6g}, "
        f"a_right={geo.a_right:.6g}, neck={geo.neck_radius:.3g}"
    )
    if validate:
        require_constraints(p)
        if spec.alpha == 1.0:
            check_thin_neck(p)
    return p


# ============================================================================
# CONSTRAINTS
# ============================================================================


def check_constraints(p: Profile, gradient_tolerance: float | None = None) -> ConstraintReport:
    """Evaluate the four family conditions on a profile.

    (i) one or two interior bumps, (ii) finitely many zeros of psi_s and
    max |psi_s| <= 1, (iii) psi_ss < 0 across the left cap, (iv) min R > 0.

    Args:
        p: Profile.
        gradient_tolerance: Slack on |psi_s| <= 1 (solver default if omitted).

    Returns:
        ConstraintReport; never raises on a failed condition.
    """
    tol = settings.solver_gradient_tolerance if gradient_tolerance is None else gradient_tolerance
    features = detect_features(p)
    psi_s, _ = derivatives_s(p)
    interior = slice(1, -1) if p.has_poles else slice(None)
    abs_slope = np.abs(psi_s[interior])
    max_slope = float(np.max(abs_slope))
    failures: dict[str, str] = {}

    if features.bump_count not in (1, 2):
        failures["bumps"] = f"{features.bump_count} interior bumps"
    if max_slope > 1.0 + tol:
        where = float(p.x[interior][int(np.argmax(abs_slope))])
        failures["gradient"] = f"max |psi_s| = {max_slope:.9f} at x = {where:.6g}"
    if not features.cap_concavity[0]:
        failures["left_cap"] = "psi_ss >= 0 somewhere on the left cap"

    try:
        R = curvature(p).R
        min_scalar = float(np.min(R))
        if not min_scalar > 0.0:
            where = float(p.x[int(np.argmin(R))])
            failures["scalar"] = f"min R = {min_scalar:.6g} at x = {where:.6g}"
    except DegenerateInterior as e:
        min_scalar = float("-inf")
        failures["scalar"] = f"curvature undefined: {e}"

    return ConstraintReport(
        bump_count=features.bump_count,
        slope_zero_count=features.bump_count + len(features.necks),
        max_abs_slope=max_slope,
        left_cap_concave=features.cap_concavity[0],
        min_scalar=min_scalar,
        failures=failures,
    )


def require_constraints(p: Profile) -> ConstraintReport:
    """check_constraints that raises ConstraintViolation on any failure."""
    report = check_constraints(p)
    if not report.passed:
        names = ", ".join(sorted(report.failures))
        raise ConstraintViolation(f"family conditions failed: {names}", dict(report.failures))
    return report


def check_thin_neck(p: Profile, ratio_max: float | None = None) -> float:
    """r_min / min psi(x_+-) of a two-bump profile, required to be at most ratio_max.

    Raises:
        ConstraintViolation: Without a neck or with a neck that is too thick.
    """
    ratio_max = settings.family_neck_ratio_max if ratio_max is None else ratio_max
    features = detect_features(p)
    if features.r_min is None or features.bump_count < 2:
        raise ConstraintViolation("profile has no neck between two bumps", {"neck": "missing"})
    ratio = features.r_min / min(features.bumps[0].value, features.bumps[-1].value)
    if ratio > ratio_max:
        raise ConstraintViolation(
            f"neck ratio {ratio:.4g} exceeds {ratio_max:.4g}", {"neck": f"ratio {ratio:.6g}"}
        )
    return ratio


def lipschitz_estimate(spec: FamilySpec, alphas: Sequence[float]) -> dict[str, float]:
    """Measured Lipschitz constants of psi and its s-derivatives in alpha.

    Consecutive members (sorted by alpha) are compared in sup norm on the
    common x grid.

    Returns:
        Mapping "psi", "psi_s", "psi_ss", "psi_sss" to max |diff| / |d alpha|.
    """
    ordered = sorted(set(alphas))
    if len(ordered) < 2:
        raise ValueError("at least two distinct alphas are needed")

    def jets(alpha: float) -> list[FloatArray]:
        p = build_initial(spec.with_alpha(alpha), validate=False)
        psi_s, psi_ss = derivatives_s(p)
        psi_sss = np.gradient(psi_ss, p.x, edge_order=2) / p.phi
        return [p.psi, psi_s, psi_ss, psi_sss]

    names = ["psi", "psi_s", "psi_ss", "psi_sss"]
    constants = dict.fromkeys(names, 0.0)
    previous = jets(ordered[0])
    for a0, a1 in zip(ordered[:-1], ordered[1:]):
        current = jets(a1)
        for name, u, v in zip(names, previous, current):
            constants[name] = max(constants[name], float(np.max(np.abs(v - u))) / (a1 - a0))
        previous = current
    return constants


# ============================================================================
# PROBES
# ============================================================================


class FamilyProbe:
    """Verdict of a family member: build, run, classify.

    Attributes:
        family: Template member (alpha and n_grid are overridden per probe).
        solver: Solver configuration (n_grid overridden per probe).
        classifier: Classifier thresholds.
    """

    def __init__(
        self,
        family: FamilySpec,
        solver: SolverConfig,
        classifier: ClassifierConfig | None = None,
    ) -> None:
        self.family = family
        self.solver = solver
        self.classifier = classifier or ClassifierConfig()

    def __call__(self, alpha: float, n_grid: int) -> ProbeResult:
        """Probe one alpha at one resolution; failures become an error result."""
        try:
            p0 = build_initial(self.family.with_alpha(alpha, n_grid))
            cfg = self.solver.model_copy(update={"n_grid": n_grid})
            flow = FlowSolver(cfg).run(p0)
            report = classify(flow, self.classifier)
        except LabError as e:
            logger.warning(f"Probe alpha={alpha:.6g} failed: {e}")
            return ProbeResult(alpha=alpha, n_grid=n_grid, error=str(e))
        result = ProbeResult(
            alpha=alpha,
            verdict=report.verdict,
            max_ratio=report.max_ratio,
            T_est=report.T_est,
            n_grid=n_grid,
        )
        logger.info(f"Probe alpha={alpha:.6g} (grid {n_grid}): {result.verdict_label}")
        return result


class SyntheticProbe:
    """Dichotomy oracle: neckpinch iff alpha > threshold."""

    def __init__(self, threshold: float) -> None:
        self.threshold = threshold

    def __call__(self, alpha: float, n_grid: int) -> ProbeResult:
        verdict = Verdict.TYPE_I_NECKPINCH if alpha > self.threshold else Verdict.ROUND_POINT
        return ProbeResult(alpha=alpha, verdict=verdict, n_grid=n_grid)


# ============================================================================
# BISECTION AND SWEEPS
# ============================================================================


def _resolved(result: ProbeResult) -> bool:
    return result.verdict in NECKPINCH_SIDE or result.verdict in ROUND_SIDE


def bisect_critical(probe: Probe, config: BisectionConfig, n_grid: int) -> BisectionState:
    """Bisect the verdict dichotomy down to the configured bracket width.

    The upper end must be a neckpinch and the lower end a round point or
    Type II candidate. An unresolved probe is re-run at 2 n_grid - 1; if
    it stays unresolved a probe a quarter bracket above is tried instead.

    Args:
        probe: Verdict oracle (FamilyProbe or SyntheticProbe).
        config: Bracket and tolerance.
        n_grid: Base resolution.

    Returns:
        Final BisectionState.

    Raises:
        InconsistentEndpoints: If the endpoint verdicts are not as required.
        NonDichotomous: If a probe stays unresolved after both retries.
    """
    state = BisectionState(
        alpha_lo=config.alpha_lo, alpha_hi=config.alpha_hi, tolerance=config.tolerance
    )
    hi = probe(state.alpha_hi, n_grid)
    lo = probe(state.alpha_lo, n_grid)
    state.probes.extend([hi, lo])
    if hi.verdict not in NECKPINCH_SIDE or lo.verdict not in ROUND_SIDE:
        raise InconsistentEndpoints(
            f"endpoint verdicts alpha={state.alpha_hi}: {hi.verdict_label}, "
            f"alpha={state.alpha_lo}: {lo.verdict_label}"
        )

    while state.width > state.tolerance:
        alpha = 0.5 * (state.alpha_lo + state.alpha_hi)
        result = probe(alpha, n_grid)
        state.probes.append(result)
        if not _resolved(result):
            logger.info(f"Probe alpha={alpha:.6g} unresolved; retrying at grid {2 * n_grid - 1}")
            result = probe(alpha, 2 * n_grid - 1)
            state.probes.append(result)
        if not _resolved(result):
            alpha += 0.25 * state.width
            logger.info(f"Still unresolved; jittering to alpha={alpha:.6g}")
            result = probe(alpha, n_grid)
            state.probes.append(result)
        if not _resolved(result):
            state.anomalies.append(result)
            raise NonDichotomous(
                f"no dichotomous verdict near alpha={alpha:.6g} in "
                f"[{state.alpha_lo:.6g}, {state.alpha_hi:.6g}]",
                state,
            )

        if result.verdict in NECKPINCH_SIDE:
            state.alpha_hi = alpha
        else:
            state.alpha_lo = alpha
        logger.info(f"Bracket now [{state.alpha_lo:.9g}, {state.alpha_hi:.9g}]")
    return state


def sweep(
    probe: Probe,
    alphas: Sequence[float],
    n_grid: int,
    max_workers: int | None = None,
) -> list[ProbeResult]:
    """Probe several alphas concurrently.

    Args:
        probe: Verdict oracle.
        alphas: Parameters to probe; duplicates are dropped with a warning.
        n_grid: Resolution.
        max_workers: Thread pool size (settings default if omitted).

    Returns:
        Probe results sorted by alpha; failed probes carry an error.

    Raises:
        ConfigError: If fewer than two distinct alphas are given.
    """
    unique = sorted(set(alphas))
    if len(unique) < 2:
        raise ConfigError(
            f"sweep needs at least two distinct alphas, got {len(unique)}",
            field_path="sweep.alphas",
        )
    if len(unique) < len(alphas):
        logger.warning(f"Dropped {len(alphas) - len(unique)} duplicate alphas from the sweep")

    workers = max_workers or settings.sweep_max_workers
    logger.info(f"Sweep started: {len(unique)} alphas on {workers} workers")

    def guarded(alpha: float) -> ProbeResult:
        try:
            return probe(alpha, n_grid)
        except (LabError, ValueError) as e:
            logger.warning(f"Probe alpha={alpha:.6g} raised: {e}")
            return ProbeResult(alpha=alpha, n_grid=n_grid, error=str(e))

    with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="probe") as pool:
        results = list(pool.map(guarded, unique))
    return results
