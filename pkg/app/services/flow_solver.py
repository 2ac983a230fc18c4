"""Rotationally symmetric Ricci flow solver.

Evolves both warping functions of g = phi^2 dx^2 + psi^2 g_can in the
fixed x coordinate:

    phi_t = n (psi_ss / psi) phi
    psi_t = psi_ss - (n - 1)(1 - psi_s^2) / psi

with explicit RK4 steps, step rejection guarding psi > 0 and |psi_s| <= 1,
pole-regular closure (psi pinned at 0, K1 = K0 next to the poles, the
phi equation using the extrapolated pole K0, phi reset after each step
so that |psi_s| = 1 at the poles) and fourth-difference damping of phi.

Author: Odiseo Team
Created: 2025-11-12
Version: 1.0.0
"""

from dataclasses import dataclass

import numpy as np
from pydantic import ValidationError

from app.config.settings import settings
from app.exceptions import DegenerateInterior, DtFloor, LabError
from app.models.flow import FlowRun, SeriesRecord, SolverConfig, Termination
from app.models.geometry import BoundaryMode, Profile
from app.services.profile_geometry import (
    FloatArray,
    extend,
    fourth_difference,
    pole_slope_x,
    resample_arclength,
    s_derivatives,
    sectional_curvatures,
)
from app.services.run_monitor import InvariantMonitor
from app.utils.logging import get_logger

logger = get_logger(__name__)

# Classical RK4: stage coefficients and weights.
BUTCHER_TABLE: dict[int, list[float]] = {
    0: [1 / 2],
    1: [0.0, 1 / 2],
    2: [0.0, 0.0, 1.0],
}
WEIGHTS = [1 / 6, 1 / 3, 1 / 3, 1 / 6]


@dataclass(frozen=True)
class _Slope:
    """Time derivative of the state at one RK stage."""

    phi_t: FloatArray
    psi_t: FloatArray
    rm_max: float


def _slope(
    phi: FloatArray,
    psi: FloatArray,
    n: int,
    h: float,
    mode: BoundaryMode,
    psi_floor: float,
    dissipation: float = 0.0,
) -> _Slope:
    """Evaluate the flow equations on raw arrays.

    ``dissipation`` adds -dissipation * D4(phi) / ds^2 to phi_t, D4 the
    undivided fourth difference and ds = phi h the local spacing. It damps
    the odd-even mode of phi, which central stencils of psi do not see,
    and is O(h^2) on smooth phi.
    """
    has_poles = mode is BoundaryMode.SPHERE_POLES
    psi_s, psi_ss = s_derivatives(phi, psi, h, mode)
    K0, K1 = sectional_curvatures(psi, psi_s, psi_ss, has_poles, psi_floor)
    psi_t = -psi * K0 - (n - 1) * psi * K1
    if has_poles:
        psi_t[0] = 0.0
        psi_t[-1] = 0.0
    phi_t = -n * K0 * phi
    if dissipation:
        phi_t -= dissipation * fourth_difference(extend(phi, mode)) / (phi * h) ** 2
    rm_max = float(max(np.max(np.abs(K0)), np.max(np.abs(K1))))
    return _Slope(phi_t=phi_t, psi_t=psi_t, rm_max=rm_max)


class FlowSolver:
    """Explicit RK4 integrator for the rotationally symmetric flow.

    A solver holds no state between runs; each run gets its own monitor.

    Attributes:
        config: Solver configuration.

    Example:
        >>> solver = FlowSolver(SolverConfig(n_grid=129, k_stop=1e3))
        >>> flow = solver.run(round_sphere(2, 1.0, 129))
        >>> flow.termination
        <Termination.CURVATURE_CAP: 'curvature_cap'>
    """

    def __init__(self, config: SolverConfig) -> None:
        self.config = config

    # ------------------------------------------------------------------
    # Time stepping
    # ------------------------------------------------------------------

    def stable_dt(self, phi: FloatArray, h: float, rm_max: float) -> float:
        """Step size from the diffusion limit and the curvature time scale."""
        cfg = self.config
        h_min = float(np.min(phi)) * h
        dt = cfg.cfl_safety * h_min * h_min / 2.0
        if rm_max > 0.0:
            dt = min(dt, cfg.reaction_factor * cfg.cfl_safety / rm_max)
        return dt

    def _rk4(
        self, p: Profile, first: _Slope, dt: float, psi_floor: float
    ) -> tuple[FloatArray, FloatArray]:
        """Classical RK4 candidate from the current state."""
        slopes = [first]
        for coeffs in BUTCHER_TABLE.values():
            phi_stage = p.phi.copy()
            psi_stage = p.psi.copy()
            for c, k in zip(coeffs, slopes):
                if c:
                    phi_stage += dt * c * k.phi_t
                    psi_stage += dt * c * k.psi_t
            slopes.append(
                _slope(
                    phi_stage,
                    psi_stage,
                    p.n,
                    p.dx,
                    p.boundary_mode,
                    psi_floor,
                    self.config.dissipation,
                )
            )

        phi_new = p.phi.copy()
        psi_new = p.psi.copy()
        for w, k in zip(WEIGHTS, slopes):
            phi_new += dt * w * k.phi_t
            psi_new += dt * w * k.psi_t
        return phi_new, psi_new

    def _close(self, p: Profile, phi: FloatArray, psi: FloatArray) -> None:
        """Re-impose the end closure on a candidate state in place."""
        if p.boundary_mode is BoundaryMode.SPHERE_POLES:
            psi[0] = 0.0
            psi[-1] = 0.0
            left, right = pole_slope_x(psi, p.dx)
            phi[0] = left
            phi[-1] = right
        elif p.boundary_mode is BoundaryMode.INTERVAL_PERIODIC:
            psi[-1] = psi[0]
            phi[-1] = phi[0]

    def _rejection(
        self, p: Profile, phi: FloatArray, psi: FloatArray, check_gradient: bool
    ) -> str | None:
        """Reason a candidate state is unacceptable, or None."""
        if not (np.all(np.isfinite(phi)) and np.all(np.isfinite(psi))):
            return "non-finite values"
        if np.any(phi <= 0.0):
            return "phi <= 0"
        inner = slice(1, -1) if p.has_poles else slice(None)
        if np.any(psi[inner] <= 0.0):
            return "interior psi <= 0"
        if check_gradient:
            psi_s, _ = s_derivatives(phi, psi, p.dx, p.boundary_mode)
            grad = float(np.max(np.abs(psi_s[inner])))
            if grad > 1.0 + self.config.gradient_tolerance:
                return f"|psi_s| = {grad:.9f} exceeds 1"
        return None

    def advance(
        self,
        p: Profile,
        psi_floor: float,
        t_limit: float,
        check_gradient: bool = True,
    ) -> tuple[Profile, float, int]:
        """Take one accepted step, halving dt on rejection.

        Args:
            p: Current profile.
            psi_floor: Smallest admissible interior psi.
            t_limit: The step never goes past this time.
            check_gradient: Reject candidates with |psi_s| > 1 + tolerance.

        Returns:
            Tuple (new profile, dt used, number of rejections).

        Raises:
            DegenerateInterior: If the current state is degenerate.
            DtFloor: If dt falls below the floor or rejections run out.
        """
        cfg = self.config
        first = _slope(p.phi, p.psi, p.n, p.dx, p.boundary_mode, psi_floor, cfg.dissipation)
        dt = min(self.stable_dt(p.phi, p.dx, first.rm_max), t_limit - p.t)
        t_scale = 1.0 / first.rm_max if first.rm_max > 0.0 else (float(np.min(p.phi)) * p.dx) ** 2
        dt_floor = settings.solver_dt_floor_factor * t_scale

        for attempt in range(cfg.max_rejections + 1):
            if attempt > 0 and dt < dt_floor:
                raise DtFloor(f"dt={dt:.3e} below floor {dt_floor:.3e} at t={p.t:.9g}")
            reason: str | None
            try:
                phi_new, psi_new = self._rk4(p, first, dt, psi_floor)
                self._close(p, phi_new, psi_new)
                reason = self._rejection(p, phi_new, psi_new, check_gradient)
            except DegenerateInterior as e:
                reason = f"degenerate stage ({e})"
            if reason is None:
                t_new = p.t + dt
                if np.isfinite(t_limit) and t_limit - t_new <= 1e-14 * max(abs(t_limit), 1.0):
                    t_new = t_limit
                try:
                    return p.evolve(phi=phi_new, psi=psi_new, t=t_new), dt, attempt
                except ValidationError as e:
                    reason = f"invalid profile ({e.error_count()} errors)"
            logger.debug(f"Step rejected at t={p.t:.9g} (dt={dt:.3e}): {reason}")
            dt *= 0.5
        raise DtFloor(f"{cfg.max_rejections} consecutive rejections at t={p.t:.9g}")

    def step(self, p: Profile) -> Profile:
        """One accepted step of the flow (see advance)."""
        psi_floor = settings.solver_psi_floor_factor * float(np.max(p.psi))
        new, _, _ = self.advance(p, psi_floor, t_limit=np.inf)
        return new

    # ------------------------------------------------------------------
    # Runs
    # ------------------------------------------------------------------

    def run(self, p0: Profile) -> FlowRun:
        """Integrate until the curvature cap, t_max, dt floor or a degenerate interior.

        Solver errors end the run and are recorded in its termination; they
        are never raised.

        Args:
            p0: Initial profile.

        Returns:
            FlowRun with snapshots, per-step series and monitor summary.
        """
        cfg = self.config
        psi_floor = settings.solver_psi_floor_factor * float(np.max(p0.psi))
        logger.info(
            f"Flow run started: n={p0.n}, grid={p0.size}, mode={p0.boundary_mode.value}, "
            f"k_stop={cfg.k_stop:.3g}, t_max={cfg.t_max:.6g}"
        )

        monitor = InvariantMonitor(gradient_tolerance=cfg.gradient_tolerance, psi_floor=psi_floor)
        snapshots = [p0]
        series: list[SeriesRecord] = []
        steps = 0
        rejections = 0
        p = p0
        message = ""

        try:
            record = monitor.observe(p0, dt=0.0)
        except DegenerateInterior as e:
            logger.warning(f"Initial profile is degenerate: {e}")
            return FlowRun(
                config=cfg,
                snapshots=snapshots,
                series=[_bare_record(p0)],
                termination=Termination.DEGENERATE_INTERIOR,
                message=str(e),
                monitors=monitor.report(),
            )
        series.append(record)

        while True:
            if record.k_max >= cfg.k_stop:
                termination = Termination.CURVATURE_CAP
                message = f"max |Rm| = {record.k_max:.6g} reached cap {cfg.k_stop:.3g}"
                break
            if p.t >= cfg.t_max:
                termination = Termination.T_MAX
                message = f"reached t_max = {cfg.t_max:.9g}"
                break
            try:
                p, dt, rejected = self.advance(
                    p, psi_floor, cfg.t_max, check_gradient=monitor.enforces_gradient
                )
                rejections += rejected
                steps += 1
                if cfg.resample_every and steps % cfg.resample_every == 0:
                    p = resample_arclength(p)
                record = monitor.observe(p, dt=dt)
            except DtFloor as e:
                termination = Termination.DT_FLOOR
                message = str(e)
                break
            except DegenerateInterior as e:
                termination = Termination.DEGENERATE_INTERIOR
                message = str(e)
                break
            except LabError as e:
                logger.exception(f"Unexpected solver error at t={p.t:.9g}: {e}")
                termination = Termination.SOLVER_ERROR
                message = f"{type(e).__name__}: {e}"
                break
            series.append(record)
            if steps % cfg.snapshot_stride == 0:
                snapshots.append(p)

        if snapshots[-1] is not p:
            snapshots.append(p)

        flow = FlowRun(
            config=cfg,
            snapshots=snapshots,
            series=series,
            termination=termination,
            message=message,
            monitors=monitor.report(),
            steps=steps,
            rejections=rejections,
        )
        if flow.monitors.violations:
            logger.warning(
                f"Invariant violations during run: {len(flow.monitors.violations)} "
                f"(first: {flow.monitors.violations[0]})"
            )
        logger.info(
            f"Flow run finished: termination={termination.value}, t={p.t:.9g}, "
            f"steps={steps}, rejections={rejections}, k_max={series[-1].k_max:.6g}"
        )
        return flow


def _bare_record(p: Profile) -> SeriesRecord:
    """Series record for a profile whose curvature cannot be evaluated."""
    return SeriesRecord(t=p.t, k_max=float("inf"), psi_min=float(np.min(p.psi)))


# ============================================================================
# FUNCTIONAL API
# ============================================================================


def rhs(
    p: Profile, psi_floor: float | None = None, dissipation: float | None = None
) -> tuple[FloatArray, FloatArray]:
    """Time derivatives (phi_t, psi_t) of a profile.

    Raises:
        DegenerateInterior: If an interior psi is at or below the floor.
    """
    if psi_floor is None:
        psi_floor = settings.solver_psi_floor_factor * float(np.max(p.psi))
    if dissipation is None:
        dissipation = settings.solver_dissipation
    slope = _slope(p.phi, p.psi, p.n, p.dx, p.boundary_mode, psi_floor, dissipation)
    return slope.phi_t, slope.psi_t


def step(p: Profile, cfg: SolverConfig) -> Profile:
    """One accepted RK4 step of the flow."""
    return FlowSolver(cfg).step(p)


def run(p0: Profile, cfg: SolverConfig) -> FlowRun:
    """Integrate a profile under the flow (see FlowSolver.run)."""
    return FlowSolver(cfg).run(p0)
