"""Per-step invariant monitors of a flow run.

Each accepted state is reduced to a SeriesRecord: curvature maxima, the
neck/bump structure, the gradient bound, |Rm| psi^2, the log-pinching
functional and the scalar-curvature gradient quantities. Violations of
the properties the flow is known to preserve are collected, not raised.

Author: Odiseo Team
Created: 2025-11-12
Version: 1.0.0
"""

import numpy as np

from app.models.diagnostics import NeckBumpReport
from app.models.flow import MonitorReport, SeriesRecord
from app.models.geometry import Profile
from app.services.diagnostics import detect_features
from app.services.profile_geometry import (
    FloatArray,
    curvature,
    derivatives_s,
    pole_residual,
    scalar_curvature_gradient,
)
from app.utils.logging import get_logger

logger = get_logger(__name__)


def _sup(current: float | None, value: float | None) -> float | None:
    if value is None:
        return current
    if current is None:
        return value
    return max(current, value)


def pinching_functional(
    psi: FloatArray, psi_ss: FloatArray, K1: FloatArray, l_min0: float, window: slice | None
) -> float | None:
    """Sup of (K/L)(log L + 2 - log L_min(0)) with K = psi_ss/psi and L = K1.

    Sampled on ``window`` (the points strictly between the outer bump
    maxima, see bump_window) where K > 0 and L > 0. None without a window,
    when no point qualifies or when the initial L_min is not positive.
    """
    if window is None or not l_min0 > 0.0:
        return None
    psi_w = psi[window]
    if psi_w.size == 0:
        return None
    K = psi_ss[window] / psi_w
    L = K1[window]
    mask = (K > 0.0) & (L > 0.0)
    if not np.any(mask):
        return None
    values = (K[mask] / L[mask]) * (np.log(L[mask]) + 2.0 - np.log(l_min0))
    return float(np.max(values))


def bump_window(features: NeckBumpReport) -> slice | None:
    """Grid points strictly between x_- and x_+, or None with fewer than two bumps."""
    if features.bump_count < 2:
        return None
    return slice(features.bumps[0].index + 1, features.bumps[-1].index)


class InvariantMonitor:
    """Stateful observer of consecutive accepted states of one run.

    Attributes:
        gradient_tolerance: Slack allowed on |psi_s| <= 1.
        psi_floor: Smallest admissible interior psi.
        violations: Invariant failures seen so far.
    """

    def __init__(self, gradient_tolerance: float, psi_floor: float) -> None:
        self.gradient_tolerance = gradient_tolerance
        self.psi_floor = psi_floor
        self.violations: list[str] = []

        self._initial_gradient_ok = True
        self._scalar_positive = False
        self._l_min0 = 0.0
        self._started = False
        self._warned: set[str] = set()

        self._last_t: float | None = None
        self._last_inv_r: FloatArray | None = None
        self._last_r_max: float | None = None
        self._last_bumps: int | None = None

        self._report = MonitorReport()

    @property
    def enforces_gradient(self) -> bool:
        """Whether |psi_s| <= 1 held initially and is therefore enforced."""
        return self._initial_gradient_ok

    def _violate(self, kind: str, message: str) -> None:
        self.violations.append(message)
        if kind not in self._warned:
            self._warned.add(kind)
            logger.warning(f"Invariant violation ({kind}): {message}")

    def observe(self, p: Profile, dt: float) -> SeriesRecord:
        """Reduce one accepted state to a series record.

        Args:
            p: Accepted profile.
            dt: Step that produced it (0 for the initial state).

        Returns:
            SeriesRecord for p.

        Raises:
            DegenerateInterior: If the curvature cannot be evaluated.
        """
        field = curvature(p, self.psi_floor)
        psi_s, psi_ss = derivatives_s(p)
        features = detect_features(p)
        interior = slice(1, -1) if p.has_poles else slice(None)

        grad_max = float(np.max(np.abs(psi_s[interior])))
        rm_psi2 = float(np.max(field.rm_norm[interior] * p.psi[interior] ** 2))
        r_min_scalar = float(np.min(field.R))
        r_max_scalar = float(np.max(field.R))

        if not self._started:
            self._started = True
            self._initial_gradient_ok = grad_max <= 1.0 + self.gradient_tolerance
            self._scalar_positive = r_min_scalar > 0.0
            self._l_min0 = float(np.min(field.K1))
            self._report = self._report.model_copy(
                update={"scalar_positive_initially": self._scalar_positive}
            )
            if not self._initial_gradient_ok:
                logger.info(
                    f"Initial max |psi_s| = {grad_max:.6g} exceeds 1; gradient bound not enforced"
                )

        pinching = pinching_functional(
            p.psi, psi_ss, field.K1, self._l_min0, bump_window(features)
        )
        inv_sqrt_grad = scalar_curvature_gradient(p, field)
        residual = pole_residual(p)

        positive = field.R > 0.0
        inv_r = np.where(positive, 1.0 / np.where(positive, field.R, 1.0), np.nan)
        inv_r_rate: float | None = None
        growth: float | None = None
        if dt > 0.0 and self._last_t is not None:
            if self._last_inv_r is not None:
                both = np.isfinite(inv_r) & np.isfinite(self._last_inv_r)
                if np.any(both):
                    inv_r_rate = float(
                        np.max(np.abs(inv_r[both] - self._last_inv_r[both])) / dt
                    )
            if self._last_r_max is not None and r_max_scalar > 0.0:
                growth = (r_max_scalar - self._last_r_max) / dt / r_max_scalar**2

        if self._initial_gradient_ok and grad_max > 1.0 + self.gradient_tolerance:
            self._violate("gradient", f"max |psi_s| = {grad_max:.9f} > 1 at t={p.t:.9g}")
        if self._scalar_positive and r_min_scalar <= 0.0:
            self._violate("scalar", f"min R = {r_min_scalar:.6g} <= 0 at t={p.t:.9g}")
        if self._last_bumps is not None and features.bump_count > self._last_bumps:
            self._violate(
                "bumps",
                f"bump count rose {self._last_bumps} -> {features.bump_count} at t={p.t:.9g}",
            )

        report = self._report
        self._report = report.model_copy(
            update={
                "grad_max_sup": max(report.grad_max_sup, grad_max),
                "rm_psi2_sup": max(report.rm_psi2_sup, rm_psi2),
                "pinching_sup": _sup(report.pinching_sup, pinching),
                "inv_sqrt_r_gradient_sup": _sup(report.inv_sqrt_r_gradient_sup, inv_sqrt_grad),
                "inv_r_rate_sup": _sup(report.inv_r_rate_sup, inv_r_rate),
                "r_max_growth_sup": _sup(report.r_max_growth_sup, growth),
                "pole_residual_sup": max(report.pole_residual_sup, residual),
            }
        )
        self._last_t = p.t
        self._last_inv_r = inv_r
        self._last_r_max = r_max_scalar
        self._last_bumps = features.bump_count

        left, right = features.left_bump, features.right_bump
        return SeriesRecord(
            t=p.t,
            k_max=field.k_max,
            r_min=features.r_min,
            psi_min=float(np.min(p.psi[interior])),
            x_plus=features.x_plus,
            x_minus=features.x_minus,
            pinching=pinching,
            dt=dt,
            bump_count=features.bump_count,
            psi_x_plus=right.value if right else None,
            psi_x_minus=left.value if left else None,
            grad_max=grad_max,
            rm_psi2_max=rm_psi2,
            r_min_scalar=r_min_scalar,
            r_max_scalar=r_max_scalar,
            pole_residual=residual,
            inv_sqrt_r_gradient=inv_sqrt_grad,
        )

    def report(self) -> MonitorReport:
        """Summary of the run so far."""
        return self._report.model_copy(update={"violations": list(self.violations)})
