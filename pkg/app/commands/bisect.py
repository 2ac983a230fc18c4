"""bisect command: bracket the critical family parameter.

Author: Odiseo Team
Created: 2025-11-18
Version: 1.0.0
"""

from pathlib import Path
from typing import Any

from app.commands.common import audit_payload, require_family
from app.exceptions import NonDichotomous
from app.models.config import RunConfig
from app.models.family import BisectionState
from app.services.family_builder import FamilyProbe, Probe, SyntheticProbe, bisect_critical
from app.storage import ArtifactStore
from app.utils.logging import get_logger

logger = get_logger(__name__)


def _ledger(state: BisectionState) -> dict[str, Any]:
    return {
        "bracket": [state.alpha_lo, state.alpha_hi],
        "width": state.width,
        "tolerance": state.tolerance,
        "probes": [r.model_dump(mode="json") for r in state.probes],
        "anomalies": [r.model_dump(mode="json") for r in state.anomalies],
        "ratio_maxima": state.ratio_maxima(),
    }


def cmd_bisect(config: RunConfig, out: Path, seed: int) -> int:
    """Bisect and write phase.csv and bisection.json.

    With ``bisection.synthetic_threshold`` set the probes use the synthetic
    dichotomy instead of running the flow.

    Returns:
        0 on a converged bracket, 1 when a probe stayed unresolved.
    """
    probe: Probe
    threshold = config.bisection.synthetic_threshold
    if threshold is not None:
        probe = SyntheticProbe(threshold)
    else:
        probe = FamilyProbe(require_family(config), config.solver, config.classifier)

    store = ArtifactStore(out)
    status = 0
    error: str | None = None
    try:
        state = bisect_critical(probe, config.bisection, config.solver.n_grid)
    except NonDichotomous as e:
        logger.error(f"bisection stopped: {e}")
        state, error, status = e.state, str(e), 1

    store.write_phase("phase.csv", state.probes)
    store.write_json(
        "bisection.json", {**audit_payload(config, seed), **_ledger(state), "error": error}
    )
    logger.info(f"bisect finished: bracket [{state.alpha_lo:.9g}, {state.alpha_hi:.9g}]")
    return status
