"""run command: integrate one initial profile and classify its singularity.

Author: Odiseo Team
Created: 2025-11-18
Version: 1.0.0
"""

from pathlib import Path

from app.commands.common import audit_payload, resolve_initial
from app.models.config import RunConfig
from app.models.flow import Termination
from app.services.diagnostics import classify, ratio_cap_sensitivity
from app.services.flow_solver import run
from app.storage import ArtifactStore
from app.utils.logging import get_logger

logger = get_logger(__name__)


def cmd_run(config: RunConfig, out: Path, seed: int) -> int:
    """Run the flow and write series, ratio, snapshots and report.

    Returns:
        0 for any verdict, 1 when the run ended on the dt floor or a solver error.
    """
    store = ArtifactStore(out)
    p0 = resolve_initial(config)
    flow = run(p0, config.solver)
    report = classify(flow, config.classifier)
    sensitivity = ratio_cap_sensitivity(flow, config=config.classifier)

    store.write_series("series.csv", flow.series)
    store.write_ratio("ratio.csv", report.ratio_series)
    for k, snapshot in enumerate(flow.snapshots):
        store.write_profile(f"snapshots/profile_{k:04d}.csv", snapshot)
    store.write_json(
        "report.json",
        {
            **audit_payload(config, seed),
            "run": flow.summary(),
            "report": report.model_dump(mode="json"),
            "ratio_cap_sensitivity": {
                f"{factor:g}": verdict.value for factor, verdict in sensitivity.items()
            },
        },
    )

    logger.info(f"run finished: verdict={report.verdict.value}, outputs in {out}")
    failed = (Termination.DT_FLOOR, Termination.SOLVER_ERROR)
    return 1 if flow.termination in failed else 0
