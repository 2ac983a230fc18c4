"""sweep command: verdicts of several family members.

Author: Odiseo Team
Created: 2025-11-18
Version: 1.0.0
"""

from collections.abc import Sequence
from pathlib import Path

from app.commands.common import audit_payload, require_family
from app.models.config import RunConfig
from app.services.family_builder import FamilyProbe, sweep
from app.storage import ArtifactStore
from app.utils.logging import get_logger

logger = get_logger(__name__)


def cmd_sweep(
    config: RunConfig, out: Path, seed: int, alphas: Sequence[float] | None = None
) -> int:
    """Probe each alpha and write phase.csv and sweep.json.

    Failed probes are recorded with verdict "error" and do not change the
    exit status.
    """
    family = require_family(config)
    chosen = list(alphas) if alphas is not None else list(config.sweep.alphas)
    probe = FamilyProbe(family, config.solver, config.classifier)
    results = sweep(probe, chosen, config.solver.n_grid, config.sweep.max_workers)

    store = ArtifactStore(out)
    store.write_phase("phase.csv", results)
    store.write_json(
        "sweep.json",
        {
            **audit_payload(config, seed),
            "alphas": sorted(set(chosen)),
            "probes": [r.model_dump(mode="json") for r in results],
        },
    )
    failed = sum(1 for r in results if r.error is not None)
    logger.info(f"sweep finished: {len(results)} probes, {failed} failed")
    return 0
