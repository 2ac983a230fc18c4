"""validate command: check the family conditions on the initial profile.

Author: Odiseo Team
Created: 2025-11-18
Version: 1.0.0
"""

from pathlib import Path

from app.commands.common import audit_payload, resolve_initial
from app.models.config import RunConfig
from app.services.family_builder import check_constraints
from app.storage import ArtifactStore
from app.utils.logging import get_logger

logger = get_logger(__name__)


def cmd_validate(config: RunConfig, out: Path, seed: int) -> int:
    """Write validation.json; exit 1 listing the failed conditions."""
    p = resolve_initial(config, validate=False)
    report = check_constraints(p)
    ArtifactStore(out).write_json(
        "validation.json",
        {**audit_payload(config, seed), "passed": report.passed, **report.model_dump(mode="json")},
    )
    if not report.passed:
        for name, detail in sorted(report.failures.items()):
            logger.error(f"condition {name} failed: {detail}")
        return 1
    logger.info("validate finished: all conditions hold")
    return 0
