"""Helpers shared by the command implementations.

Author: Odiseo Team
Created: 2025-11-18
Version: 1.0.0
"""

from typing import Any

from app.exceptions import ConfigError
from app.models.config import RunConfig
from app.models.family import FamilySpec
from app.models.geometry import Profile
from app.services.family_builder import build_initial
from app.storage import read_profile_csv
from app.utils.logging import get_logger

logger = get_logger(__name__)


def require_family(config: RunConfig) -> FamilySpec:
    """The family template of a run document.

    Raises:
        ConfigError: If the document names a profile file instead.
    """
    if config.family is None:
        raise ConfigError("this command needs a 'family' section", field_path="family")
    return config.family


def resolve_initial(config: RunConfig, validate: bool = True) -> Profile:
    """Initial profile of a run document.

    A family member is built on the solver grid; a profile file must have
    exactly solver.n_grid points.

    Args:
        config: Run document.
        validate: Enforce the family conditions on a built member.

    Raises:
        ConfigError: On a grid size mismatch or a file that is not a profile.
        IoError: If the profile file cannot be read.
        ConstraintViolation: If a built member fails validation.
    """
    n_grid = config.solver.n_grid
    if config.family is not None:
        if config.family.n_grid != n_grid:
            logger.info(f"Family grid {config.family.n_grid} replaced by solver grid {n_grid}")
        return build_initial(config.family.with_alpha(config.family.alpha, n_grid), validate)

    if config.profile_path is None:
        raise ConfigError("no initial data given", field_path="profile_path")
    p = read_profile_csv(config.profile_path)
    if p.size != n_grid:
        raise ConfigError(
            f"profile has {p.size} points but solver.n_grid is {n_grid}",
            field_path="solver.n_grid",
        )
    return p


def audit_payload(config: RunConfig, seed: int) -> dict[str, Any]:
    """Resolved configuration embedded in every JSON output."""
    return {"config": config.model_dump(mode="json"), "seed": seed}
