"""soliton-check command: soliton residual and level-set identities.

Author: Odiseo Team
Created: 2025-11-18
Version: 1.0.0
"""

from pathlib import Path

import numpy as np

from app.commands.common import audit_payload, resolve_initial
from app.exceptions import ConfigError, CriticalLevel
from app.models.config import RunConfig
from app.models.soliton import PotentialProfile
from app.services.soliton_lab import (
    frame_oracle_error,
    level_set_identity_error,
    soliton_residual,
)
from app.storage import ArtifactStore, read_potential_csv
from app.utils.logging import get_logger

logger = get_logger(__name__)


def cmd_soliton_check(config: RunConfig, out: Path, seed: int) -> int:
    """Evaluate the soliton equation and write soliton.json.

    Returns:
        0 when the residual sup norm is within tolerance, 1 otherwise.
    """
    if config.soliton is None:
        raise ConfigError("soliton-check needs a 'soliton' section", field_path="soliton")
    check = config.soliton
    p = resolve_initial(config, validate=False)

    columns = read_potential_csv(check.potential_path)
    if columns["x"].shape != p.x.shape or not np.allclose(columns["x"], p.x, atol=1e-12):
        raise ConfigError(
            "potential grid does not match the profile grid", field_path="soliton.potential_path"
        )
    f = PotentialProfile(f=columns["f"], f_s=columns["f_s"], f_ss=columns["f_ss"])

    residual = soliton_residual(p, f, check.t)
    rng = np.random.default_rng(seed)
    identity: float | None
    note = ""
    try:
        identity = level_set_identity_error(p, f, check.level_fractions, rng)
    except CriticalLevel as e:
        identity, note = None, str(e)
    oracle = frame_oracle_error(p, check.oracle_frames, rng)
    passed = residual.sup_norm <= check.tolerance

    ArtifactStore(out).write_json(
        "soliton.json",
        {
            **audit_payload(config, seed),
            "sup_norm": residual.sup_norm,
            "radial_sup": float(np.max(np.abs(residual.radial))),
            "spherical_sup": float(np.max(np.abs(residual.spherical))),
            "tolerance": check.tolerance,
            "passed": passed,
            "level_set_identity_error": identity,
            "frame_oracle_error": oracle,
            "note": note,
        },
    )
    logger.info(f"soliton-check finished: sup_norm={residual.sup_norm:.3e}, passed={passed}")
    return 0 if passed else 1
