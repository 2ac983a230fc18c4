"""File persistence for profiles, series, reports and run documents.

CSV files carry floats with 17 significant digits so that a profile read
back is bit-identical; JSON is written with sorted keys and two-space
indentation so identical runs produce identical files.

Author: Odiseo Team
Created: 2025-11-17
Version: 1.0.0
"""

import csv
import json
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import ValidationError

from app.exceptions import ConfigError, IoError
from app.models.config import RunConfig
from app.models.family import ProbeResult
from app.models.flow import SeriesRecord
from app.models.geometry import BoundaryMode, Profile
from app.utils.logging import get_logger

logger = get_logger(__name__)

FLOAT_FORMAT = "%.17g"
SERIES_COLUMNS = ("t", "k_max", "r_min", "psi_min", "x_plus", "x_minus", "pinching")
PHASE_COLUMNS = ("alpha", "verdict", "max_ratio", "T_est")
POTENTIAL_COLUMNS = ("x", "f", "f_s", "f_ss")


def _cell(value: float | str | None) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    return FLOAT_FORMAT % value


def _read_text(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as e:
        raise IoError(f"cannot read {path}: {e.strerror or e}") from e


# ============================================================================
# READERS
# ============================================================================


def load_run_config(path: Path) -> RunConfig:
    """Read and validate a run document.

    Raises:
        IoError: If the file cannot be read.
        ConfigError: If it is not JSON or fails validation; ``field_path``
            names the first offending field.
    """
    text = _read_text(path)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path} is not valid JSON: {e.msg} (line {e.lineno})") from e
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        field_path = ".".join(str(part) for part in first["loc"]) or None
        raise ConfigError(f"invalid run config {path}: {first['msg']}", field_path) from e


def _split_comments(text: str) -> tuple[dict[str, str], list[str]]:
    meta: dict[str, str] = {}
    rows: list[str] = []
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            key, sep, value = stripped.lstrip("#").partition("=")
            if sep:
                meta[key.strip()] = value.strip()
            continue
        rows.append(stripped)
    return meta, rows


def _numeric_table(path: Path, rows: list[str], columns: Sequence[str]) -> np.ndarray:
    if not rows or tuple(c.strip() for c in rows[0].split(",")) != tuple(columns):
        raise IoError(f"{path}: expected header {','.join(columns)}")
    try:
        table = np.loadtxt(rows[1:], delimiter=",", dtype=np.float64, ndmin=2)
    except ValueError as e:
        raise IoError(f"{path}: malformed numeric data ({e})") from e
    if table.shape[1] != len(columns):
        raise IoError(f"{path}: expected {len(columns)} columns, found {table.shape[1]}")
    return table


def read_profile_csv(path: Path) -> Profile:
    """Read a profile written by ArtifactStore.write_profile.

    The ``# n=`` comment is required; ``# t=`` and ``# boundary_mode=``
    default to 0 and sphere poles.

    Raises:
        IoError: If the file is unreadable or malformed.
        ConfigError: If the values do not form a valid profile.
    """
    meta, rows = _split_comments(_read_text(path))
    table = _numeric_table(path, rows, ("x", "phi", "psi"))
    try:
        n = int(meta["n"])
        t = float(meta.get("t", "0"))
        mode = BoundaryMode(meta.get("boundary_mode", BoundaryMode.SPHERE_POLES.value))
    except (KeyError, ValueError) as e:
        raise IoError(f"{path}: bad or missing header comment ({e})") from e
    try:
        return Profile(
            n=n, x=table[:, 0], phi=table[:, 1], psi=table[:, 2], t=t, boundary_mode=mode
        )
    except ValidationError as e:
        reason = e.errors()[0]["msg"]
        raise ConfigError(f"{path} is not a valid profile: {reason}", "profile_path") from e


def read_potential_csv(path: Path) -> dict[str, np.ndarray]:
    """Read a potential file with header x,f,f_s,f_ss into column arrays."""
    _, rows = _split_comments(_read_text(path))
    table = _numeric_table(path, rows, POTENTIAL_COLUMNS)
    return {name: np.ascontiguousarray(table[:, k]) for k, name in enumerate(POTENTIAL_COLUMNS)}


# ============================================================================
# WRITER
# ============================================================================


class ArtifactStore:
    """Writes the artifacts of one command into an output directory.

    Attributes:
        root: Output directory (created on first use).
    """

    def __init__(self, root: Path) -> None:
        self.root = Path(root)
        logger.info(f"ArtifactStore initialized (root: {self.root})")

    def path(self, name: str) -> Path:
        """Path of an artifact, creating its parent directory."""
        target = self.root / name
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise IoError(f"cannot create {target.parent}: {e.strerror or e}") from e
        return target

    def _write(self, name: str, text: str) -> Path:
        target = self.path(name)
        try:
            target.write_text(text, encoding="utf-8")
        except OSError as e:
            raise IoError(f"cannot write {target}: {e.strerror or e}") from e
        logger.debug(f"Wrote {target}")
        return target

    def _write_rows(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        target = self.path(name)
        try:
            with target.open("w", encoding="utf-8", newline="") as handle:
                writer = csv.writer(handle, lineterminator="\n")
                writer.writerow(header)
                for row in rows:
                    writer.writerow([_cell(value) for value in row])
        except OSError as e:
            raise IoError(f"cannot write {target}: {e.strerror or e}") from e
        logger.debug(f"Wrote {target}")
        return target

    def write_json(self, name: str, payload: dict[str, Any]) -> Path:
        """JSON document with sorted keys and two-space indentation."""
        return self._write(name, json.dumps(payload, sort_keys=True, indent=2) + "\n")

    def write_profile(self, name: str, p: Profile) -> Path:
        """Profile CSV with n, t and boundary mode in header comments."""
        lines = [
            f"# n={p.n}",
            f"# t={FLOAT_FORMAT % p.t}",
            f"# boundary_mode={p.boundary_mode.value}",
            "x,phi,psi",
        ]
        lines += [
            ",".join(FLOAT_FORMAT % v for v in row) for row in zip(p.x, p.phi, p.psi)
        ]
        return self._write(name, "\n".join(lines) + "\n")

    def write_series(self, name: str, series: Sequence[SeriesRecord]) -> Path:
        """Series CSV t,k_max,r_min,psi_min,x_plus,x_minus,pinching (blank = undefined)."""
        return self._write_rows(
            name, SERIES_COLUMNS, ([getattr(r, c) for c in SERIES_COLUMNS] for r in series)
        )

    def write_ratio(self, name: str, pairs: Sequence[tuple[float, float]]) -> Path:
        """Ratio CSV t,rho."""
        return self._write_rows(name, ("t", "rho"), pairs)

    def write_phase(self, name: str, results: Sequence[ProbeResult]) -> Path:
        """Phase table alpha,verdict,max_ratio,T_est sorted by alpha."""
        ordered = sorted(results, key=lambda r: (r.alpha, r.n_grid or 0))
        return self._write_rows(
            name,
            PHASE_COLUMNS,
            ((r.alpha, r.verdict_label, r.max_ratio, r.T_est) for r in ordered),
        )
