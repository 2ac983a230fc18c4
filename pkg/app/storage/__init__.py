"""Artifact persistence module."""

from app.storage.files import (
    ArtifactStore,
    load_run_config,
    read_potential_csv,
    read_profile_csv,
)

__all__ = [
    "ArtifactStore",
    "load_run_config",
    "read_potential_csv",
    "read_profile_csv",
]
