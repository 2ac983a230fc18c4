"""Utility modules."""

from app.utils.logging import get_logger, print_banner, print_config_summary, setup_logging

__all__ = [
    "get_logger",
    "print_banner",
    "print_config_summary",
    "setup_logging",
]
