"""Command implementations package."""

from app.commands.bisect import cmd_bisect
from app.commands.run import cmd_run
from app.commands.soliton import cmd_soliton_check
from app.commands.sweep import cmd_sweep
from app.commands.validate import cmd_validate

__all__ = ["cmd_bisect", "cmd_run", "cmd_soliton_check", "cmd_sweep", "cmd_validate"]
