"""Parameter tuning for combinatorial algorithms and mechanisms."""

from ._core import *  # noqa: F401,F403
from ._core import PiecewiseFunction, MergeFamily, run_cli

__all__ = [name for name in dir() if not name.startswith("_")]
