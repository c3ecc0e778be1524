"""Bundled datasets."""

from importlib import resources
from pathlib import Path

__all__ = ["nfl_path"]


def nfl_path() -> Path:
    """Path to the bundled NFL scoring-times dataset (42 pairs, CSV)."""
    return Path(resources.files(__package__) / "nfl.csv")
