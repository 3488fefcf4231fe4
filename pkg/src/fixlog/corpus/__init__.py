"""Bundled programs, datasets, and input generators."""

from __future__ import annotations

from pathlib import Path

DATA_DIR = Path(__file__).resolve().parent / "data"


def data_path(name: str) -> Path:
    """Path to a bundled program file or dataset directory."""
    return DATA_DIR / name
